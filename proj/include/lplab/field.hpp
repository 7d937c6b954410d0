#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "error.hpp"
#include "fft.hpp"
#include "numeric.hpp"

namespace lplab {

using cplx = std::complex<double>;

struct GridSpec {
  int dim = 1;
  std::int64_t N = 256;
  double B = 1.0;

  void validate() const {
    if (dim < 1 || dim > 3) fail(ErrorKind::ShapeMismatch, "dim must be 1, 2 or 3");
    if (!is_power_of_two(N) || N < 2) fail(ErrorKind::ShapeMismatch, "N must be a power of two");
    if (dim * ilog2(N) > 30) fail(ErrorKind::ShapeMismatch, "grid exceeds 2^30 points");
    if (!(B > 0.0) || !std::isfinite(B)) fail(ErrorKind::ShapeMismatch, "box length must be positive");
  }

  double spacing() const { return B / static_cast<double>(N); }
  double cell_volume() const { return std::pow(spacing(), dim); }
  double volume() const { return std::pow(B, dim); }
  double nyquist() const { return static_cast<double>(N) / (2.0 * B); }
  std::size_t total() const {
    std::size_t t = 1;
    for (int a = 0; a < dim; ++a) t *= static_cast<std::size_t>(N);
    return t;
  }

  bool operator==(const GridSpec& o) const { return dim == o.dim && N == o.N && B == o.B; }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

inline std::int64_t signed_index(std::int64_t i, std::int64_t n) { return i < n / 2 ? i : i - n; }

// Per-axis indices of a flat row-major position; axis 0 varies slowest.
inline std::array<std::int64_t, 3> unravel(const GridSpec& g, std::size_t idx) {
  std::array<std::int64_t, 3> out{0, 0, 0};
  for (int a = g.dim - 1; a >= 0; --a) {
    out[a] = static_cast<std::int64_t>(idx % static_cast<std::size_t>(g.N));
    idx /= static_cast<std::size_t>(g.N);
  }
  return out;
}

inline std::size_t ravel(const GridSpec& g, const std::array<std::int64_t, 3>& ix) {
  std::size_t idx = 0;
  for (int a = 0; a < g.dim; ++a) {
    std::int64_t v = ((ix[a] % g.N) + g.N) % g.N;
    idx = idx * static_cast<std::size_t>(g.N) + static_cast<std::size_t>(v);
  }
  return idx;
}

// Calls fn(flat index, xi) with xi in cycles per length for every lattice mode.
template <class Fn>
void for_each_mode(const GridSpec& g, Fn&& fn) {
  std::size_t total = g.total();
  std::array<double, 3> xi{0.0, 0.0, 0.0};
  for (std::size_t idx = 0; idx < total; ++idx) {
    auto ix = unravel(g, idx);
    for (int a = 0; a < g.dim; ++a) xi[a] = static_cast<double>(signed_index(ix[a], g.N)) / g.B;
    fn(idx, xi);
  }
}

inline double norm3(const std::array<double, 3>& v, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += v[a] * v[a];
  return std::sqrt(s);
}

class SampledField {
 public:
  SampledField() = default;
  SampledField(GridSpec grid, std::vector<cplx> samples) : grid_(grid), samples_(std::move(samples)) {
    grid_.validate();
    if (samples_.size() != grid_.total())
      fail(ErrorKind::ShapeMismatch, "expected " + std::to_string(grid_.total()) + " samples, got " +
                                         std::to_string(samples_.size()));
    real_ = true;
    for (const auto& v : samples_) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) fail(ErrorKind::NonFiniteSample, "sample is not finite");
      if (v.imag() != 0.0) real_ = false;
    }
  }

  const GridSpec& grid() const { return grid_; }
  const std::vector<cplx>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  const cplx& operator[](std::size_t i) const { return samples_[i]; }
  bool is_real() const { return real_; }

  std::vector<double> magnitudes() const {
    std::vector<double> m(samples_.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::abs(samples_[i]);
    return m;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : samples_) m = std::max(m, std::abs(v));
    return m;
  }

  // Coordinate of grid point idx along axis a.
  double coord(std::size_t idx, int a) const { return static_cast<double>(unravel(grid_, idx)[a]) * grid_.spacing(); }

 private:
  GridSpec grid_;
  std::vector<cplx> samples_;
  bool real_ = true;
};

// Fourier series coefficients c_k, stored in transform order; f(x) = sum c_k exp(2 pi i k.x / B).
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(GridSpec grid, std::vector<cplx> coeffs, bool from_real)
      : grid_(grid), coeffs_(std::move(coeffs)), from_real_(from_real) {}

  const GridSpec& grid() const { return grid_; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  std::vector<cplx>& coeffs() { return coeffs_; }
  bool from_real() const { return from_real_; }

  cplx at(const std::array<std::int64_t, 3>& k) const { return coeffs_[ravel(grid_, k)]; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  // Multiplier m(B^n) relating sum |c_k|^2 to the integral of |f|^2.
  double parseval_factor() const { return grid_.volume(); }

 private:
  GridSpec grid_;
  std::vector<cplx> coeffs_;
  bool from_real_ = false;
};

inline SampledField make_field(std::vector<cplx> samples, const GridSpec& grid) {
  return SampledField(grid, std::move(samples));
}

inline SampledField make_field(const std::vector<double>& samples, const GridSpec& grid) {
  return SampledField(grid, std::vector<cplx>(samples.begin(), samples.end()));
}

inline SpectralField dft_forward(const SampledField& f) {
  std::vector<cplx> c = f.samples();
  fft::transform(c, f.grid().dim, static_cast<std::size_t>(f.grid().N), -1);
  double inv = 1.0 / static_cast<double>(c.size());
  for (auto& v : c) v *= inv;
  return SpectralField(f.grid(), std::move(c), f.is_real());
}

inline SampledField dft_inverse_raw(std::vector<cplx> c, const GridSpec& g, bool real_out) {
  fft::transform(c, g.dim, static_cast<std::size_t>(g.N), +1);
  if (real_out)
    for (auto& v : c) v = cplx(v.real(), 0.0);
  return SampledField(g, std::move(c));
}

inline SampledField dft_inverse(const SpectralField& s) { return dft_inverse_raw(s.coeffs(), s.grid(), false); }

// Applies a Fourier multiplier mult(idx, xi) -> cplx and returns to physical space.
template <class Mult>
SampledField apply_multiplier(const SpectralField& s, Mult&& mult, bool real_out) {
  std::vector<cplx> c = s.coeffs();
  for_each_mode(s.grid(), [&](std::size_t idx, const std::array<double, 3>& xi) { c[idx] *= mult(idx, xi); });
  return dft_inverse_raw(std::move(c), s.grid(), real_out);
}

inline void require_exponent(double p) {
  if (!(p > 0.0) || std::isnan(p)) fail(ErrorKind::InvalidExponent, "exponent must be positive");
}

// Riemann-sum L^p quasinorm of nonnegative samples with cell volume dv.
inline double lp_norm_abs(const std::vector<double>& a, double p, double dv) {
  require_exponent(p);
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : a) m = std::max(m, v);
    return m;
  }
  Accumulator acc;
  for (double v : a)
    if (v > 0.0) acc.add(std::pow(v, p));
  return std::pow(acc.value() * dv, 1.0 / p);
}

inline double lp_norm(const SampledField& f, double p) { return lp_norm_abs(f.magnitudes(), p, f.grid().cell_volume()); }

inline SampledField scale(const SampledField& f, cplx alpha) {
  std::vector<cplx> v = f.samples();
  for (auto& x : v) x *= alpha;
  return SampledField(f.grid(), std::move(v));
}

// x -> f(2^m x) by spectral remapping k -> 2^m k.
inline SampledField dyadic_dilate(const SampledField& f, int m, double tol = 1e-13) {
  if (m == 0) return f;
  const GridSpec& g = f.grid();
  SpectralField s = dft_forward(f);
  double cut = tol * s.max_abs();
  std::vector<cplx> out(g.total(), cplx(0.0, 0.0));
  std::int64_t factor = std::int64_t{1} << std::abs(m);
  for (std::size_t idx = 0; idx < g.total(); ++idx) {
    cplx c = s.coeffs()[idx];
    if (std::abs(c) <= cut) continue;
    auto ix = unravel(g, idx);
    std::array<std::int64_t, 3> k{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) {
      std::int64_t ka = signed_index(ix[a], g.N);
      if (m > 0) {
        ka *= factor;
        if (ka < -g.N / 2 || ka >= g.N / 2)
          fail(ErrorKind::AliasingError, "dilation by 2^" + std::to_string(m) + " leaves the frequency lattice");
      } else {
        if (ka % factor != 0)
          fail(ErrorKind::NonDivisibleSpectrum, "spectrum not divisible by 2^" + std::to_string(-m));
        ka /= factor;
      }
      k[a] = ka;
    }
    out[ravel(g, k)] = c;
  }
  return dft_inverse_raw(std::move(out), g, f.is_real());
}

// x -> f(x + shift).
inline SampledField translate(const SampledField& f, const std::vector<double>& shift) {
  const GridSpec& g = f.grid();
  if (static_cast<int>(shift.size()) != g.dim) fail(ErrorKind::ShapeMismatch, "shift dimension mismatch");
  if (std::all_of(shift.begin(), shift.end(), [](double v) { return v == 0.0; })) return f;
  SpectralField s = dft_forward(f);
  return apply_multiplier(
      s,
      [&](std::size_t, const std::array<double, 3>& xi) {
        double ph = 0.0;
        for (int a = 0; a < g.dim; ++a) ph += xi[a] * shift[a];
        return std::polar(1.0, 2.0 * kPi * ph);
      },
      f.is_real());
}

// x -> f(x + offset * spacing) by index rotation.
inline SampledField index_shift(const SampledField& f, const std::array<std::int64_t, 3>& offset) {
  const GridSpec& g = f.grid();
  std::vector<cplx> out(g.total());
  for (std::size_t idx = 0; idx < g.total(); ++idx) {
    auto ix = unravel(g, idx);
    for (int a = 0; a < g.dim; ++a) ix[a] += offset[a];
    out[idx] = f[ravel(g, ix)];
  }
  return SampledField(g, std::move(out));
}

inline SampledField add(const SampledField& a, const SampledField& b, cplx beta = 1.0) {
  if (a.grid() != b.grid()) fail(ErrorKind::GridMismatch, "fields live on different grids");
  std::vector<cplx> v = a.samples();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += beta * b[i];
  return SampledField(a.grid(), std::move(v));
}

inline double max_abs_diff(const SampledField& a, const SampledField& b) {
  if (a.grid() != b.grid()) fail(ErrorKind::GridMismatch, "fields live on different grids");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace lplab
