#pragma once

#include <cmath>
#include <vector>

#include "error.hpp"
#include "field.hpp"

namespace lplab {

enum class DiffMethod { Shift, Spectral };

struct DifferenceSpec {
  int L = 1;
  std::vector<double> h;
  DiffMethod method = DiffMethod::Spectral;
};

// d_j with (-1)^{L+1} Delta^L_h f(x) = sum_j d_j f(x + j h) - f(x).
inline std::vector<long long> difference_coefficients(int L) {
  if (L < 1) fail(ErrorKind::InvalidExponent, "difference order must be at least 1");
  std::vector<long long> d(L);
  for (int j = 1; j <= L; ++j) d[j - 1] = ((j + 1) % 2 == 0 ? 1 : -1) * binomial(L, j);
  return d;
}

// (exp(2 pi i h.xi) - 1)^L
inline cplx difference_symbol(const std::vector<double>& h, const std::array<double, 3>& xi, int dim, int L) {
  double ph = 0.0;
  for (int a = 0; a < dim; ++a) ph += h[a] * xi[a];
  cplx base = std::polar(1.0, 2.0 * kPi * ph) - 1.0;
  cplx out = 1.0;
  for (int i = 0; i < L; ++i) out *= base;
  return out;
}

inline void check_spec(const GridSpec& g, const DifferenceSpec& spec) {
  if (spec.L < 1) fail(ErrorKind::InvalidExponent, "difference order must be at least 1");
  if (static_cast<int>(spec.h.size()) != g.dim) fail(ErrorKind::ShapeMismatch, "step dimension mismatch");
  double n2 = 0.0;
  for (double v : spec.h) n2 += v * v;
  if (!(n2 > 0.0)) fail(ErrorKind::MisalignedStep, "step must be nonzero");
}

inline SampledField iterated_difference(const SpectralField& s, const DifferenceSpec& spec) {
  check_spec(s.grid(), spec);
  int dim = s.grid().dim;
  return apply_multiplier(
      s, [&](std::size_t, const std::array<double, 3>& xi) { return difference_symbol(spec.h, xi, dim, spec.L); },
      s.from_real());
}

inline SampledField iterated_difference(const SampledField& f, const DifferenceSpec& spec) {
  const GridSpec& g = f.grid();
  check_spec(g, spec);
  if (spec.method == DiffMethod::Spectral) return iterated_difference(dft_forward(f), spec);
  std::array<std::int64_t, 3> off{0, 0, 0};
  for (int a = 0; a < g.dim; ++a) {
    double steps = spec.h[a] / g.spacing();
    double r = std::round(steps);
    if (std::abs(steps - r) > 1e-9 * std::max(1.0, std::abs(steps)))
      fail(ErrorKind::MisalignedStep, "step is not a multiple of the grid spacing");
    off[a] = static_cast<std::int64_t>(r);
  }
  SampledField cur = f;
  for (int i = 0; i < spec.L; ++i) cur = add(index_shift(cur, off), cur, -1.0);
  return cur;
}

inline std::vector<double> axis_vector(const GridSpec& g, int axis, double t) {
  if (axis < 1 || axis > g.dim) fail(ErrorKind::InvalidAxis, "axis " + std::to_string(axis) + " not in [1, dim]");
  std::vector<double> h(g.dim, 0.0);
  h[axis - 1] = t;
  return h;
}

inline SampledField axis_difference(const SampledField& f, double t, int axis, int L) {
  if (!(t > 0.0)) fail(ErrorKind::MisalignedStep, "axis step must be positive");
  return iterated_difference(f, DifferenceSpec{L, axis_vector(f.grid(), axis, t), DiffMethod::Spectral});
}

}  // namespace lplab
