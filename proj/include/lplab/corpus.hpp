#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bands.hpp"
#include "error.hpp"
#include "field.hpp"

namespace lplab {

struct TestFunctionSpec {
  std::string family = "gaussian";
  std::string id;
  double sigma = 0.05;
  std::vector<double> center;  // empty selects the box center
  double frequency = 0.0;
  int band = 3;
  std::uint64_t seed = 1;
  std::vector<double> coeffs{0.0, 1.0};
  double a = 0.5;
  double b = 3.0;
  int terms = 8;
  double bandlimit = 0.0;  // 0 disables the spectral cutoff
};

namespace detail {

inline double wrapped(double d, double B) {
  d = std::fmod(d, B);
  if (d < -B / 2.0) d += B;
  if (d >= B / 2.0) d -= B;
  return d;
}

inline std::vector<double> center_of(const TestFunctionSpec& spec, const GridSpec& g) {
  std::vector<double> c(g.dim, g.B / 2.0);
  for (std::size_t a = 0; a < spec.center.size() && a < c.size(); ++a) c[a] = spec.center[a];
  return c;
}

inline void check_width(const TestFunctionSpec& spec, const GridSpec& g) {
  double lo = 4.0 * g.spacing(), hi = g.B / 8.0, eps = 1e-12 * g.B;
  if (spec.sigma < lo - eps || spec.sigma > hi + eps)
    fail(ErrorKind::UnresolvableSpec, spec.family + " width " + std::to_string(spec.sigma) + " outside [4 spacing, B/8]");
}

// Box-Muller on a 64-bit Mersenne stream; fixed arithmetic keeps runs reproducible.
class Normal {
 public:
  explicit Normal(std::uint64_t seed) : gen_(seed) {}
  double operator()() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    double rad = std::sqrt(-2.0 * std::log(u1));
    spare_ = rad * std::sin(2.0 * kPi * u2);
    have_ = true;
    return rad * std::cos(2.0 * kPi * u2);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_ = false;
};

inline SampledField from_real(const GridSpec& g, const std::vector<double>& v) { return make_field(v, g); }

inline SampledField lowpass(const SampledField& f, double K) {
  DyadicBandSystem chi_only(f.grid(), 1.0, 0, 0);
  return apply_multiplier(
      dft_forward(f),
      [&](std::size_t, const std::array<double, 3>& xi) {
        return cplx(chi_only.chi(2.0 * norm3(xi, f.grid().dim) / K), 0.0);
      },
      f.is_real());
}

}  // namespace detail

inline SampledField sample_family(const TestFunctionSpec& spec, const GridSpec& g) {
  g.validate();
  const std::size_t X = g.total();
  std::vector<double> v(X, 0.0);
  auto c = detail::center_of(spec, g);
  auto dist2 = [&](std::size_t idx) {
    auto ix = unravel(g, idx);
    double s = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      double d = detail::wrapped(static_cast<double>(ix[a]) * g.spacing() - c[a], g.B);
      s += d * d;
    }
    return s;
  };
  auto coord = [&](std::size_t idx, int a) {
    return detail::wrapped(static_cast<double>(unravel(g, idx)[a]) * g.spacing() - c[a], g.B);
  };
  const std::string& fam = spec.family;
  if (fam == "gaussian" || fam == "modulated_gaussian") {
    detail::check_width(spec, g);
    if (fam == "modulated_gaussian" && std::abs(spec.frequency) >= g.nyquist())
      fail(ErrorKind::UnresolvableSpec, "modulation above the Nyquist frequency");
    for (std::size_t i = 0; i < X; ++i) {
      v[i] = std::exp(-dist2(i) / (spec.sigma * spec.sigma));
      if (fam == "modulated_gaussian") v[i] *= std::cos(2.0 * kPi * spec.frequency * coord(i, 0));
    }
  } else if (fam == "smooth_bump") {
    detail::check_width(spec, g);
    for (std::size_t i = 0; i < X; ++i) {
      double u = dist2(i) / (spec.sigma * spec.sigma);
      v[i] = u < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u)) : 0.0;
    }
  } else if (fam == "windowed_polynomial") {
    detail::check_width(spec, g);
    DyadicBandSystem win(g, 1.0, 0, 0);
    double half = 2.0 * spec.sigma;  // flat on |x - c| <= sigma, zero beyond 2 sigma
    if (half > g.B / 2.0) fail(ErrorKind::UnresolvableSpec, "window wider than the box");
    for (std::size_t i = 0; i < X; ++i) {
      double u = coord(i, 0) / spec.sigma, poly = 0.0, pw = 1.0;
      for (double cf : spec.coeffs) {
        poly += cf * pw;
        pw *= u;
      }
      double w = 1.0;
      for (int a = 0; a < g.dim; ++a) w *= win.chi(std::abs(coord(i, a)) / spec.sigma);
      v[i] = poly * w;
    }
  } else if (fam == "weierstrass") {
    if (!(spec.b > 1.0) || std::abs(spec.b - std::round(spec.b)) > 0.0)
      fail(ErrorKind::UnresolvableSpec, "Weierstrass base must be an integer > 1");
    double cap = g.nyquist() / 2.0;
    if (spec.bandlimit > 0.0) cap = std::min(cap, spec.bandlimit / 2.0);
    double amp = 1.0, freq = 1.0;
    int used = 0;
    for (int t = 0; t < spec.terms; ++t, amp *= spec.a, freq *= spec.b) {
      if (freq / g.B >= cap) break;
      ++used;
      for (std::size_t i = 0; i < X; ++i) {
        auto ix = unravel(g, i);
        for (int a = 0; a < g.dim; ++a)
          v[i] += amp * std::cos(2.0 * kPi * freq * static_cast<double>(ix[a]) / static_cast<double>(g.N));
      }
    }
    if (used == 0) fail(ErrorKind::UnresolvableSpec, "no resolvable Weierstrass term");
    return detail::from_real(g, v);
  } else if (fam == "random_band") {
    DyadicBandSystem sys = build_band_system(g);
    if (spec.band < sys.j_min() || spec.band > sys.j_max())
      fail(ErrorKind::UnresolvableSpec, "band " + std::to_string(spec.band) + " outside the resolvable range");
    double lo = std::exp2(spec.band - 1), hi = std::exp2(spec.band + 1);
    std::vector<cplx> coef(X, cplx(0.0, 0.0));
    std::vector<bool> done(X, false);
    detail::Normal normal(spec.seed);
    for_each_mode(g, [&](std::size_t idx, const std::array<double, 3>& xi) {
      double r = norm3(xi, g.dim);
      double re = normal(), im = normal();
      if (done[idx] || r < lo || r >= hi) return;
      auto ix = unravel(g, idx);
      for (int a = 0; a < g.dim; ++a) ix[a] = -signed_index(ix[a], g.N);
      std::size_t mirror = ravel(g, ix);
      coef[idx] = cplx(re, im);
      coef[mirror] = std::conj(coef[idx]);
      done[idx] = done[mirror] = true;
    });
    SampledField f = dft_inverse_raw(std::move(coef), g, true);
    double m = f.max_abs();
    return m > 0.0 ? scale(f, 1.0 / m) : f;
  } else {
    fail(ErrorKind::UnresolvableSpec, "unknown family '" + fam + "'");
  }
  SampledField f = detail::from_real(g, v);
  if (spec.bandlimit > 0.0) f = detail::lowpass(f, spec.bandlimit);
  return f;
}

// Twelve-member corpus adapted to the grid; bandlimit > 0 caps every member's spectrum.
inline std::vector<TestFunctionSpec> default_corpus(const GridSpec& g, double bandlimit = 0.0) {
  double lo = std::max(4.0 * g.spacing(), g.B / 128.0), hi = g.B / 8.0;
  double mid = std::sqrt(lo * hi);
  double nyq = g.nyquist();
  double top = bandlimit > 0.0 ? std::min(bandlimit, nyq) : nyq;
  DyadicBandSystem sys = build_band_system(g);
  int jlo = sys.j_min(), jhi = sys.j_max() - 1;
  while (jhi > jlo && std::exp2(jhi + 1) > top) --jhi;
  if (jhi - jlo >= 3) ++jlo;
  int jmid = (jlo + jhi + 1) / 2;
  std::vector<TestFunctionSpec> out;
  auto push = [&](TestFunctionSpec s, const std::string& id) {
    s.id = id;
    s.bandlimit = bandlimit;
    out.push_back(s);
  };
  TestFunctionSpec s;
  s.family = "gaussian";
  s.sigma = lo;
  push(s, "gaussian_lo");
  s.sigma = mid;
  push(s, "gaussian_mid");
  s.sigma = hi;
  push(s, "gaussian_hi");
  s = TestFunctionSpec{};
  s.family = "modulated_gaussian";
  s.sigma = mid;
  s.frequency = std::max(1.0, std::floor(top / 8.0));
  push(s, "modulated_a");
  s.sigma = hi;
  s.frequency = std::max(1.0, std::floor(top / 32.0));
  push(s, "modulated_b");
  s = TestFunctionSpec{};
  s.family = "smooth_bump";
  s.sigma = mid;
  push(s, "bump_a");
  s.sigma = hi;
  s.center = std::vector<double>(g.dim, g.B * 0.375);
  push(s, "bump_b");
  s = TestFunctionSpec{};
  s.family = "random_band";
  s.band = jlo;
  s.seed = 11;
  push(s, "random_low");
  s.band = jmid;
  s.seed = 12;
  push(s, "random_mid");
  s.band = jhi;
  s.seed = 13;
  push(s, "random_high");
  s = TestFunctionSpec{};
  s.family = "windowed_polynomial";
  s.sigma = hi;
  s.coeffs = {0.5, 1.0, -0.75};
  push(s, "window_poly");
  s = TestFunctionSpec{};
  s.family = "weierstrass";
  s.a = 0.5;
  s.b = 3.0;
  s.terms = 8;
  push(s, "weierstrass");
  return out;
}

}  // namespace lplab
