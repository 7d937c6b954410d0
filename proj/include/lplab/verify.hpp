#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bands.hpp"
#include "corpus.hpp"
#include "differences.hpp"
#include "error.hpp"
#include "field.hpp"
#include "maximal.hpp"
#include "quasinorms.hpp"

namespace lplab {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Characterization {
  enum class Kind { LP, DIFF, AXIS, AXIS_SUM, GAGLIARDO, MAX } kind = Kind::LP;
  int axis = 0;
  MaxVariant variant = MaxVariant::S;
  std::string id;
};

inline Characterization parse_characterization(const std::string& id) {
  Characterization c;
  c.id = id;
  using K = Characterization::Kind;
  if (id == "lp") {
    c.kind = K::LP;
  } else if (id == "diff") {
    c.kind = K::DIFF;
  } else if (id == "gagliardo") {
    c.kind = K::GAGLIARDO;
  } else if (id == "axis") {
    c.kind = K::AXIS_SUM;
  } else if (id.rfind("axis:", 0) == 0) {
    c.kind = K::AXIS;
    try {
      c.axis = std::stoi(id.substr(5));
    } catch (...) {
      fail(ErrorKind::InvalidAxis, "bad axis in '" + id + "'");
    }
  } else if (id.rfind("max:", 0) == 0) {
    c.kind = K::MAX;
    std::string v = id.substr(4);
    if (v == "S") c.variant = MaxVariant::S;
    else if (v == "S_SUP") c.variant = MaxVariant::S_SUP;
    else if (v == "V") c.variant = MaxVariant::V;
    else if (v == "V_SUP") c.variant = MaxVariant::V_SUP;
    else if (v == "D" || v == "D_SUP") c.variant = MaxVariant::D_SUP;
    else fail(ErrorKind::ConfigParseError, "unknown maximal variant '" + v + "'");
  } else {
    fail(ErrorKind::ConfigParseError, "unknown characterization '" + id + "'");
  }
  return c;
}

inline bool is_quadrature(const Characterization& c) { return c.kind != Characterization::Kind::LP; }

// Evaluates a characterization of a field that is a 2^m dilate of a reference; the band range,
// radial window and scale range follow the dilation.
inline QuasinormResult evaluate(const SampledField& f, const Characterization& c, const SpaceParams& P,
                                const QuadratureSpec& quad, int m = 0) {
  using K = Characterization::Kind;
  const GridSpec& g = f.grid();
  QuadratureSpec q = quad.resolved(g);
  q.h_min *= std::exp2(-m);
  q.h_max *= std::exp2(-m);
  switch (c.kind) {
    case K::LP: {
      DyadicBandSystem sys = build_band_system(g).shifted(m);
      QuasinormResult r = lp_band_quasinorm(decompose(f, sys, !P.homogeneous), P);
      return r;
    }
    case K::DIFF:
      return difference_quasinorm(f, P, q);
    case K::GAGLIARDO: {
      if (P.scale != Scale::F) fail(ErrorKind::InvalidExponent, "Gagliardo form is F-scale only");
      QuasinormResult r = gagliardo_seminorm(f, P.s, P.p, P.q, q);
      r.params = P;
      return r;
    }
    case K::AXIS:
      return axis_quasinorm(f, P, c.axis, q);
    case K::AXIS_SUM:
      return axis_sum_quasinorm(f, P, q);
    case K::MAX: {
      ScaleRange range = default_scale_range(g);
      range.k_lo += m;
      range.k_hi += m;
      return maximal_quasinorm(f, P, c.variant, q, range);
    }
  }
  return {};
}

// Period-cell normalization turning torus values of 2^m dilates into whole-space surrogates.
inline double cell_factor(int m, int dim, double p) {
  if (std::isinf(p)) return 1.0;
  return std::exp2(-static_cast<double>(m) * dim / p);
}

struct ScalingEntry {
  int m = 0;
  double value = 0.0;
  double normalized = 0.0;
  double ratio = 1.0;
  double measured_exponent = kNaN;
  double raw_exponent = kNaN;
  double error = 0.0;
  bool pass = false;
  Flag flag = Flag::OK;
};

struct ScalingReport {
  std::string quasinorm;
  SpaceParams params;
  std::vector<int> m_values;
  std::vector<ScalingEntry> entries;
  double base_value = 0.0;
  double expected_exponent = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline ScalingReport scaling_experiment(const SampledField& f, const std::string& id, const SpaceParams& P,
                                        const QuadratureSpec& quad, const std::vector<int>& m_list,
                                        double tolerance = -1.0) {
  Characterization c = parse_characterization(id);
  const int n = f.grid().dim;
  ScalingReport rep;
  rep.quasinorm = id;
  rep.params = P;
  rep.m_values = m_list;
  rep.expected_exponent = P.s - (std::isinf(P.p) ? 0.0 : n / P.p);
  rep.tolerance = tolerance >= 0.0 ? tolerance : (is_quadrature(c) ? 0.07 : 0.03);
  QuasinormResult base = evaluate(f, c, P, quad, 0);
  rep.base_value = base.value;
  rep.pass = true;
  for (int m : m_list) {
    ScalingEntry e;
    e.m = m;
    if (m == 0) {
      QuasinormResult again = evaluate(f, c, P, quad, 0);
      e.value = e.normalized = again.value;
      e.ratio = base.value > 0.0 ? again.value / base.value : 1.0;
      e.pass = e.ratio == 1.0;
      e.flag = again.flag;
    } else {
      QuasinormResult r = evaluate(dyadic_dilate(f, m), c, P, quad, m);
      e.value = r.value;
      e.flag = r.flag;
      e.normalized = r.value * cell_factor(m, n, P.p);
      e.ratio = e.normalized / base.value;
      e.measured_exponent = std::log2(e.ratio) / m;
      e.raw_exponent = std::log2(r.value / base.value) / m;
      e.error = std::abs(e.measured_exponent - rep.expected_exponent);
      e.pass = std::isfinite(e.measured_exponent) && e.error <= rep.tolerance;
    }
    rep.pass = rep.pass && e.pass;
    rep.entries.push_back(e);
  }
  return rep;
}

struct EquivalenceEntry {
  TestFunctionSpec spec;
  double a = kNaN, b = kNaN, ratio = kNaN;
  double a2 = kNaN, b2 = kNaN, ratio2 = kNaN;
  double drift = kNaN;
  Flag flag_a = Flag::OK, flag_b = Flag::OK;
  bool excluded = false;
  std::string note;
};

struct EquivalenceThresholds {
  double spread_max = 50.0;
  double drift_max = 0.05;
};

struct EquivalenceReport {
  std::string a_id, b_id;
  SpaceParams params;
  GridSpec grid;
  std::vector<EquivalenceEntry> entries;
  double spread = kNaN;
  double dilation_drift = kNaN;
  std::vector<std::string> theorems;
  Hypothesis hypothesis;
  EquivalenceThresholds thresholds;
  std::string verdict;
};

// Result ids whose hypotheses make a characterization equivalent to the band quasinorm.
inline std::vector<std::string> theorems_for(const Characterization& c, const SpaceParams& P, int n, bool& one_sided) {
  using K = Characterization::Kind;
  bool qinf = std::isinf(P.q);
  bool F = P.scale == Scale::F;
  switch (c.kind) {
    case K::LP:
      return {};
    case K::DIFF:
    case K::GAGLIARDO:
      if (F) return qinf ? std::vector<std::string>{"T2iii", "T2iv"} : std::vector<std::string>{"T2i", "T2ii"};
      if (P.p == 1.0) return {qinf ? "T8iii" : "T8i", "T8v"};
      return qinf ? std::vector<std::string>{"T8iii", "T8iv"} : std::vector<std::string>{"T8i", "T8ii"};
    case K::AXIS:
      if (n > 1) one_sided = true;
      [[fallthrough]];
    case K::AXIS_SUM:
      if (F) return qinf ? std::vector<std::string>{"T6iii", "T6iv"} : std::vector<std::string>{"T6i", "T6ii"};
      return qinf ? std::vector<std::string>{"T7iii", "T7iv"} : std::vector<std::string>{"T7i", "T7ii"};
    case K::MAX:
      return {F ? "T4" : "T5"};
  }
  return {};
}

inline Hypothesis pair_hypothesis(const Characterization& a, const Characterization& b, const SpaceParams& P, int n,
                                  std::vector<std::string>& theorems) {
  Hypothesis h;
  if (a.id == b.id) {
    h.satisfied = true;
    h.window = "identical characterization";
    return h;
  }
  bool one_sided = false;
  theorems = theorems_for(a, P, n, one_sided);
  auto tb = theorems_for(b, P, n, one_sided);
  theorems.insert(theorems.end(), tb.begin(), tb.end());
  h.satisfied = !one_sided;
  for (const auto& id : theorems) {
    SpaceParams Q = P;
    if ((a.kind == Characterization::Kind::GAGLIARDO || b.kind == Characterization::Kind::GAGLIARDO) &&
        (id.rfind("T2", 0) == 0))
      Q.L = 1;
    Hypothesis t = hypothesis_window(id, Q, n);
    h.satisfied = h.satisfied && t.satisfied;
    if (!h.window.empty()) h.window += "; ";
    h.window += id + ": " + t.window;
  }
  if (one_sided) h.window += "; a single axis with n > 1 bounds only one direction";
  return h;
}

inline EquivalenceReport equivalence_experiment(const std::vector<TestFunctionSpec>& corpus, const std::string& a_id,
                                                const std::string& b_id, const SpaceParams& P, const GridSpec& grid,
                                                const QuadratureSpec& quad, EquivalenceThresholds th = {}) {
  if (corpus.empty()) fail(ErrorKind::EmptyDecomposition, "empty corpus");
  P.validate();
  Characterization A = parse_characterization(a_id), Bc = parse_characterization(b_id);
  EquivalenceReport rep;
  rep.a_id = a_id;
  rep.b_id = b_id;
  rep.params = P;
  rep.grid = grid;
  rep.thresholds = th;
  rep.hypothesis = pair_hypothesis(A, Bc, P, grid.dim, rep.theorems);
  double lo = kInf, hi = 0.0, drift = 0.0;
  bool any = false;
  for (const auto& spec : corpus) {
    EquivalenceEntry e;
    e.spec = spec;
    try {
      SampledField f = sample_family(spec, grid);
      QuasinormResult ra = evaluate(f, A, P, quad, 0);
      QuasinormResult rb = A.id == Bc.id ? ra : evaluate(f, Bc, P, quad, 0);
      e.a = ra.value;
      e.b = rb.value;
      e.flag_a = ra.flag;
      e.flag_b = rb.flag;
      e.ratio = e.a / e.b;
      SampledField f2 = dyadic_dilate(f, 1);
      QuasinormResult ra2 = evaluate(f2, A, P, quad, 1);
      QuasinormResult rb2 = A.id == Bc.id ? ra2 : evaluate(f2, Bc, P, quad, 1);
      e.a2 = ra2.value;
      e.b2 = rb2.value;
      e.ratio2 = e.a2 / e.b2;
      e.drift = std::abs(e.ratio2 / e.ratio - 1.0);
      if (ra.flag == Flag::DIVERGENT || rb.flag == Flag::DIVERGENT) {
        e.excluded = true;
        e.note = "DIVERGENT";
      }
    } catch (const Error& err) {
      e.excluded = true;
      e.note = err.what();
    }
    if (!e.excluded && !(std::isfinite(e.ratio) && e.ratio > 0.0 && std::isfinite(e.drift))) {
      e.excluded = true;
      e.note = "non-finite ratio";
    }
    if (!e.excluded) {
      any = true;
      lo = std::min(lo, e.ratio);
      hi = std::max(hi, e.ratio);
      drift = std::max(drift, e.drift);
    }
    rep.entries.push_back(e);
  }
  if (any) {
    rep.spread = hi / lo;
    rep.dilation_drift = drift;
  }
  if (!rep.hypothesis.satisfied)
    rep.verdict = "NO-VERDICT";
  else if (any && rep.spread <= th.spread_max && rep.dilation_drift <= th.drift_max)
    rep.verdict = "PASS";
  else
    rep.verdict = "FAIL";
  return rep;
}

struct PPNReport {
  std::vector<double> t_list;
  std::vector<double> ratios;
  double max_over_min = kNaN;
  bool pass = false;
};

// profile has spectrum in |xi| <= t0; each t / t0 must be a power of two.
inline PPNReport ppn_probe(const SampledField& profile, double t0, const std::vector<int>& alpha, double p, double q,
                           const std::vector<double>& t_list) {
  require_exponent(p);
  require_exponent(q);
  if (q < p) fail(ErrorKind::InvalidExponent, "ppn probe needs p <= q");
  const GridSpec& g = profile.grid();
  if (static_cast<int>(alpha.size()) != g.dim) fail(ErrorKind::ShapeMismatch, "multi-index dimension mismatch");
  int order = 0;
  for (int a : alpha) {
    if (a < 0) fail(ErrorKind::InvalidExponent, "negative multi-index");
    order += a;
  }
  PPNReport rep;
  rep.t_list = t_list;
  for (double t : t_list) {
    double ml = std::log2(t / t0);
    int m = static_cast<int>(std::lround(ml));
    if (std::abs(ml - m) > 1e-12) fail(ErrorKind::AliasingError, "t / t0 must be a power of two");
    SampledField u = dyadic_dilate(profile, m);
    SampledField du = order == 0 ? u : apply_multiplier(
        dft_forward(u),
        [&](std::size_t, const std::array<double, 3>& xi) {
          cplx v = 1.0;
          for (int a = 0; a < g.dim; ++a)
            for (int i = 0; i < alpha[a]; ++i) v *= cplx(0.0, 2.0 * kPi * xi[a]);
          return v;
        },
        u.is_real());
    double nq = lp_norm(du, q) * cell_factor(m, g.dim, q);
    double np = lp_norm(u, p) * cell_factor(m, g.dim, p);
    double expo = order + g.dim * (1.0 / p - (std::isinf(q) ? 0.0 : 1.0 / q));
    rep.ratios.push_back(nq / (std::pow(t, expo) * np));
  }
  double lo = *std::min_element(rep.ratios.begin(), rep.ratios.end());
  double hi = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  rep.max_over_min = hi / lo;
  rep.pass = std::isfinite(rep.max_over_min) && rep.max_over_min <= 1.5;
  return rep;
}

// Spectral window W(xi) = U(theta.xi) V(theta_perp.xi): U is a smooth plateau on [a, b], V on [-c, c].
// With gauss > 0 both factors also carry a gaussian centred on the support, gauss standard
// deviations from centre to edge.
struct KernelWindow {
  double a = 0.01;
  double b = 0.49;
  double c = 0.8;
  double ramp = 0.05;  // transition width as a fraction of the support length
  double sharpness = 1.0;
  double gauss = 6.0;
  int rescale = -1;  // octaves to shrink the window by; -1 picks the least that keeps tau*b < 1
};

struct KernelDecayReport {
  double slope = kNaN;  // worst over tau and theta
  double amplitude_ratio = kNaN;
  std::vector<double> slopes;
  std::vector<double> amplitudes;
  double support_lo = 0.0, support_hi = 0.0;
  int fit_points = 0;
  bool pass = false;
};

namespace detail {

inline double plateau(double u, double lo, double hi, double ramp, double sharp) {
  if (u <= lo || u >= hi) return 0.0;
  DyadicBandSystem s(GridSpec{}, sharp, 0, 0);
  double w = ramp * (hi - lo);
  return (1.0 - s.chi(1.0 + (u - lo) / w)) * s.chi(1.0 + (u - (hi - w)) / w);
}

}  // namespace detail

inline double kernel_window_value(const KernelWindow& w, int shrink, double u, double v) {
  double sc = std::exp2(shrink);
  u *= sc;
  v *= sc;
  double val = detail::plateau(u, w.a, w.b, w.ramp, w.sharpness) * detail::plateau(v, -w.c, w.c, w.ramp, w.sharpness);
  if (w.gauss > 0.0 && val != 0.0) {
    double du = (u - 0.5 * (w.a + w.b)) / (0.5 * (w.b - w.a)) * w.gauss, dv = v / w.c * w.gauss;
    val *= std::exp(-0.5 * (du * du + dv * dv));
  }
  return val;
}

inline KernelDecayReport kernel_decay_probe(const KernelWindow& w, int L, int N, const GridSpec& grid,
                                            const std::vector<double>& taus, int directions) {
  if (L < 1) fail(ErrorKind::InvalidExponent, "L must be at least 1");
  if (N < 1) fail(ErrorKind::InvalidExponent, "N must be at least 1");
  if (grid.dim != 2) fail(ErrorKind::DimensionTooLow, "kernel probe runs on a 2-D grid");
  if (!(w.a > 0.0) || !(w.b > w.a)) fail(ErrorKind::GeometryViolated, "window needs 0 < a < b");
  double taumax = *std::max_element(taus.begin(), taus.end());
  int shrink = w.rescale;
  if (shrink < 0) {
    shrink = 0;
    while (taumax * w.b * std::exp2(-shrink) >= 1.0) ++shrink;
  }
  KernelDecayReport rep;
  rep.support_lo = w.a * std::exp2(-shrink);
  rep.support_hi = w.b * std::exp2(-shrink);
  for (double tau : taus)
    if (tau * rep.support_hi >= 1.0 || tau * rep.support_lo <= 0.0)
      fail(ErrorKind::GeometryViolated, "difference symbol vanishes on the window support");
  if (rep.support_hi * std::sqrt(1.0 + std::pow(w.c / w.b, 2)) >= grid.nyquist())
    fail(ErrorKind::GeometryViolated, "window support exceeds the lattice");

  const double rmax = grid.B / 4.0;
  const int bins = 24;
  std::vector<double> edges(bins + 1);
  for (int i = 0; i <= bins; ++i) edges[i] = std::exp2(std::log2(rmax) * i / bins);

  double slope_worst = -kInf;
  double amp_lo = kInf, amp_hi = 0.0;
  int fit_min = bins;
  for (int d = 0; d < directions; ++d) {
    double th = kPi * d / directions;
    double ct = std::cos(th), st = std::sin(th);
    for (double tau : taus) {
      std::vector<cplx> coef(grid.total(), cplx(0.0, 0.0));
      bool violated = false;
      for_each_mode(grid, [&](std::size_t idx, const std::array<double, 3>& xi) {
        double u = ct * xi[0] + st * xi[1], v = -st * xi[0] + ct * xi[1];
        double wv = kernel_window_value(w, shrink, u, v);
        if (wv == 0.0) return;
        if (std::abs(u) < rep.support_lo || std::abs(u) > rep.support_hi) violated = true;
        cplx den = std::polar(1.0, 2.0 * kPi * tau * u) - 1.0;
        cplx dl = 1.0;
        for (int i = 0; i < L; ++i) dl *= den;
        coef[idx] = wv / dl / grid.volume();
      });
      if (violated) fail(ErrorKind::GeometryViolated, "window leaves a <= |theta.xi| <= b");
      // Fourier series coefficients times the lattice cell give the continuous inverse transform.
      SampledField K = dft_inverse_raw(std::move(coef), grid, false);
      std::vector<double> env(bins, 0.0);
      double peak = 0.0;
      for (std::size_t idx = 0; idx < K.size(); ++idx) {
        auto ix = unravel(grid, idx);
        double x0 = signed_index(ix[0], grid.N) * grid.spacing(), x1 = signed_index(ix[1], grid.N) * grid.spacing();
        double r = std::hypot(x0, x1), val = std::abs(K[idx]);
        peak = std::max(peak, val);
        if (r < 1.0 || r >= rmax) continue;
        int bi = static_cast<int>(std::floor(std::log2(r) / std::log2(rmax) * bins));
        bi = std::clamp(bi, 0, bins - 1);
        env[bi] = std::max(env[bi], val);
      }
      std::vector<double> X, Y;
      double floor_level = 1e-12 * peak;
      for (int i = 0; i < bins; ++i) {
        if (!(env[i] > floor_level)) continue;
        double rc = std::sqrt(edges[i] * edges[i + 1]);
        X.push_back(std::log(1.0 + rc));
        Y.push_back(std::log(env[i]));
      }
      fit_min = std::min<int>(fit_min, static_cast<int>(X.size()));
      if (X.size() < 3) {
        rep.slopes.push_back(kNaN);
        rep.amplitudes.push_back(kNaN);
        slope_worst = kNaN;
        continue;
      }
      auto [slope, icpt] = fit_line(X, Y);
      rep.slopes.push_back(slope);
      rep.amplitudes.push_back(std::exp(icpt));
      if (!std::isnan(slope_worst)) slope_worst = std::max(slope_worst, slope);
      amp_lo = std::min(amp_lo, std::exp(icpt));
      amp_hi = std::max(amp_hi, std::exp(icpt));
    }
  }
  rep.slope = slope_worst;
  rep.amplitude_ratio = amp_hi / amp_lo;
  rep.fit_points = fit_min;
  rep.pass = std::isfinite(rep.slope) && rep.slope <= -(N - 0.5) && rep.amplitude_ratio <= 2.0;
  return rep;
}

struct DivergenceReport {
  std::vector<double> h_mins;
  std::vector<double> values;
  std::vector<double> growth;
  std::string verdict;
  bool pass = false;
};

inline DivergenceReport divergence_probe(const SampledField& f, const SpaceParams& P, const QuadratureSpec& quad,
                                         int levels) {
  P.validate();
  if (levels < 1) fail(ErrorKind::QuadratureTooCoarse, "need at least one refinement level");
  const GridSpec& g = f.grid();
  QuadratureSpec q = quad.resolved(g);
  double fine = q.h_min * std::exp2(-levels);
  detail::RadialLayout l = detail::layout(fine, q.h_max, q.radial_nodes_per_octave);
  auto dirs = sphere_rule(g.dim, q.sphere_nodes);
  auto nodes = detail::polar_nodes(g.dim, l.radial, dirs);
  auto ss = detail::shell_sums(f, P, nodes, l.shells, detail::DiffKind::Difference);
  DivergenceReport rep;
  for (int i = 0; i <= levels; ++i) {
    auto a = detail::aggregate_shells(ss, P, static_cast<std::size_t>(levels - i), g.cell_volume());
    rep.h_mins.push_back(q.h_min * std::exp2(-i));
    rep.values.push_back(a.value);
  }
  bool zero = std::all_of(rep.values.begin(), rep.values.end(), [](double v) { return v == 0.0; });
  if (zero) {
    rep.verdict = "CONVERGENT-ZERO";
    rep.pass = true;
    return rep;
  }
  for (int i = 0; i < levels; ++i) rep.growth.push_back(rep.values[i + 1] / rep.values[i]);
  double gmin = *std::min_element(rep.growth.begin(), rep.growth.end());
  if (P.s > P.L) {
    rep.pass = gmin >= 1.5;
    rep.verdict = rep.pass ? "DIVERGENT-GEOMETRIC" : "FAIL";
  } else if (P.s == P.L) {
    rep.pass = gmin >= 1.05;
    rep.verdict = rep.pass ? "DIVERGENT-LOG" : "FAIL";
  } else {
    rep.pass = rep.growth.back() < 1.05;
    rep.verdict = rep.pass ? "CONVERGENT" : "FAIL";
  }
  return rep;
}

struct SliceReport {
  double max_violation = 0.0;
  bool pass = false;
};

// Out-of-support energy of 1-D slices of a band field, relative to the band's total energy.
inline SliceReport slice_violation(const SampledField& fj, int j, int axis) {
  const GridSpec& g = fj.grid();
  if (g.dim < 2) fail(ErrorKind::DimensionTooLow, "slice check needs dim >= 2");
  if (axis < 1 || axis > g.dim) fail(ErrorKind::InvalidAxis, "axis not in [1, dim]");
  const std::size_t n = static_cast<std::size_t>(g.N);
  std::size_t stride = 1;
  for (int a = axis; a < g.dim; ++a) stride *= n;
  const double limit = std::exp2(j + 1);
  Accumulator total;
  for (const auto& v : fj.samples()) total.add(std::norm(v));
  SliceReport rep;
  double tot = total.value();
  if (!(tot > 0.0)) {
    rep.pass = true;
    return rep;
  }
  std::vector<fft::cplx> line(n);
  const auto& plan = fft::plan_for(n);
  for (std::size_t base = 0; base < fj.size(); base += stride * n) {
    for (std::size_t off = 0; off < stride; ++off) {
      for (std::size_t i = 0; i < n; ++i) line[i] = fj[base + off + i * stride];
      plan.run(line.data(), -1);
      Accumulator out;
      for (std::size_t i = 0; i < n; ++i) {
        double u = std::abs(static_cast<double>(signed_index(static_cast<std::int64_t>(i), g.N))) / g.B;
        if (u > limit) out.add(std::norm(line[i]) / static_cast<double>(n));
      }
      rep.max_violation = std::max(rep.max_violation, out.value() / tot);
    }
  }
  rep.pass = rep.max_violation <= 1e-12;
  return rep;
}

inline SliceReport slice_support_check(const SampledField& f, const DyadicBandSystem& sys, int j, int axis) {
  if (f.grid().dim < 2) fail(ErrorKind::DimensionTooLow, "slice check needs dim >= 2");
  return slice_violation(band_project(f, sys, j), j, axis);
}

// max over the grid of P_t u / M(|u|^r)^(1/r).
inline double peetre_hl_ratio(const SampledField& u, double t, double r) {
  SampledField P = peetre_max(u, t, r);
  std::vector<double> ur = u.magnitudes();
  for (double& v : ur) v = std::pow(v, r);
  SampledField M = hardy_littlewood_max(make_field(ur, u.grid()));
  double best = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    double den = std::pow(M[i].real(), 1.0 / r);
    if (den > 0.0) best = std::max(best, P[i].real() / den);
  }
  return best;
}

// max over the grid of P_t(phi_{1/t} * u) / P_t u.
inline double mollifier_ratio(const SampledField& u, double t, double r) {
  DyadicBandSystem chi(u.grid(), 1.0, 0, 0);
  SampledField m = apply_multiplier(
      dft_forward(u),
      [&](std::size_t, const std::array<double, 3>& xi) { return cplx(chi.chi(2.0 * norm3(xi, u.grid().dim) / t), 0.0); },
      u.is_real());
  SampledField a = peetre_max(m, t, r), b = peetre_max(u, t, r);
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (b[i].real() > 0.0) best = std::max(best, a[i].real() / b[i].real());
  return best;
}

// F-quasinorm with every band replaced by its Peetre maximal function at t = 2^(l+1), over the original.
inline double peetre_band_factor(const BandDecomposition& d, const SpaceParams& P) {
  BandDecomposition pd;
  for (const auto& b : d.bands) pd.bands.push_back({b.j, peetre_max(b.field, std::exp2(b.j + 1), P.r)});
  SpaceParams Q = P;
  Q.scale = Scale::F;
  Q.homogeneous = true;
  return lp_band_quasinorm(pd, Q).value / lp_band_quasinorm(d, Q).value;
}

}  // namespace lplab
