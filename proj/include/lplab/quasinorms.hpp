#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bands.hpp"
#include "differences.hpp"
#include "error.hpp"
#include "field.hpp"
#include "maximal.hpp"
#include "quadrature.hpp"

namespace lplab {

enum class Scale { F, B };

inline const char* scale_name(Scale s) { return s == Scale::F ? "F" : "B"; }

struct SpaceParams {
  double s = 0.5;
  double p = 2.0;
  double q = 2.0;
  int L = 1;
  double r = 1.0;
  Scale scale = Scale::F;
  bool homogeneous = true;

  void validate() const {
    require_exponent(p);
    require_exponent(q);
    if (!std::isfinite(s)) fail(ErrorKind::InvalidExponent, "s must be finite");
    if (L < 1) fail(ErrorKind::InvalidExponent, "L must be at least 1");
    if (!(r > 0.0)) fail(ErrorKind::InvalidExponent, "r must be positive");
    if (scale == Scale::F && homogeneous && std::isinf(p)) fail(ErrorKind::InvalidExponent, "F-scale needs p < inf");
  }
};

struct Thresholds {
  double sigma_pq;
  double sigma_tilde_pq;
  double sigma_tilde1_pq;
  double sigma_p;
};

inline Thresholds thresholds(double p, double q, int n) {
  require_exponent(p);
  require_exponent(q);
  double ip = 1.0 / p, iq = 1.0 / q, imin = 1.0 / std::min(p, q);
  return {std::max(0.0, n * (imin - 1.0)), std::max(0.0, n * (ip - iq)), std::max(0.0, ip - iq),
          std::max(0.0, n * (ip - 1.0))};
}

struct Hypothesis {
  bool satisfied = false;
  std::string window;
};

namespace detail {

inline std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string open_interval(double lo, double hi) { return num(lo) + " < s < " + num(hi); }

}  // namespace detail

inline Hypothesis hypothesis_window(const std::string& id, const SpaceParams& P, int n) {
  using detail::num;
  using detail::open_interval;
  const Thresholds T = thresholds(P.p, P.q, n);
  const double s = P.s, p = P.p, q = P.q, L = P.L, r = P.r;
  const bool pfin = std::isfinite(p), qfin = std::isfinite(q);
  const double mpq = std::min(p, q);
  auto in = [&](double lo, double hi) { return lo < s && s < hi; };
  Hypothesis h;
  if (id == "T2i") {
    h.satisfied = pfin && qfin && in(T.sigma_tilde_pq, L);
    h.window = open_interval(T.sigma_tilde_pq, L) + " (p, q < inf)";
  } else if (id == "T2ii") {
    if (q < 1.0) {
      h.satisfied = pfin && in(T.sigma_pq + T.sigma_tilde_pq, kInf);
      h.window = open_interval(T.sigma_pq + T.sigma_tilde_pq, kInf) + " (p < inf, q < 1)";
    } else {
      h.satisfied = pfin && qfin && in(-n, kInf);
      h.window = open_interval(-n, kInf) + " (p < inf, 1 <= q < inf)";
    }
  } else if (id == "T2iii") {
    h.satisfied = pfin && !qfin && in(n / p, L);
    h.window = open_interval(n / p, L) + " (p < inf, q = inf)";
  } else if (id == "T2iv") {
    h.satisfied = pfin && !qfin && in(-n, kInf);
    h.window = open_interval(-n, kInf) + " (p < inf, q = inf)";
  } else if (id == "T4") {
    bool rwin = n / s < r && r < mpq;
    h.satisfied = n >= 2 && pfin && in(n / mpq, L) && s > 0 && rwin;
    h.window = open_interval(n / mpq, L) + " and " + num(s > 0 ? n / s : kInf) + " < r < " + num(mpq) +
               " (n >= 2, p < inf)";
  } else if (id == "T5") {
    bool rwin = n / s < r && r < p;
    h.satisfied = n >= 2 && in(n / p, L) && s > 0 && rwin;
    h.window = open_interval(n / p, L) + " and " + num(s > 0 ? n / s : kInf) + " < r < " + num(p) + " (n >= 2)";
  } else if (id == "T6i") {
    h.satisfied = pfin && qfin && in(T.sigma_tilde1_pq, L);
    h.window = open_interval(T.sigma_tilde1_pq, L) + " (p, q < inf)";
  } else if (id == "T6ii") {
    if (mpq > 1.0) {
      h.satisfied = pfin && qfin;
      h.window = "any s (p, q < inf, min(p,q) > 1)";
    } else {
      double lo = T.sigma_pq + T.sigma_tilde1_pq;
      h.satisfied = pfin && qfin && in(lo, kInf);
      h.window = open_interval(lo, kInf) + " (p, q < inf, min(p,q) <= 1)";
    }
  } else if (id == "T6iii") {
    h.satisfied = pfin && !qfin && in(1.0 / p, L);
    h.window = open_interval(1.0 / p, L) + " (p < inf, q = inf)";
  } else if (id == "T6iv") {
    if (p > 1.0) {
      h.satisfied = pfin && !qfin;
      h.window = "any s (1 < p < inf, q = inf)";
    } else {
      h.satisfied = !qfin && in(T.sigma_p + 1.0 / p, kInf);
      h.window = open_interval(T.sigma_p + 1.0 / p, kInf) + " (p <= 1, q = inf)";
    }
  } else if (id == "T7i" || id == "T8i") {
    h.satisfied = qfin && in(0.0, L);
    h.window = open_interval(0.0, L) + " (q < inf)";
  } else if (id == "T7ii") {
    if (p > 1.0 && q >= 1.0) {
      h.satisfied = qfin;
      h.window = "any s (p > 1, 1 <= q < inf)";
    } else if (p > 1.0) {
      h.satisfied = in(0.0, L);
      h.window = open_interval(0.0, L) + " (p > 1, q < 1)";
    } else {
      h.satisfied = qfin && in(T.sigma_p, L);
      h.window = open_interval(T.sigma_p, L) + " (p <= 1, q < inf)";
    }
  } else if (id == "T7iii" || id == "T8iii") {
    h.satisfied = !qfin && in(0.0, L);
    h.window = open_interval(0.0, L) + " (q = inf)";
  } else if (id == "T7iv") {
    if (p > 1.0) {
      h.satisfied = !qfin;
      h.window = "any s (p > 1, q = inf)";
    } else {
      h.satisfied = !qfin && in(T.sigma_p, kInf);
      h.window = open_interval(T.sigma_p, kInf) + " (p <= 1, q = inf)";
    }
  } else if (id == "T8ii" || id == "T8iv") {
    bool want_q_inf = id == "T8iv";
    bool qok = want_q_inf ? !qfin : qfin;
    const char* qtxt = want_q_inf ? "q = inf" : "q < inf";
    if (p > 1.0) {
      h.satisfied = qok;
      h.window = std::string("any s (p > 1, ") + qtxt + ")";
    } else if (p < 1.0) {
      h.satisfied = qok && in(T.sigma_p, kInf);
      h.window = open_interval(T.sigma_p, kInf) + " (p < 1, " + qtxt + ")";
    } else {
      h.satisfied = false;
      h.window = std::string("p = 1 is covered by T8v (") + qtxt + ")";
    }
  } else if (id == "T8v") {
    if (p != 1.0) {
      h.satisfied = false;
      h.window = "requires p = 1";
    } else if (!qfin || q >= 1.0) {
      h.satisfied = in(-n, kInf);
      h.window = open_interval(-n, kInf) + " (p = 1, q >= 1)";
    } else {
      h.satisfied = in(0.0, kInf);
      h.window = open_interval(0.0, kInf) + " (p = 1, q < 1)";
    }
  } else {
    fail(ErrorKind::UnknownTheoremId, "unknown theorem id '" + id + "'");
  }
  return h;
}

enum class Flag { OK, DIVERGENT, TRUNCATION_WARN };

inline const char* flag_name(Flag f) {
  switch (f) {
    case Flag::OK: return "OK";
    case Flag::DIVERGENT: return "DIVERGENT";
    case Flag::TRUNCATION_WARN: return "TRUNCATION-WARN";
  }
  return "OK";
}

struct ScaleContribution {
  double scale;
  double contribution;
};

// Tails are relative increases of the value; NaN when not applicable, inf when not summable.
struct TruncationReport {
  double low_tail = std::numeric_limits<double>::quiet_NaN();
  double high_tail = std::numeric_limits<double>::quiet_NaN();
  double large_h_bound = std::numeric_limits<double>::quiet_NaN();
  double truncated_energy = std::numeric_limits<double>::quiet_NaN();
};

struct QuasinormResult {
  std::string characterization;
  double value = 0.0;
  std::vector<ScaleContribution> per_scale;
  std::string scale_kind = "k";
  double per_scale_exponent = 2.0;
  double lowpass_norm = 0.0;
  TruncationReport truncation;
  Flag flag = Flag::OK;
  SpaceParams params;
  std::size_t nodes = 0;
};

inline double aggregate(const std::vector<ScaleContribution>& c, double e) {
  if (std::isinf(e)) {
    double m = 0.0;
    for (const auto& x : c) m = std::max(m, x.contribution);
    return m;
  }
  Accumulator acc;
  for (const auto& x : c)
    if (x.contribution > 0.0) acc.add(std::pow(x.contribution, e));
  return std::pow(acc.value(), 1.0 / e);
}

namespace detail {

struct Aggregate {
  double value = 0.0;
  std::vector<double> contrib;
  double exponent = 2.0;
};

// parts[k][x] holds the q-th power of the weighted quantity (q finite) or the quantity itself (q infinite).
inline Aggregate aggregate_F(const std::vector<std::vector<double>>& parts, std::size_t first, double p, double q,
                             double dv) {
  Aggregate out;
  std::size_t K = parts.size(), X = parts.empty() ? 0 : parts[0].size();
  out.contrib.assign(K, 0.0);
  bool qinf = std::isinf(q), pinf = std::isinf(p);
  std::vector<double> G(X, 0.0);
  std::vector<std::size_t> arg(X, first);
  for (std::size_t x = 0; x < X; ++x) {
    if (qinf) {
      double m = 0.0;
      for (std::size_t k = first; k < K; ++k)
        if (parts[k][x] > m) {
          m = parts[k][x];
          arg[x] = k;
        }
      G[x] = m;
    } else {
      Accumulator a;
      for (std::size_t k = first; k < K; ++k) a.add(parts[k][x]);
      G[x] = a.value();
    }
  }
  std::vector<double> inner(X);
  for (std::size_t x = 0; x < X; ++x) inner[x] = qinf ? G[x] : std::pow(G[x], 1.0 / q);
  out.value = lp_norm_abs(inner, p, dv);
  if (qinf) {
    out.exponent = p;
    if (pinf) {
      for (std::size_t x = 0; x < X; ++x) out.contrib[arg[x]] = std::max(out.contrib[arg[x]], G[x]);
    } else {
      std::vector<Accumulator> acc(K);
      for (std::size_t x = 0; x < X; ++x)
        if (G[x] > 0.0) acc[arg[x]].add(std::pow(G[x], p));
      for (std::size_t k = first; k < K; ++k) out.contrib[k] = std::pow(acc[k].value() * dv, 1.0 / p);
    }
    return out;
  }
  out.exponent = q;
  if (pinf) {
    std::size_t xs = 0;
    for (std::size_t x = 1; x < X; ++x)
      if (G[x] > G[xs]) xs = x;
    for (std::size_t k = first; k < K; ++k) out.contrib[k] = X ? std::pow(parts[k][xs], 1.0 / q) : 0.0;
    return out;
  }
  Accumulator Z;
  std::vector<Accumulator> num(K);
  for (std::size_t x = 0; x < X; ++x) {
    if (!(G[x] > 0.0)) continue;
    double gp = std::pow(G[x], p / q);
    Z.add(gp);
    double w = gp / G[x];
    for (std::size_t k = first; k < K; ++k) num[k].add(parts[k][x] * w);
  }
  double vq = std::pow(out.value, q);
  for (std::size_t k = first; k < K; ++k)
    out.contrib[k] = Z.value() > 0.0 ? std::pow(std::max(0.0, vq * num[k].value() / Z.value()), 1.0 / q) : 0.0;
  return out;
}

inline Aggregate aggregate_B(const std::vector<double>& parts, std::size_t first, double q) {
  Aggregate out;
  out.exponent = q;
  out.contrib.assign(parts.size(), 0.0);
  if (std::isinf(q)) {
    for (std::size_t k = first; k < parts.size(); ++k) {
      out.contrib[k] = parts[k];
      out.value = std::max(out.value, parts[k]);
    }
    return out;
  }
  Accumulator a;
  for (std::size_t k = first; k < parts.size(); ++k) {
    a.add(parts[k]);
    out.contrib[k] = std::pow(parts[k], 1.0 / q);
  }
  out.value = std::pow(a.value(), 1.0 / q);
  return out;
}

// Relative value increase from extrapolating the geometric trend of the two end shells.
inline double tail_estimate(double edge, double next, double value, double e) {
  if (!(value > 0.0)) return 0.0;
  if (!(edge > 0.0)) return 0.0;
  if (!(next > 0.0)) return kInf;
  if (std::isinf(e)) {
    double extrap = edge * edge / next;
    return std::max(0.0, extrap / value - 1.0);
  }
  double ratio = std::pow(edge / next, e);
  if (ratio >= 1.0) return kInf;
  double mass = std::pow(edge, e) * ratio / (1.0 - ratio);
  return std::pow(1.0 + mass / std::pow(value, e), 1.0 / e) - 1.0;
}

struct HNode {
  std::vector<double> h;
  double rho;
  double weight;
  int shell;
};

inline std::vector<HNode> polar_nodes(int dim, const std::vector<RadialNode>& radial, const std::vector<Direction>& dirs) {
  std::vector<HNode> out;
  for (const auto& r : radial)
    for (const auto& d : dirs) {
      std::vector<double> h(dim);
      for (int a = 0; a < dim; ++a) h[a] = r.rho * d.z[a];
      out.push_back({h, r.rho, r.weight * d.weight, r.shell});
    }
  return out;
}

enum class DiffKind { Difference, Gagliardo };

struct ShellSums {
  std::vector<std::vector<double>> pointwise;
  std::vector<double> totals;
};

inline ShellSums shell_sums(const SampledField& f, const SpaceParams& P, const std::vector<HNode>& nodes, int shells,
                            DiffKind kind) {
  const GridSpec& g = f.grid();
  const std::size_t X = g.total();
  const bool qinf = std::isinf(P.q);
  const double dv = g.cell_volume();
  SpectralField s = dft_forward(f);
  ShellSums out;
  std::vector<std::vector<Accumulator>> acc;
  std::vector<Accumulator> accB(shells);
  if (P.scale == Scale::F) {
    out.pointwise.assign(shells, std::vector<double>(X, 0.0));
    if (!qinf) acc.assign(shells, std::vector<Accumulator>(X));
  } else {
    out.totals.assign(shells, 0.0);
  }
  for (const auto& node : nodes) {
    std::vector<double> m;
    if (kind == DiffKind::Difference) {
      m = iterated_difference(s, DifferenceSpec{P.L, node.h, DiffMethod::Spectral}).magnitudes();
    } else {
      std::vector<double> back(node.h.size());
      for (std::size_t a = 0; a < back.size(); ++a) back[a] = -node.h[a];
      SampledField shifted = translate(f, back);
      m.resize(X);
      for (std::size_t x = 0; x < X; ++x) m[x] = std::abs(f[x] - shifted[x]);
    }
    double scale = std::pow(node.rho, -P.s);
    if (P.scale == Scale::F) {
      auto& row = out.pointwise[node.shell];
      if (qinf) {
        for (std::size_t x = 0; x < X; ++x) row[x] = std::max(row[x], scale * m[x]);
      } else {
        double w = node.weight * std::pow(scale, P.q);
        auto& arow = acc[node.shell];
        for (std::size_t x = 0; x < X; ++x)
          if (m[x] > 0.0) arow[x].add(w * std::pow(m[x], P.q));
      }
    } else {
      double nrm = lp_norm_abs(m, P.p, dv);
      if (qinf)
        out.totals[node.shell] = std::max(out.totals[node.shell], scale * nrm);
      else
        accB[node.shell].add(node.weight * std::pow(scale * nrm, P.q));
    }
  }
  if (P.scale == Scale::F && !qinf)
    for (int k = 0; k < shells; ++k)
      for (std::size_t x = 0; x < X; ++x) out.pointwise[k][x] = acc[k][x].value();
  if (P.scale == Scale::B && !qinf)
    for (int k = 0; k < shells; ++k) out.totals[k] = accB[k].value();
  return out;
}

inline Aggregate aggregate_shells(const ShellSums& ss, const SpaceParams& P, std::size_t first, double dv) {
  if (P.scale == Scale::F) return aggregate_F(ss.pointwise, first, P.p, P.q, dv);
  return aggregate_B(ss.totals, first, P.q);
}

// Assembles a quadrature result; shell 0 is the smallest radius.
inline QuasinormResult finish_radial(const std::string& id, const SampledField& f, const SpaceParams& P,
                                     const ShellSums& ss, const std::vector<double>& shell_radius,
                                     const std::vector<int>& shell_nodes, int per_octave, std::size_t node_count,
                                     double dir_measure) {
  const GridSpec& g = f.grid();
  Aggregate full = aggregate_shells(ss, P, 0, g.cell_volume());
  QuasinormResult r;
  r.characterization = id;
  r.value = full.value;
  r.params = P;
  r.scale_kind = "radius";
  r.per_scale_exponent = full.exponent;
  r.nodes = node_count;
  for (std::size_t k = 0; k < full.contrib.size(); ++k) r.per_scale.push_back({shell_radius[k], full.contrib[k]});
  std::vector<std::size_t> complete;
  for (std::size_t k = 0; k < shell_nodes.size(); ++k)
    if (shell_nodes[k] == per_octave) complete.push_back(k);
  if (complete.size() >= 2) {
    std::size_t a = complete.front(), b = complete[1];
    std::size_t z = complete.back(), y = complete[complete.size() - 2];
    r.truncation.low_tail = tail_estimate(full.contrib[a], full.contrib[b], r.value, full.exponent);
    r.truncation.high_tail = tail_estimate(full.contrib[z], full.contrib[y], r.value, full.exponent);
  }
  if (std::isfinite(P.q) && P.s > 0.0) {
    double hmax = shell_radius.back() * 2.0;
    double inner = std::exp2(P.L) * f.max_abs() * std::pow(dir_measure * std::pow(hmax, -P.s * P.q) / (P.s * P.q), 1.0 / P.q);
    double vol = std::isinf(P.p) ? 1.0 : std::pow(g.volume(), 1.0 / P.p);
    r.truncation.large_h_bound = inner * vol;
  }
  std::size_t octaves = complete.size();
  if (octaves >= 3 && r.value > 0.0) {
    Aggregate coarse = aggregate_shells(ss, P, 2, g.cell_volume());
    if (coarse.value > 0.0 && r.value / coarse.value > 2.0) r.flag = Flag::DIVERGENT;
  }
  if (r.flag == Flag::OK && (r.truncation.low_tail > 0.05 || r.truncation.high_tail > 0.05))
    r.flag = Flag::TRUNCATION_WARN;
  return r;
}

struct RadialLayout {
  std::vector<RadialNode> radial;
  std::vector<double> shell_radius;
  std::vector<int> shell_nodes;
  int shells = 0;
};

inline RadialLayout layout(double h_min, double h_max, int per_octave) {
  RadialLayout l;
  l.radial = radial_rule(h_min, h_max, per_octave);
  l.shells = l.radial.back().shell + 1;
  l.shell_nodes.assign(l.shells, 0);
  for (const auto& n : l.radial) ++l.shell_nodes[n.shell];
  for (int k = 0; k < l.shells; ++k) l.shell_radius.push_back(h_min * std::exp2(k));
  return l;
}

// Windows below the grid spacing are allowed here; spectral differences stay exact.
inline void check_window(const GridSpec& g, const QuadratureSpec& q) {
  if (!(q.h_min > 0.0) || !(q.h_min < q.h_max) || q.h_max > g.B / 2.0 * (1.0 + 1e-12))
    fail(ErrorKind::QuadratureTooCoarse, "radial window must satisfy 0 < h_min < h_max <= B/2");
  QuadratureSpec::check_counts(q);
}

inline QuasinormResult difference_quasinorm(const SampledField& f, const SpaceParams& P, const QuadratureSpec& quad,
                                            Scale scale, DiffKind kind, const std::string& id) {
  SpaceParams Q = P;
  Q.scale = scale;
  Q.validate();
  const GridSpec& g = f.grid();
  QuadratureSpec q = quad.resolved(g);
  check_window(g, q);
  RadialLayout l = layout(q.h_min, q.h_max, q.radial_nodes_per_octave);
  auto dirs = sphere_rule(g.dim, q.sphere_nodes);
  auto nodes = polar_nodes(g.dim, l.radial, dirs);
  ShellSums ss = shell_sums(f, Q, nodes, l.shells, kind);
  return finish_radial(id, f, Q, ss, l.shell_radius, l.shell_nodes, q.radial_nodes_per_octave, nodes.size(),
                       sphere_area(g.dim));
}

}  // namespace detail

inline QuasinormResult lp_band_quasinorm(const BandDecomposition& d, const SpaceParams& P) {
  P.validate();
  if (d.bands.empty()) fail(ErrorKind::EmptyDecomposition, "decomposition has no bands");
  const GridSpec& g = d.bands.front().field.grid();
  const bool qinf = std::isinf(P.q);
  std::vector<std::vector<double>> parts;
  std::vector<double> totals;
  for (const auto& b : d.bands) {
    if (b.field.grid() != g) fail(ErrorKind::GridMismatch, "bands live on different grids");
    double w = std::exp2(b.j * P.s);
    std::vector<double> m = b.field.magnitudes();
    if (P.scale == Scale::F) {
      for (double& v : m) v = qinf ? w * v : std::pow(w * v, P.q);
      parts.push_back(std::move(m));
    } else {
      double nrm = w * lp_norm_abs(m, P.p, g.cell_volume());
      totals.push_back(qinf ? nrm : std::pow(nrm, P.q));
    }
  }
  detail::Aggregate a = P.scale == Scale::F ? detail::aggregate_F(parts, 0, P.p, P.q, g.cell_volume())
                                            : detail::aggregate_B(totals, 0, P.q);
  QuasinormResult r;
  r.characterization = "lp";
  r.params = P;
  r.per_scale_exponent = a.exponent;
  for (std::size_t k = 0; k < d.bands.size(); ++k) r.per_scale.push_back({static_cast<double>(d.bands[k].j), a.contrib[k]});
  r.value = a.value;
  if (d.lowpass) {
    r.lowpass_norm = lp_norm(*d.lowpass, P.p);
    r.value += r.lowpass_norm;
  }
  r.truncation.truncated_energy = d.truncated_energy;
  r.nodes = d.bands.size();
  return r;
}

inline QuasinormResult difference_quasinorm_F(const SampledField& f, const SpaceParams& P, const QuadratureSpec& quad) {
  return detail::difference_quasinorm(f, P, quad, Scale::F, detail::DiffKind::Difference, "diff");
}

inline QuasinormResult difference_quasinorm_B(const SampledField& f, const SpaceParams& P, const QuadratureSpec& quad) {
  return detail::difference_quasinorm(f, P, quad, Scale::B, detail::DiffKind::Difference, "diff");
}

inline QuasinormResult difference_quasinorm(const SampledField& f, const SpaceParams& P, const QuadratureSpec& quad) {
  return P.scale == Scale::F ? difference_quasinorm_F(f, P, quad) : difference_quasinorm_B(f, P, quad);
}

inline QuasinormResult gagliardo_seminorm(const SampledField& f, double s, double p, double q, const QuadratureSpec& quad) {
  if (std::isinf(p) || std::isinf(q)) fail(ErrorKind::InvalidExponent, "Gagliardo form needs p, q < inf");
  SpaceParams P;
  P.s = s;
  P.p = p;
  P.q = q;
  P.L = 1;
  return detail::difference_quasinorm(f, P, quad, Scale::F, detail::DiffKind::Gagliardo, "gagliardo");
}

inline QuasinormResult axis_quasinorm(const SampledField& f, const SpaceParams& P, int axis, const QuadratureSpec& quad) {
  P.validate();
  const GridSpec& g = f.grid();
  if (axis < 1 || axis > g.dim) fail(ErrorKind::InvalidAxis, "axis " + std::to_string(axis) + " not in [1, dim]");
  QuadratureSpec q = quad.resolved(g);
  detail::check_window(g, q);
  detail::RadialLayout l = detail::layout(q.h_min, q.h_max, q.t_nodes_per_octave);
  Direction e{{0.0, 0.0, 0.0}, 1.0};
  e.z[axis - 1] = 1.0;
  auto nodes = detail::polar_nodes(g.dim, l.radial, {e});
  auto ss = detail::shell_sums(f, P, nodes, l.shells, detail::DiffKind::Difference);
  return detail::finish_radial("axis:" + std::to_string(axis), f, P, ss, l.shell_radius, l.shell_nodes,
                               q.t_nodes_per_octave, nodes.size(), 1.0);
}

// Sum over all coordinate axes.
inline QuasinormResult axis_sum_quasinorm(const SampledField& f, const SpaceParams& P, const QuadratureSpec& quad) {
  QuasinormResult total;
  for (int a = 1; a <= f.grid().dim; ++a) {
    QuasinormResult r = axis_quasinorm(f, P, a, quad);
    if (a == 1) {
      total = r;
      continue;
    }
    total.value += r.value;
    total.nodes += r.nodes;
    total.per_scale.insert(total.per_scale.end(), r.per_scale.begin(), r.per_scale.end());
    if (r.flag == Flag::DIVERGENT || (r.flag == Flag::TRUNCATION_WARN && total.flag == Flag::OK)) total.flag = r.flag;
  }
  total.characterization = "axis";
  if (f.grid().dim > 1) total.per_scale_exponent = std::numeric_limits<double>::quiet_NaN();
  return total;
}

enum class MaxVariant { S, S_SUP, V, V_SUP, D_SUP };

inline const char* max_variant_name(MaxVariant v) {
  switch (v) {
    case MaxVariant::S: return "S";
    case MaxVariant::S_SUP: return "S_SUP";
    case MaxVariant::V: return "V";
    case MaxVariant::V_SUP: return "V_SUP";
    case MaxVariant::D_SUP: return "D_SUP";
  }
  return "S";
}

struct ScaleRange {
  int k_lo;
  int k_hi;
};

// Per-k maximal fields X_k for k in [range.k_lo, range.k_hi].
inline std::vector<std::vector<double>> maximal_fields(const SampledField& f, const SpaceParams& P, MaxVariant variant,
                                                       const QuadratureSpec& quad, ScaleRange range) {
  const GridSpec& g = f.grid();
  if (g.dim < 2) fail(ErrorKind::DimensionTooLow, "maximal characterizations need dim >= 2");
  if (range.k_hi < range.k_lo) fail(ErrorKind::BandRangeEmpty, "empty scale range");
  QuadratureSpec q = quad.resolved(g);
  QuadratureSpec::check_counts(q);
  SpectralField s = dft_forward(f);
  const double expo = g.dim / P.r;
  std::vector<std::vector<double>> out;
  auto mean_field = [&](MaximalVariant mv, double t) {
    return weighted_sup(mean_difference_magnitude(s, mv, P.L, t, MeanRule::Exact, q), g, t, expo);
  };
  if (variant == MaxVariant::S || variant == MaxVariant::V) {
    MaximalVariant mv = variant == MaxVariant::S ? MaximalVariant::SPHERE_S : MaximalVariant::BALL_V;
    for (int k = range.k_lo; k <= range.k_hi; ++k) out.push_back(mean_field(mv, std::exp2(-k)));
    return out;
  }
  if (variant == MaxVariant::S_SUP || variant == MaxVariant::V_SUP) {
    MaximalVariant mv = variant == MaxVariant::S_SUP ? MaximalVariant::SPHERE_S : MaximalVariant::BALL_V;
    const int npo = q.tau_nodes_per_octave, count = npo * q.tau_octaves;
    std::map<int, std::vector<double>> cache;  // key e: t = 2^(1 - e / npo)
    for (int k = range.k_lo; k <= range.k_hi; ++k) {
      std::vector<double> best(g.total(), 0.0);
      for (int i = 1; i <= count; ++i) {
        int e = i + npo * k;
        auto it = cache.find(e);
        if (it == cache.end()) it = cache.emplace(e, mean_field(mv, std::exp2(1.0 - static_cast<double>(e) / npo))).first;
        for (std::size_t x = 0; x < best.size(); ++x) best[x] = std::max(best[x], it->second[x]);
      }
      out.push_back(std::move(best));
    }
    return out;
  }
  const int npo = q.sup_radial_nodes_per_octave, count = npo * q.tau_octaves;
  auto dirs = sphere_rule(g.dim, q.sup_sphere_nodes);
  std::map<std::pair<int, std::size_t>, std::vector<double>> cache;
  for (int k = range.k_lo; k <= range.k_hi; ++k) {
    std::vector<double> best(g.total(), 0.0);
    for (int i = 1; i <= count; ++i) {
      int e = i + npo * k;
      double rho = std::exp2(1.0 - static_cast<double>(e) / npo);
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        auto key = std::make_pair(e, d);
        auto it = cache.find(key);
        if (it == cache.end()) {
          std::vector<double> h(g.dim);
          for (int a = 0; a < g.dim; ++a) h[a] = rho * dirs[d].z[a];
          auto m = iterated_difference(s, DifferenceSpec{P.L, h, DiffMethod::Spectral}).magnitudes();
          it = cache.emplace(key, weighted_sup(m, g, rho, expo)).first;
        }
        for (std::size_t x = 0; x < best.size(); ++x) best[x] = std::max(best[x], it->second[x]);
      }
    }
    out.push_back(std::move(best));
  }
  return out;
}

inline ScaleRange default_scale_range(const GridSpec& g) {
  DyadicBandSystem sys = build_band_system(g);
  return {sys.j_min(), sys.j_max()};
}

inline QuasinormResult assemble_scales(const std::vector<std::vector<double>>& X, const SpaceParams& P, ScaleRange range,
                                       const GridSpec& g, const std::string& id) {
  const bool qinf = std::isinf(P.q);
  std::vector<std::vector<double>> parts;
  std::vector<double> totals;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double w = std::exp2((range.k_lo + static_cast<int>(i)) * P.s);
    if (P.scale == Scale::F) {
      std::vector<double> m = X[i];
      for (double& v : m) v = qinf ? w * v : std::pow(w * v, P.q);
      parts.push_back(std::move(m));
    } else {
      double nrm = w * lp_norm_abs(X[i], P.p, g.cell_volume());
      totals.push_back(qinf ? nrm : std::pow(nrm, P.q));
    }
  }
  detail::Aggregate a = P.scale == Scale::F ? detail::aggregate_F(parts, 0, P.p, P.q, g.cell_volume())
                                            : detail::aggregate_B(totals, 0, P.q);
  QuasinormResult r;
  r.characterization = id;
  r.params = P;
  r.value = a.value;
  r.per_scale_exponent = a.exponent;
  for (std::size_t i = 0; i < a.contrib.size(); ++i) r.per_scale.push_back({static_cast<double>(range.k_lo + static_cast<int>(i)), a.contrib[i]});
  r.nodes = X.size();
  return r;
}

inline QuasinormResult maximal_quasinorm(const SampledField& f, const SpaceParams& P, MaxVariant variant,
                                         const QuadratureSpec& quad, ScaleRange range) {
  P.validate();
  auto X = maximal_fields(f, P, variant, quad, range);
  return assemble_scales(X, P, range, f.grid(), std::string("max:") + max_variant_name(variant));
}

inline QuasinormResult maximal_quasinorm(const SampledField& f, const SpaceParams& P, MaxVariant variant,
                                         const QuadratureSpec& quad) {
  return maximal_quasinorm(f, P, variant, quad, default_scale_range(f.grid()));
}

}  // namespace lplab
