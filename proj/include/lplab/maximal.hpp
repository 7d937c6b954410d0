#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "differences.hpp"
#include "error.hpp"
#include "field.hpp"
#include "quadrature.hpp"

namespace lplab {

enum class MaximalVariant { HL, PEETRE, SPHERE_S, BALL_V, POINT_D };
enum class MeanRule { Exact, Quadrature };

struct MaximalSpec {
  MaximalVariant variant = MaximalVariant::SPHERE_S;
  double t = 1.0;
  std::vector<double> h;
  int L = 1;
  double r = 1.0;
  MeanRule rule = MeanRule::Exact;
};

namespace detail {

inline double min_image(std::int64_t o, std::int64_t n) {
  o = ((o % n) + n) % n;
  return static_cast<double>(std::min(o, n - o));
}

// Minimal-image length of every offset, in length units, flat order.
inline std::vector<double> offset_lengths(const GridSpec& g) {
  std::vector<double> out(g.total());
  double sp = g.spacing();
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    auto ix = unravel(g, idx);
    double s = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      double d = min_image(ix[a], g.N);
      s += d * d;
    }
    out[idx] = std::sqrt(s) * sp;
  }
  return out;
}

}  // namespace detail

// out(x) = max over grid offsets y of a(x - y) * (1 + |y| / lambda)^(-expo).
// Exact branch-and-bound over blocks; weights are tabulated by squared grid distance.
inline std::vector<double> weighted_sup(const std::vector<double>& a, const GridSpec& g, double lambda, double expo) {
  const std::int64_t n = g.N;
  const int dim = g.dim;
  std::int64_t bs = dim == 1 ? 16 : (dim == 2 ? 8 : 4);
  bs = std::min<std::int64_t>(bs, n);
  const std::int64_t nb = n / bs;
  const double sp = g.spacing();

  const std::int64_t half = n / 2;
  std::vector<double> wsq(static_cast<std::size_t>(dim * half * half + 1));
  auto fill = [&](std::size_t d2) { wsq[d2] = std::pow(1.0 + std::sqrt(static_cast<double>(d2)) * sp / lambda, -expo); };
  if (dim == 1)
    for (std::int64_t m = 0; m <= half; ++m) fill(static_cast<std::size_t>(m * m));
  else
    for (std::size_t d2 = 0; d2 < wsq.size(); ++d2) fill(d2);
  wsq[0] = 1.0;
  std::vector<std::int64_t> axis_d2(static_cast<std::size_t>(n));
  for (std::int64_t o = 0; o < n; ++o) {
    std::int64_t m = std::min(o, n - o);
    axis_d2[static_cast<std::size_t>(o)] = m * m;
  }

  std::size_t nblocks = 1;
  for (int d = 0; d < dim; ++d) nblocks *= static_cast<std::size_t>(nb);
  std::vector<std::array<std::int64_t, 3>> bidx(nblocks);
  for (std::size_t b = 0; b < nblocks; ++b) {
    std::size_t r = b;
    bidx[b] = {0, 0, 0};
    for (int d = dim - 1; d >= 0; --d) {
      bidx[b][d] = static_cast<std::int64_t>(r % static_cast<std::size_t>(nb));
      r /= static_cast<std::size_t>(nb);
    }
  }

  std::vector<double> bmax(nblocks, -1.0);
  std::vector<std::array<std::int64_t, 3>> barg(nblocks);
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    auto ix = unravel(g, idx);
    std::size_t b = 0;
    for (int d = 0; d < dim; ++d) b = b * static_cast<std::size_t>(nb) + static_cast<std::size_t>(ix[d] / bs);
    if (a[idx] > bmax[b]) {
      bmax[b] = a[idx];
      barg[b] = ix;
    }
  }
  double gmax = *std::max_element(bmax.begin(), bmax.end());

  // mind[i * nb + d]: least squared axis distance from local coordinate i to the block displaced by d.
  std::vector<std::int64_t> mind(static_cast<std::size_t>(bs * nb));
  for (std::int64_t i = 0; i < bs; ++i)
    for (std::int64_t d = 0; d < nb; ++d) {
      std::int64_t m = n * n;
      for (std::int64_t j = 0; j < bs; ++j)
        m = std::min(m, axis_d2[static_cast<std::size_t>(((d * bs + i - j) % n + n) % n)]);
      mind[static_cast<std::size_t>(i * nb + d)] = m;
    }
  std::vector<std::int64_t> lb(nblocks);
  for (std::size_t b = 0; b < nblocks; ++b) {
    std::int64_t s = 0;
    for (int d = 0; d < dim; ++d) {
      std::int64_t m = n * n;
      for (std::int64_t i = 0; i < bs; ++i) m = std::min(m, mind[static_cast<std::size_t>(i * nb + bidx[b][d])]);
      s += m;
    }
    lb[b] = s;
  }
  std::vector<std::size_t> order(nblocks);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return lb[x] < lb[y]; });

  const double guard = 1.0 + 1e-12;
  std::vector<double> out(a.size());
  parallel_for(a.size(), [&](std::size_t x) {
    auto xi = unravel(g, x);
    std::array<std::int64_t, 3> xb{0, 0, 0}, xl{0, 0, 0};
    for (int d = 0; d < dim; ++d) {
      xb[d] = xi[d] / bs;
      xl[d] = xi[d] % bs;
    }
    auto dist2 = [&](const std::array<std::int64_t, 3>& y) {
      std::int64_t s = 0;
      for (int d = 0; d < dim; ++d) s += axis_d2[static_cast<std::size_t>(((xi[d] - y[d]) % n + n) % n)];
      return s;
    };
    double best = a[x];
    for (std::size_t b = 0; b < nblocks; ++b) best = std::max(best, bmax[b] * wsq[static_cast<std::size_t>(dist2(barg[b]))]);
    for (std::size_t o = 0; o < nblocks; ++o) {
      const auto& disp = bidx[order[o]];
      if (wsq[static_cast<std::size_t>(lb[order[o]])] * guard * gmax <= best) break;
      std::size_t sb = 0;
      std::int64_t s = 0;
      std::array<std::int64_t, 3> org{0, 0, 0};
      for (int d = 0; d < dim; ++d) {
        std::int64_t src = (xb[d] - disp[d] + nb) % nb;
        sb = sb * static_cast<std::size_t>(nb) + static_cast<std::size_t>(src);
        s += mind[static_cast<std::size_t>(xl[d] * nb + disp[d])];
        org[d] = src * bs;
      }
      if (bmax[sb] * wsq[static_cast<std::size_t>(s)] * guard <= best) continue;
      // Per-axis squared distances and source rows for this block.
      std::array<std::array<std::int64_t, 16>, 3> dd{};
      std::array<std::int64_t, 3> ext{1, 1, 1};
      for (int d = 0; d < dim; ++d) {
        ext[d] = bs;
        for (std::int64_t j = 0; j < bs; ++j)
          dd[d][static_cast<std::size_t>(j)] = axis_d2[static_cast<std::size_t>(((xi[d] - org[d] - j) % n + n) % n)];
      }
      const std::size_t sn = static_cast<std::size_t>(n);
      for (std::int64_t j0 = 0; j0 < ext[0]; ++j0) {
        std::size_t r0 = static_cast<std::size_t>(org[0] + j0);
        std::int64_t s0 = dd[0][static_cast<std::size_t>(j0)];
        for (std::int64_t j1 = 0; j1 < ext[1]; ++j1) {
          std::size_t r1 = dim > 1 ? r0 * sn + static_cast<std::size_t>(org[1] + j1) : r0;
          std::int64_t s1 = s0 + (dim > 1 ? dd[1][static_cast<std::size_t>(j1)] : 0);
          for (std::int64_t j2 = 0; j2 < ext[2]; ++j2) {
            std::size_t yi = dim > 2 ? r1 * sn + static_cast<std::size_t>(org[2] + j2) : r1;
            std::int64_t s2 = s1 + (dim > 2 ? dd[2][static_cast<std::size_t>(j2)] : 0);
            double v = a[yi] * wsq[static_cast<std::size_t>(s2)];
            if (v > best) best = v;
          }
        }
      }
    }
    out[x] = best;
  });
  return out;
}

inline SampledField real_field(const std::vector<double>& v, const GridSpec& g) { return make_field(v, g); }

// Mean of |f| over discrete balls of radius 0 and spacing * 2^i <= B/2, maximized.
inline SampledField hardy_littlewood_max(const SampledField& f) {
  const GridSpec& g = f.grid();
  std::vector<double> mag = f.magnitudes();
  std::vector<double> lens = detail::offset_lengths(g);
  std::vector<std::size_t> order(lens.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return lens[x] < lens[y]; });
  std::vector<double> radii{0.0};
  for (double d = g.spacing(); d <= g.B / 2.0 * (1.0 + 1e-12); d *= 2.0) radii.push_back(d);
  std::vector<std::size_t> counts;
  std::size_t pos = 0;
  for (double rad : radii) {
    while (pos < order.size() && lens[order[pos]] <= rad * (1.0 + 1e-12)) ++pos;
    counts.push_back(pos);
  }
  std::vector<std::array<std::int64_t, 3>> offs(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) offs[i] = unravel(g, order[i]);
  std::vector<double> out(mag.size());
  parallel_for(mag.size(), [&](std::size_t x) {
    auto xi = unravel(g, x);
    double sum = 0.0, best = 0.0;
    std::size_t done = 0;
    for (std::size_t c : counts) {
      for (; done < c; ++done) {
        std::array<std::int64_t, 3> y{0, 0, 0};
        for (int d = 0; d < g.dim; ++d) y[d] = xi[d] + offs[done][d];
        sum += mag[ravel(g, y)];
      }
      best = std::max(best, sum / static_cast<double>(c));
    }
    out[x] = best;
  });
  return real_field(out, g);
}

inline SampledField peetre_max(const SampledField& f, double t, double r) {
  if (!(t > 0.0) || !(r > 0.0)) fail(ErrorKind::InvalidExponent, "peetre_max needs t > 0 and r > 0");
  return real_field(weighted_sup(f.magnitudes(), f.grid(), 1.0 / t, f.grid().dim / r), f.grid());
}

// Mean of exp(i a z.e) over the unit sphere.
inline double sphere_mean_exp(int dim, double a) {
  if (dim == 1) return std::cos(a);
  if (dim == 2) return std::cyl_bessel_j(0.0, std::abs(a));
  if (std::abs(a) < 1e-4) return 1.0 - a * a / 6.0;
  return std::sin(a) / a;
}

// Mean of exp(i a z.e) over the annulus 1 <= |z| < 2.
inline double annulus_mean_exp(int dim, double a) {
  a = std::abs(a);
  if (dim == 1) {
    if (a < 1e-4) return 1.0 - 7.0 * a * a / 6.0;
    return (std::sin(2.0 * a) - std::sin(a)) / a;
  }
  if (dim == 2) {
    if (a < 1e-4) return 1.0 - 5.0 * a * a / 8.0;
    return 2.0 * (2.0 * std::cyl_bessel_j(1.0, 2.0 * a) - std::cyl_bessel_j(1.0, a)) / (3.0 * a);
  }
  if (a < 1e-4) return 1.0 - 93.0 * a * a / 210.0;
  double integral = (std::sin(2.0 * a) - std::sin(a)) / (a * a) - (2.0 * std::cos(2.0 * a) - std::cos(a)) / a;
  return 3.0 / (7.0 * a) * integral;
}

// Mean of (exp(2 pi i t z.xi) - 1)^L over the sphere (ball = false) or annulus (ball = true).
inline double mean_difference_symbol(int dim, int L, double t, double xi_norm, bool ball) {
  double a = 2.0 * kPi * t * xi_norm;
  double sum = 0.0;
  for (int m = 0; m <= L; ++m) {
    double c = static_cast<double>(binomial(L, m)) * ((L - m) % 2 ? -1.0 : 1.0);
    sum += c * (ball ? annulus_mean_exp(dim, m * a) : sphere_mean_exp(dim, m * a));
  }
  return sum;
}

// Node-rule version of the same mean; annulus uses radial log nodes times sphere nodes.
inline cplx mean_difference_symbol_nodes(const std::vector<Direction>& dirs, const std::vector<RadialNode>& radial,
                                         int dim, int L, double t, const std::array<double, 3>& xi, bool ball) {
  cplx sum = 0.0;
  double wsum = 0.0;
  auto add_node = [&](double rho, double w, const Direction& d) {
    double ph = 0.0;
    for (int a = 0; a < dim; ++a) ph += d.z[a] * xi[a];
    cplx b = std::polar(1.0, 2.0 * kPi * t * rho * ph) - 1.0;
    cplx v = 1.0;
    for (int i = 0; i < L; ++i) v *= b;
    sum += w * v;
    wsum += w;
  };
  if (!ball) {
    for (const auto& d : dirs) add_node(1.0, d.weight, d);
  } else {
    for (const auto& r : radial)
      for (const auto& d : dirs) add_node(r.rho, d.weight * std::pow(r.rho, dim) * r.weight, d);
  }
  return sum / wsum;
}

inline void check_mean_rule(const GridSpec& g, const QuadratureSpec& quad, int L, double t, bool ball) {
  QuadratureSpec q = quad.resolved(g);
  if (g.dim == 1) return;
  double amax = 2.0 * kPi * L * t * (ball ? 2.0 : 1.0) * g.nyquist() * std::sqrt(static_cast<double>(g.dim));
  if (q.sphere_nodes < amax + 16.0)
    fail(ErrorKind::QuadratureTooCoarse, "sphere rule cannot resolve the phase range of the lattice");
}

inline std::vector<double> mean_difference_magnitude(const SpectralField& s, MaximalVariant variant, int L, double t,
                                                     MeanRule rule, const QuadratureSpec& quad) {
  const GridSpec& g = s.grid();
  bool ball = variant == MaximalVariant::BALL_V;
  SampledField m;
  if (rule == MeanRule::Exact) {
    m = apply_multiplier(
        s,
        [&](std::size_t, const std::array<double, 3>& xi) {
          return cplx(mean_difference_symbol(g.dim, L, t, norm3(xi, g.dim), ball), 0.0);
        },
        s.from_real());
  } else {
    check_mean_rule(g, quad, L, t, ball);
    QuadratureSpec q = quad.resolved(g);
    auto dirs = sphere_rule(g.dim, q.sphere_nodes);
    auto radial = radial_rule(1.0, 2.0, q.radial_nodes_per_octave);
    m = apply_multiplier(
        s,
        [&](std::size_t, const std::array<double, 3>& xi) {
          return mean_difference_symbol_nodes(dirs, radial, g.dim, L, t, xi, ball);
        },
        s.from_real());
  }
  return m.magnitudes();
}

inline SampledField mean_difference_max(const SpectralField& s, const MaximalSpec& spec, const QuadratureSpec& quad) {
  const GridSpec& g = s.grid();
  if (spec.L < 1) fail(ErrorKind::InvalidExponent, "difference order must be at least 1");
  if (!(spec.r > 0.0)) fail(ErrorKind::InvalidExponent, "r must be positive");
  double expo = g.dim / spec.r;
  switch (spec.variant) {
    case MaximalVariant::SPHERE_S:
      if (g.dim < 2) fail(ErrorKind::DimensionTooLow, "sphere means need dim >= 2");
      [[fallthrough]];
    case MaximalVariant::BALL_V: {
      if (!(spec.t > 0.0)) fail(ErrorKind::InvalidExponent, "t must be positive");
      auto mag = mean_difference_magnitude(s, spec.variant, spec.L, spec.t, spec.rule, quad);
      return real_field(weighted_sup(mag, g, spec.t, expo), g);
    }
    case MaximalVariant::POINT_D: {
      SampledField d = iterated_difference(s, DifferenceSpec{spec.L, spec.h, DiffMethod::Spectral});
      double hn = 0.0;
      for (double v : spec.h) hn += v * v;
      return real_field(weighted_sup(d.magnitudes(), g, std::sqrt(hn), expo), g);
    }
    default:
      fail(ErrorKind::InvalidExponent, "mean_difference_max needs SPHERE_S, BALL_V or POINT_D");
  }
}

inline SampledField mean_difference_max(const SampledField& f, const MaximalSpec& spec, const QuadratureSpec& quad) {
  return mean_difference_max(dft_forward(f), spec, quad);
}

}  // namespace lplab
