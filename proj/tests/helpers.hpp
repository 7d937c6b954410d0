#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <lplab/lplab.hpp>

namespace th {

using lplab::cplx;
using lplab::GridSpec;
using lplab::SampledField;

inline GridSpec grid(int dim, std::int64_t N, double B = 1.0) { return GridSpec{dim, N, B}; }

// exp(2 pi i k.x / B)
inline SampledField mode(const GridSpec& g, std::array<std::int64_t, 3> k) {
  std::vector<cplx> v(g.total());
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto ix = lplab::unravel(g, i);
    double ph = 0.0;
    for (int a = 0; a < g.dim; ++a) ph += static_cast<double>(k[a] * ix[a]) / static_cast<double>(g.N);
    v[i] = std::polar(1.0, 2.0 * lplab::kPi * ph);
  }
  return SampledField(g, std::move(v));
}

inline SampledField cosine(const GridSpec& g, std::int64_t k) {
  std::vector<double> v(g.total());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::cos(2.0 * lplab::kPi * static_cast<double>(k * lplab::unravel(g, i)[0]) / static_cast<double>(g.N));
  return lplab::make_field(v, g);
}

inline SampledField constant(const GridSpec& g, double c) { return lplab::make_field(std::vector<double>(g.total(), c), g); }

inline SampledField noise(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<double> v(g.total());
  for (double& x : v) x = nd(gen);
  return lplab::make_field(v, g);
}

// Real field with random coefficients on 0 < |xi| <= kmax.
inline SampledField random_bandlimited(const GridSpec& g, double kmax, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  lplab::SpectralField s = lplab::dft_forward(constant(g, 0.0));
  auto& c = s.coeffs();
  lplab::for_each_mode(g, [&](std::size_t idx, const std::array<double, 3>& xi) {
    double r = lplab::norm3(xi, g.dim);
    double re = nd(gen), im = nd(gen);
    if (r > 0.0 && r <= kmax) c[idx] = cplx(re, im);
  });
  lplab::SampledField f = lplab::dft_inverse(s);
  std::vector<double> v(g.total());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[i].real();
  return lplab::make_field(v, g);
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace th

namespace th {

// Real trigonometric polynomial with explicit coefficients, evaluable off the grid.
struct TrigSum {
  int dim = 1;
  double B = 1.0;
  std::vector<std::array<int, 2>> k;
  std::vector<cplx> amp;

  double operator()(double x0, double x1) const {
    double s = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      double ph = (k[i][0] * x0 + (dim > 1 ? k[i][1] * x1 : 0.0)) / B;
      s += (amp[i] * std::polar(1.0, 2.0 * lplab::kPi * ph)).real();
    }
    return s;
  }

  SampledField sample(std::int64_t N) const {
    GridSpec g{dim, N, B};
    std::vector<double> v(g.total());
    for (std::size_t i = 0; i < v.size(); ++i) {
      auto ix = lplab::unravel(g, i);
      v[i] = (*this)(ix[0] * g.spacing(), dim > 1 ? ix[1] * g.spacing() : 0.0);
    }
    return lplab::make_field(v, g);
  }
};

inline TrigSum random_trig(int dim, int kmax, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  TrigSum t;
  t.dim = dim;
  for (int a = -kmax; a <= kmax; ++a)
    for (int b = (dim > 1 ? -kmax : 0); b <= (dim > 1 ? kmax : 0); ++b) {
      if (a * a + b * b > kmax * kmax || (a == 0 && b == 0)) continue;
      t.k.push_back({a, b});
      t.amp.emplace_back(nd(gen), nd(gen));
    }
  return t;
}

// Lagrange interpolation of periodic fine samples (tensor, 8 points per axis).
inline double lagrange_at(const SampledField& fine, double x0, double x1) {
  const GridSpec& g = fine.grid();
  const int P = 8;
  double sp = g.spacing();
  std::array<std::int64_t, 2> base{0, 0};
  std::array<std::array<double, 8>, 2> w{};
  double xs[2] = {x0, x1};
  for (int a = 0; a < g.dim; ++a) {
    double u = xs[a] / sp;
    std::int64_t i0 = static_cast<std::int64_t>(std::floor(u)) - P / 2 + 1;
    base[a] = i0;
    for (int m = 0; m < P; ++m) {
      double l = 1.0;
      for (int q = 0; q < P; ++q)
        if (q != m) l *= (u - static_cast<double>(i0 + q)) / static_cast<double>(m - q);
      w[a][m] = l;
    }
  }
  double s = 0.0;
  for (int m0 = 0; m0 < P; ++m0) {
    if (g.dim == 1) {
      s += w[0][m0] * fine[lplab::ravel(g, {base[0] + m0, 0, 0})].real();
      continue;
    }
    for (int m1 = 0; m1 < P; ++m1)
      s += w[0][m0] * w[1][m1] * fine[lplab::ravel(g, {base[0] + m0, base[1] + m1, 0})].real();
  }
  return s;
}

// Delta^L_h f at the coarse points from shifted values interpolated on a grid refined by R.
inline SampledField refined_difference(const TrigSum& f, std::int64_t N, std::int64_t R, const std::vector<double>& h,
                                       int L) {
  SampledField fine = f.sample(N * R);
  GridSpec g{f.dim, N, f.B};
  std::vector<double> out(g.total());
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto ix = lplab::unravel(g, i);
    double x0 = ix[0] * g.spacing(), x1 = f.dim > 1 ? ix[1] * g.spacing() : 0.0;
    double s = 0.0;
    for (int j = 0; j <= L; ++j) {
      double c = static_cast<double>(lplab::binomial(L, j)) * ((L - j) % 2 ? -1.0 : 1.0);
      s += c * lagrange_at(fine, x0 + j * h[0], x1 + (f.dim > 1 ? j * h[1] : 0.0));
    }
    out[i] = s;
  }
  return lplab::make_field(out, g);
}

}  // namespace th
