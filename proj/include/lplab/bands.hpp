#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "field.hpp"

namespace lplab {

class DyadicBandSystem {
 public:
  DyadicBandSystem(GridSpec grid, double sharpness, int j_min, int j_max)
      : grid_(grid), sharpness_(sharpness), j_min_(j_min), j_max_(j_max) {}

  const GridSpec& grid() const { return grid_; }
  double sharpness() const { return sharpness_; }
  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  int band_count() const { return j_max_ - j_min_ + 1; }

  // Smooth cutoff: 1 on [0,1], 0 on [2,inf).
  double chi(double u) const {
    if (u <= 1.0) return 1.0;
    if (u >= 2.0) return 0.0;
    double a = std::exp(-sharpness_ / (2.0 - u));
    double b = std::exp(-sharpness_ / (u - 1.0));
    return a / (a + b);
  }

  double psi_hat(double r) const { return chi(r) - chi(2.0 * r); }
  double phi_hat(double r) const { return chi(r); }
  double band_multiplier(double r, int j) const { return psi_hat(r * std::exp2(-j)); }

  double partition_sum(double r, bool with_lowpass) const {
    double sum = with_lowpass ? phi_hat(r) : 0.0;
    int lo = with_lowpass ? 1 : j_min_;
    for (int j = lo; j <= j_max_; ++j) sum += band_multiplier(r, j);
    return sum;
  }

  // Same profile with the band range moved by m octaves.
  DyadicBandSystem shifted(int m) const { return DyadicBandSystem(grid_, sharpness_, j_min_ + m, j_max_ + m); }

  DyadicBandSystem with_range(int lo, int hi) const {
    if (hi < lo) fail(ErrorKind::BandRangeEmpty, "empty band range");
    return DyadicBandSystem(grid_, sharpness_, lo, hi);
  }

 private:
  GridSpec grid_;
  double sharpness_;
  int j_min_;
  int j_max_;
};

inline DyadicBandSystem build_band_system(const GridSpec& grid, double transition_sharpness = 1.0) {
  grid.validate();
  if (!(transition_sharpness > 0.0)) fail(ErrorKind::InvalidExponent, "transition sharpness must be positive");
  int j_min = 0;
  while (std::exp2(j_min - 1) < 1.0 / grid.B) ++j_min;
  while (std::exp2(j_min - 2) >= 1.0 / grid.B) --j_min;
  int j_max = j_min - 1;
  while (std::exp2(j_max + 2) <= grid.nyquist()) ++j_max;
  if (j_max - j_min + 1 < 3)
    fail(ErrorKind::RangeTooNarrow, "only " + std::to_string(j_max - j_min + 1) + " resolvable bands");
  return DyadicBandSystem(grid, transition_sharpness, j_min, j_max);
}

inline SampledField band_project(const SpectralField& s, const DyadicBandSystem& sys, int j) {
  if (j < sys.j_min() || j > sys.j_max())
    fail(ErrorKind::BandOutOfRange, "band " + std::to_string(j) + " outside [" + std::to_string(sys.j_min()) + ", " +
                                        std::to_string(sys.j_max()) + "]");
  int dim = s.grid().dim;
  return apply_multiplier(
      s, [&](std::size_t, const std::array<double, 3>& xi) { return cplx(sys.band_multiplier(norm3(xi, dim), j), 0.0); },
      s.from_real());
}

inline SampledField band_project(const SampledField& f, const DyadicBandSystem& sys, int j) {
  if (f.grid() != sys.grid()) fail(ErrorKind::GridMismatch, "band system built for another grid");
  return band_project(dft_forward(f), sys, j);
}

struct Band {
  int j;
  SampledField field;
};

struct BandDecomposition {
  std::vector<Band> bands;
  std::optional<SampledField> lowpass;
  double truncated_energy = 0.0;  // relative energy where the partition is not 1
  double dc_energy = 0.0;         // relative energy of the zero mode
};

inline BandDecomposition decompose(const SampledField& f, const DyadicBandSystem& sys, bool inhomogeneous) {
  if (f.grid() != sys.grid()) fail(ErrorKind::GridMismatch, "band system built for another grid");
  const GridSpec& g = f.grid();
  SpectralField s = dft_forward(f);
  double lo = std::exp2(sys.j_min() - 1), hi = std::exp2(sys.j_max() + 1);
  Accumulator total, outside, trunc, dc;
  for_each_mode(g, [&](std::size_t idx, const std::array<double, 3>& xi) {
    double e = std::norm(s.coeffs()[idx]);
    double r = norm3(xi, g.dim);
    total.add(e);
    if (r == 0.0) {
      dc.add(e);
      if (inhomogeneous) {
        double d = 1.0 - sys.partition_sum(r, true);
        trunc.add(e * d * d);
      }
      return;
    }
    if (r < lo || r >= hi) outside.add(e);
    double d = 1.0 - sys.partition_sum(r, inhomogeneous);
    trunc.add(e * d * d);
  });
  BandDecomposition out;
  double tot = total.value();
  double nonzero = tot - dc.value();
  if (!inhomogeneous && nonzero > 0.0 && outside.value() > 1e-10 * nonzero)
    fail(ErrorKind::UnresolvedEnergy, "relative energy " + std::to_string(outside.value() / nonzero) +
                                          " outside the resolvable annulus");
  double denom = inhomogeneous ? tot : nonzero;
  out.truncated_energy = denom > 0.0 ? trunc.value() / denom : 0.0;
  out.dc_energy = tot > 0.0 ? dc.value() / tot : 0.0;
  int first = inhomogeneous ? 1 : sys.j_min();
  DyadicBandSystem range = sys.with_range(std::min(first, sys.j_min()), sys.j_max());
  for (int j = first; j <= sys.j_max(); ++j) out.bands.push_back({j, band_project(s, range, j)});
  if (inhomogeneous)
    out.lowpass = apply_multiplier(
        s, [&](std::size_t, const std::array<double, 3>& xi) { return cplx(sys.phi_hat(norm3(xi, g.dim)), 0.0); },
        s.from_real());
  return out;
}

inline SampledField reconstruct(const BandDecomposition& d) {
  if (d.bands.empty() && !d.lowpass) fail(ErrorKind::EmptyDecomposition, "nothing to reconstruct");
  const GridSpec& g = d.bands.empty() ? d.lowpass->grid() : d.bands.front().field.grid();
  std::vector<cplx> acc(g.total(), cplx(0.0, 0.0));
  auto accumulate = [&](const SampledField& f) {
    if (f.grid() != g) fail(ErrorKind::GridMismatch, "bands live on different grids");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += f[i];
  };
  if (d.lowpass) accumulate(*d.lowpass);
  for (const auto& b : d.bands) accumulate(b.field);
  return SampledField(g, std::move(acc));
}

}  // namespace lplab
