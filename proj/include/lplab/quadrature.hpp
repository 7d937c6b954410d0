#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"
#include "field.hpp"

namespace lplab {

struct QuadratureSpec {
  double h_min = 0.0;  // 0 selects the grid spacing
  double h_max = 0.0;  // 0 selects B/4
  int radial_nodes_per_octave = 8;
  int sphere_nodes = 0;  // 0 selects 2, 64, 256 for n = 1, 2, 3
  int t_nodes_per_octave = 8;
  int tau_nodes_per_octave = 16;
  int tau_octaves = 5;
  int sup_radial_nodes_per_octave = 2;
  int sup_sphere_nodes = 0;  // 0 selects 2, 16, 32

  QuadratureSpec resolved(const GridSpec& g) const {
    QuadratureSpec q = *this;
    if (q.h_min <= 0.0) q.h_min = g.spacing();
    if (q.h_max <= 0.0) q.h_max = g.B / 4.0;
    if (q.sphere_nodes <= 0) q.sphere_nodes = g.dim == 1 ? 2 : (g.dim == 2 ? 64 : 256);
    if (q.sup_sphere_nodes <= 0) q.sup_sphere_nodes = g.dim == 1 ? 2 : (g.dim == 2 ? 16 : 32);
    return q;
  }

  // User-facing window check.
  void validate(const GridSpec& g) const {
    QuadratureSpec q = resolved(g);
    double eps = 1e-12 * g.B;
    if (q.h_min < g.spacing() - eps || !(q.h_min < q.h_max) || q.h_max > g.B / 4.0 + eps)
      fail(ErrorKind::QuadratureTooCoarse, "require spacing <= h_min < h_max <= B/4");
    check_counts(q);
  }

  static void check_counts(const QuadratureSpec& q) {
    if (q.radial_nodes_per_octave < 1 || q.t_nodes_per_octave < 1 || q.tau_nodes_per_octave < 1 || q.tau_octaves < 1 ||
        q.sup_radial_nodes_per_octave < 1)
      fail(ErrorKind::QuadratureTooCoarse, "node counts must be positive");
    if (q.sphere_nodes < 2 || q.sphere_nodes % 2 != 0 || q.sup_sphere_nodes < 2 || q.sup_sphere_nodes % 2 != 0)
      fail(ErrorKind::QuadratureTooCoarse, "sphere node counts must be even and at least 2");
  }
};

struct Direction {
  std::array<double, 3> z;
  double weight;
};

inline double sphere_area(int dim) { return dim == 1 ? 2.0 : (dim == 2 ? 2.0 * kPi : 4.0 * kPi); }

// Antipodally symmetric rule on the unit sphere; weights sum to the sphere's measure.
inline std::vector<Direction> sphere_rule(int dim, int m) {
  std::vector<Direction> out;
  if (dim == 1) {
    out.push_back({{1.0, 0.0, 0.0}, 1.0});
    out.push_back({{-1.0, 0.0, 0.0}, 1.0});
    return out;
  }
  if (m < 2 || m % 2) fail(ErrorKind::QuadratureTooCoarse, "sphere rule needs an even node count");
  double w = sphere_area(dim) / m;
  if (dim == 2) {
    for (int i = 0; i < m; ++i) {
      double th = 2.0 * kPi * i / m;
      out.push_back({{std::cos(th), std::sin(th), 0.0}, w});
    }
    return out;
  }
  int half = m / 2;
  double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Direction> upper;
  for (int i = 0; i < half; ++i) {
    double z = (i + 0.5) / half;
    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    double ph = golden * i;
    upper.push_back({{rho * std::cos(ph), rho * std::sin(ph), z}, w});
  }
  out = upper;
  for (const auto& d : upper) out.push_back({{-d.z[0], -d.z[1], -d.z[2]}, w});
  return out;
}

struct RadialNode {
  double rho;
  double weight;  // d rho / rho
  int shell;      // octave index from the bottom of the window
};

// Midpoint rule in log rho; shells are whole octaves starting at h_min.
inline std::vector<RadialNode> radial_rule(double h_min, double h_max, int per_octave) {
  if (!(h_min > 0.0) || !(h_max > h_min)) fail(ErrorKind::QuadratureTooCoarse, "empty radial window");
  double cells_real = per_octave * std::log2(h_max / h_min);
  int cells = static_cast<int>(std::floor(cells_real + 1e-9));
  if (cells < 1) fail(ErrorKind::QuadratureTooCoarse, "radial window shorter than one node");
  std::vector<RadialNode> out;
  double w = std::log(2.0) / per_octave;
  for (int i = 0; i < cells; ++i) out.push_back({h_min * std::exp2((i + 0.5) / per_octave), w, i / per_octave});
  return out;
}

}  // namespace lplab
