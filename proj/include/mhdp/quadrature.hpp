#pragma once

#include <cstddef>
#include <vector>

namespace mhdp {

/// One-dimensional quadrature rule: nodes and weights.
struct Rule1d {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1]; exact for degree 2n-1.
Rule1d gauss_legendre(int n);

/// Gauss-Legendre rule mapped to [a, b].
Rule1d gauss_legendre(int n, double a, double b);

/// Composite Gauss-Legendre rule on [0, gap] with panels graded
/// geometrically (ratio 2) toward both walls, from `h_min` up to gap/4, and
/// a single interior panel.  Every panel uses `points_per_panel` nodes, so
/// polynomials of degree < 2*points_per_panel integrate exactly.
Rule1d graded_wall_rule(double gap, double h_min, int points_per_panel);

/// Panel breakpoints used by graded_wall_rule (ascending, includes 0 and gap).
std::vector<double> graded_wall_breaks(double gap, double h_min);

/// Legendre polynomials P_0..P_nmax and their first two derivatives at s.
struct LegendreTable {
  std::vector<double> p, dp, ddp;
};
LegendreTable legendre(int nmax, double s);

}  // namespace mhdp
