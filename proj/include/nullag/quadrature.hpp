#ifndef NULLAG_QUADRATURE_HPP
#define NULLAG_QUADRATURE_HPP

#include <functional>
#include <vector>

#include "nullag/linalg.hpp"

namespace nullag {

/** Axis-aligned box with a tensor-product quadrature grid.
 *  `resolution` counts quadrature points per axis; they are grouped
 *  into cells of four Gauss-Legendre points each. */
struct Domain {
  Vec lower;
  Vec upper;
  int resolution;

  Domain(Vec lo, Vec up, int res);
  static Domain unit_box(int n, int res = 64);

  int dim() const { return static_cast<int>(lower.size()); }
  Vec side() const { return upper - lower; }
  double volume() const { return side().prod(); }
  bool contains(const Vec& x) const;

  Domain with_resolution(int res) const { return Domain(lower, upper, res); }
  // Same center, sides multiplied by `factor`; used to check that
  // invariance verdicts do not depend on the box.
  Domain scaled_about_center(double factor) const;

  int cells_per_axis() const;
  // All tensor-product quadrature nodes, row-major over axes.
  std::vector<Vec> grid_points() const;
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;  // |value(res) - value(res/2)|
};

// All quadrature nodes with their weights; weights sum to volume().
std::vector<std::pair<Vec, double>> quadrature_nodes(const Domain& dom);

using Integrand = std::function<double(const Vec&)>;

/** Composite Gauss-Legendre (4 points per cell per axis) over the box.
 *  Cell contributions are evaluated concurrently and reduced pairwise,
 *  so the result does not depend on the thread count. */
double integrate(const Integrand& f, const Domain& dom);

IntegralResult integrate_with_estimate(const Integrand& f, const Domain& dom);

}  // namespace nullag

#endif
