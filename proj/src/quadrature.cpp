#include "nullag/quadrature.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nullag/errors.hpp"
#include "nullag/parallel.hpp"

namespace nullag {

namespace {

// 4-point Gauss-Legendre rule on [-1, 1].
constexpr double kNode0 = 0.33998104358485626;
constexpr double kNode1 = 0.86113631159405257;
constexpr double kWeight0 = 0.65214515486254614;
constexpr double kWeight1 = 0.34785484513745386;

constexpr double kNodes[4] = {-kNode1, -kNode0, kNode0, kNode1};
constexpr double kWeights[4] = {kWeight1, kWeight0, kWeight0, kWeight1};

std::string point_string(const Vec& x) {
  std::ostringstream out;
  out << "(" << x.transpose() << ")";
  return out.str();
}

}  // namespace

Domain::Domain(Vec lo, Vec up, int res)
    : lower(std::move(lo)), upper(std::move(up)), resolution(res) {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw std::invalid_argument("domain bounds must have equal nonzero dimension");
  for (int i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i]))
      throw std::invalid_argument("domain needs lower < upper componentwise");
  if (resolution < 8) throw std::invalid_argument("resolution must be >= 8");
}

Domain Domain::unit_box(int n, int res) {
  return Domain(Vec::Zero(n), Vec::Ones(n), res);
}

bool Domain::contains(const Vec& x) const {
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  return true;
}

Domain Domain::scaled_about_center(double factor) const {
  const Vec c = 0.5 * (lower + upper);
  const Vec half = 0.5 * factor * side();
  return Domain(c - half, c + half, resolution);
}

int Domain::cells_per_axis() const { return (resolution + 3) / 4; }

std::vector<Vec> Domain::grid_points() const {
  std::vector<Vec> pts;
  for (auto& [x, w] : quadrature_nodes(*this)) {
    (void)w;
    pts.push_back(x);
  }
  return pts;
}

std::vector<std::pair<Vec, double>> quadrature_nodes(const Domain& dom) {
  const int n = dom.dim();
  const int cells = dom.cells_per_axis();
  const int per_axis = 4 * cells;
  std::vector<std::vector<std::pair<double, double>>> axis(n);
  for (int d = 0; d < n; ++d) {
    const double h = (dom.upper[d] - dom.lower[d]) / cells;
    axis[d].resize(per_axis);
    for (int c = 0; c < cells; ++c) {
      const double mid = dom.lower[d] + (c + 0.5) * h;
      for (int q = 0; q < 4; ++q)
        axis[d][4 * c + q] = {mid + 0.5 * h * kNodes[q], 0.5 * h * kWeights[q]};
    }
  }
  std::vector<std::pair<Vec, double>> out;
  out.reserve(static_cast<std::size_t>(std::pow(per_axis, n)));
  Vec x(n);
  std::vector<int> idx(n, 0);
  while (true) {
    double w = 1.0;
    for (int d = 0; d < n; ++d) {
      x[d] = axis[d][idx[d]].first;
      w *= axis[d][idx[d]].second;
    }
    out.emplace_back(x, w);
    int d = n - 1;
    while (d >= 0 && ++idx[d] == per_axis) idx[d--] = 0;
    if (d < 0) break;
  }
  return out;
}

double integrate(const Integrand& f, const Domain& dom) {
  const int n = dom.dim();
  const int cells = dom.cells_per_axis();
  Vec h(n);
  for (int d = 0; d < n; ++d) h[d] = (dom.upper[d] - dom.lower[d]) / cells;
  const double cell_scale = (0.5 * h.array()).prod();

  std::size_t total_cells = 1;
  for (int d = 0; d < n; ++d) total_cells *= static_cast<std::size_t>(cells);

  std::vector<double> contrib(total_cells, 0.0);
  std::vector<char> bad(total_cells, 0);
  std::vector<Vec> bad_point(total_cells, Vec());

  parallel_for(total_cells, [&](std::size_t cell) {
    // decode the multi-index of this cell
    std::vector<int> ci(n);
    std::size_t rest = cell;
    for (int d = n - 1; d >= 0; --d) {
      ci[d] = static_cast<int>(rest % cells);
      rest /= cells;
    }
    Vec mid(n);
    for (int d = 0; d < n; ++d) mid[d] = dom.lower[d] + (ci[d] + 0.5) * h[d];

    double acc = 0.0;
    Vec x(n);
    std::vector<int> q(n, 0);
    while (true) {
      double wq = 1.0;
      for (int d = 0; d < n; ++d) {
        x[d] = mid[d] + 0.5 * h[d] * kNodes[q[d]];
        wq *= kWeights[q[d]];
      }
      const double val = f(x);
      if (!std::isfinite(val)) {
        bad[cell] = 1;
        bad_point[cell] = x;
        return;
      }
      acc += wq * val;
      int d = n - 1;
      while (d >= 0 && ++q[d] == 4) q[d--] = 0;
      if (d < 0) break;
    }
    contrib[cell] = acc * cell_scale;
  });

  for (std::size_t c = 0; c < total_cells; ++c)
    if (bad[c])
      throw integrand_error("non-finite integrand at " + point_string(bad_point[c]));

  return pairwise_sum(contrib);
}

IntegralResult integrate_with_estimate(const Integrand& f, const Domain& dom) {
  IntegralResult out;
  out.value = integrate(f, dom);
  const int coarse_res = std::max(8, dom.resolution / 2);
  const double coarse = integrate(f, dom.with_resolution(coarse_res));
  out.error_estimate = std::abs(out.value - coarse);
  return out;
}

double pairwise_sum(const std::vector<double>& terms) {
  if (terms.empty()) return 0.0;
  std::vector<double> level(terms);
  while (level.size() > 1) {
    std::vector<double> next((level.size() + 1) / 2, 0.0);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2)
      next[i / 2] = level[i] + level[i + 1];
    if (level.size() % 2 == 1) next.back() = level.back();
    level.swap(next);
  }
  return level[0];
}

}  // namespace nullag
