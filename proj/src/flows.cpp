#include "nullag/flows.hpp"

#include <cmath>
#include <stdexcept>

#include "nullag/errors.hpp"

namespace nullag {

HomothetyMap::HomothetyMap(Vec x1, Vec x0, double eps)
    : x1_(std::move(x1)), x0_(std::move(x0)), eps_(eps) {
  if (x1_.size() != x0_.size())
    throw std::invalid_argument("homothety anchor dimensions differ");
  if (!(eps_ > 0.0)) throw std::invalid_argument("homothety scale must be > 0");
}

HomothetyMap HomothetyMap::inverse() const {
  // y = x1 + eps (x - x0)  =>  x = x0 + (1/eps)(y - x1)
  return HomothetyMap(x0_, x1_, 1.0 / eps_);
}

FlowMap::FlowMap(CompactField field, double time, int substeps)
    : field_(std::move(field)), time_(time), substeps_(substeps) {
  if (substeps_ < 1) throw std::invalid_argument("substeps must be >= 1");
  const long total = static_cast<long>(std::ceil(std::abs(time_))) * substeps_;
  if (total > kStepBudget)
    throw integration_budget_exceeded("flow would need " + std::to_string(total) +
                                      " RK4 steps");
}

Vec FlowMap::eval(const Vec& x) const {
  if (time_ == 0.0 || !field_.in_support(x)) return x;
  const double h = time_ / substeps_;
  Vec y = x;
  for (int s = 0; s < substeps_; ++s) {
    const Vec k1 = field_.value(y);
    const Vec k2 = field_.value(y + 0.5 * h * k1);
    const Vec k3 = field_.value(y + 0.5 * h * k2);
    const Vec k4 = field_.value(y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

std::pair<Vec, Mat> FlowMap::eval_with_jacobian(const Vec& x) const {
  const int n = dim();
  Mat m = Mat::Identity(n, n);
  if (time_ == 0.0 || !field_.in_support(x)) return {x, m};
  const double h = time_ / substeps_;
  Vec y = x;
  for (int s = 0; s < substeps_; ++s) {
    const Vec k1 = field_.value(y);
    const Mat g1 = field_.jacobian(y) * m;

    const Vec y2 = y + 0.5 * h * k1;
    const Vec k2 = field_.value(y2);
    const Mat g2 = field_.jacobian(y2) * (m + 0.5 * h * g1);

    const Vec y3 = y + 0.5 * h * k2;
    const Vec k3 = field_.value(y3);
    const Mat g3 = field_.jacobian(y3) * (m + 0.5 * h * g2);

    const Vec y4 = y + h * k3;
    const Vec k4 = field_.value(y4);
    const Mat g4 = field_.jacobian(y4) * (m + h * g3);

    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    m += (h / 6.0) * (g1 + 2.0 * g2 + 2.0 * g3 + g4);
  }
  return {y, m};
}

Mat FlowMap::jacobian(const Vec& x) const { return eval_with_jacobian(x).second; }

ComposedMap::ComposedMap(std::vector<MapPtr> maps) : maps_(std::move(maps)) {
  if (maps_.empty()) throw std::invalid_argument("cannot compose zero maps");
  for (const auto& m : maps_)
    if (m->dim() != maps_.front()->dim())
      throw std::invalid_argument("composed maps must share dimension");
}

int ComposedMap::dim() const { return maps_.front()->dim(); }

Vec ComposedMap::eval(const Vec& x) const {
  Vec y = x;
  for (auto it = maps_.rbegin(); it != maps_.rend(); ++it) y = (*it)->eval(y);
  return y;
}

std::pair<Vec, Mat> ComposedMap::eval_with_jacobian(const Vec& x) const {
  Vec y = x;
  Mat j = Mat::Identity(dim(), dim());
  for (auto it = maps_.rbegin(); it != maps_.rend(); ++it) {
    auto [ynext, jhere] = (*it)->eval_with_jacobian(y);
    j = jhere * j;
    y = std::move(ynext);
  }
  return {y, j};
}

Mat ComposedMap::jacobian(const Vec& x) const {
  return eval_with_jacobian(x).second;
}

MapPtr identity_map(int n) { return std::make_shared<IdentityMap>(n); }

MapPtr compose(std::vector<MapPtr> maps) {
  return std::make_shared<ComposedMap>(std::move(maps));
}

MapPtr flow_map(const CompactField& field, double time, int substeps) {
  return std::make_shared<FlowMap>(field, time, substeps);
}

}  // namespace nullag
