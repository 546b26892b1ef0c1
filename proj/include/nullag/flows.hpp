#ifndef NULLAG_FLOWS_HPP
#define NULLAG_FLOWS_HPP

#include <memory>
#include <utility>
#include <vector>

#include "nullag/fields.hpp"
#include "nullag/linalg.hpp"

namespace nullag {

/** A numerical diffeomorphism: point evaluation plus Jacobian. */
class Map {
 public:
  virtual ~Map() = default;
  virtual int dim() const = 0;
  virtual Vec eval(const Vec& x) const = 0;
  virtual Mat jacobian(const Vec& x) const = 0;
  virtual std::pair<Vec, Mat> eval_with_jacobian(const Vec& x) const {
    return {eval(x), jacobian(x)};
  }
  // Conservative: true only when the map provably leaves x fixed with
  // identity Jacobian (integrands over map differences skip such x).
  virtual bool fixes(const Vec&) const { return false; }
};

using MapPtr = std::shared_ptr<const Map>;

class IdentityMap final : public Map {
 public:
  explicit IdentityMap(int n) : n_(n) {}
  int dim() const override { return n_; }
  Vec eval(const Vec& x) const override { return x; }
  Mat jacobian(const Vec&) const override { return Mat::Identity(n_, n_); }
  bool fixes(const Vec&) const override { return true; }

 private:
  int n_;
};

/** Affine homothety-translation f(x) = x1 + eps * (x - x0), eps > 0. */
class HomothetyMap final : public Map {
 public:
  HomothetyMap(Vec x1, Vec x0, double eps);
  int dim() const override { return static_cast<int>(x1_.size()); }
  Vec eval(const Vec& x) const override { return x1_ + eps_ * (x - x0_); }
  Mat jacobian(const Vec&) const override {
    return eps_ * Mat::Identity(dim(), dim());
  }
  HomothetyMap inverse() const;

 private:
  Vec x1_, x0_;
  double eps_;
};

/** Time-t flow of a compact field, integrated by fixed-step RK4 with
 *  the Jacobian transported along (variational equation
 *  dM/dt = grad_eta(y) * M, M(0) = I). Points outside the field's
 *  support never move. */
class FlowMap final : public Map {
 public:
  FlowMap(CompactField field, double time, int substeps = kDefaultSubsteps);

  static constexpr int kDefaultSubsteps = 64;
  static constexpr long kStepBudget = 1000000;

  int dim() const override { return field_.group().n; }
  Vec eval(const Vec& x) const override;
  Mat jacobian(const Vec& x) const override;
  std::pair<Vec, Mat> eval_with_jacobian(const Vec& x) const override;

  FlowMap inverse() const { return FlowMap(field_, -time_, substeps_); }
  const CompactField& field() const { return field_; }
  double time() const { return time_; }
  bool fixes(const Vec& x) const override {
    return time_ == 0.0 || !field_.in_support(x);
  }

 private:
  CompactField field_;
  double time_;
  int substeps_;
};

/** Composition of maps, first entry applied last:
 *  (maps[0] ∘ maps[1] ∘ ... ∘ maps[k-1]); Jacobian by the chain rule. */
class ComposedMap final : public Map {
 public:
  explicit ComposedMap(std::vector<MapPtr> maps);
  int dim() const override;
  Vec eval(const Vec& x) const override;
  Mat jacobian(const Vec& x) const override;
  std::pair<Vec, Mat> eval_with_jacobian(const Vec& x) const override;
  bool fixes(const Vec& x) const override {
    for (const auto& m : maps_)
      if (!m->fixes(x)) return false;
    return true;
  }

 private:
  std::vector<MapPtr> maps_;
};

MapPtr identity_map(int n);
MapPtr compose(std::vector<MapPtr> maps);
MapPtr flow_map(const CompactField& field, double time,
                int substeps = FlowMap::kDefaultSubsteps);

// Spec-facing operation names.
inline Vec flow_eval(const FlowMap& m, const Vec& x) { return m.eval(x); }
inline Mat flow_jacobian(const FlowMap& m, const Vec& x) { return m.jacobian(x); }

}  // namespace nullag

#endif
