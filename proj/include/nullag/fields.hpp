#ifndef NULLAG_FIELDS_HPP
#define NULLAG_FIELDS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nullag/groups.hpp"
#include "nullag/linalg.hpp"
#include "nullag/quadrature.hpp"

namespace nullag {

/** Radial mollifier exp(-1/(1-r^2)) for r = |x-c|/radius < 1, zero
 *  outside; smooth everywhere, with analytic gradient and Hessian. */
struct Bump {
  Vec center;
  double radius = 1.0;

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;
};

// (value, gradient) of the mollifier; the shape every generated field
// inherits its compact support from.
std::pair<double, Vec> bump(const Vec& center, double radius, const Vec& x);

/** Multivariate polynomial of bounded total degree with dense
 *  monomial coefficients. */
class Polynomial {
 public:
  Polynomial(int vars, std::vector<std::vector<int>> exponents,
             std::vector<double> coeffs);
  static Polynomial random(int vars, int max_degree, Rng& rng);

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;
  int vars() const { return vars_; }

 private:
  int vars_;
  std::vector<std::vector<int>> exponents_;
  std::vector<double> coeffs_;
};

/** Smooth compactly supported vector field whose one-parameter flow
 *  stays in the local group of its GroupSpec: the Jacobian of the
 *  field lies in the group's Lie algebra at every point.
 *
 *  Generators per group:
 *    GL     componentwise bump * polynomial
 *    SL n=2 perpendicular gradient of a scalar stream function
 *    SL n=3 curl of a bump-supported vector potential
 *    Sp n=2 Hamiltonian field w * grad(H)
 *    Conf   the zero field (the only compactly supported choice)
 */
class CompactField {
 public:
  enum class Generator { Componentwise, Stream2d, Curl3d, Hamiltonian2d, Zero };

  static CompactField sample(const GroupSpec& g, const Domain& dom,
                             double amplitude, std::uint64_t seed);

  Vec value(const Vec& x) const;
  Mat jacobian(const Vec& x) const;  // analytic, no finite differences

  const GroupSpec& group() const { return group_; }
  const Domain& domain() const { return domain_; }
  Generator generator() const { return generator_; }
  double amplitude() const { return amplitude_; }
  std::uint64_t seed() const { return seed_; }

  Vec support_lower() const;
  Vec support_upper() const;
  bool in_support(const Vec& x) const;

  nlohmann::json to_json() const;

 private:
  CompactField(GroupSpec g, Domain dom, double amplitude, std::uint64_t seed);

  GroupSpec group_;
  Domain domain_;
  double amplitude_;
  std::uint64_t seed_;
  Generator generator_ = Generator::Zero;
  Bump bump_;
  std::vector<Polynomial> polys_;

  // amplitude * bump * poly[k] and its first two derivatives
  double scalar(int k, const Vec& x) const;
  Vec scalar_gradient(int k, const Vec& x) const;
  Mat scalar_hessian(int k, const Vec& x) const;
};

// Spec-facing name for CompactField::sample.
inline CompactField sample_field(const GroupSpec& g, const Domain& dom,
                                 double amplitude, std::uint64_t seed) {
  return CompactField::sample(g, dom, amplitude, seed);
}

}  // namespace nullag

#endif
