#ifndef NULLAG_GROUPS_HPP
#define NULLAG_GROUPS_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include "nullag/linalg.hpp"
#include "nullag/rng.hpp"

namespace nullag {

enum class GroupTag { GeneralLinear, SpecialLinear, Symplectic, Conformal };

// Relative tolerance on constraint residuals for membership tests.
inline constexpr double kGroupTol = 1e-9;

/** One of the four matrix group families, together with the ambient
 *  dimension. Symplectic requires n even. */
struct GroupSpec {
  GroupTag tag;
  int n;

  GroupSpec(GroupTag t, int dim);

  static GroupSpec general_linear(int n) { return {GroupTag::GeneralLinear, n}; }
  static GroupSpec special_linear(int n) { return {GroupTag::SpecialLinear, n}; }
  static GroupSpec symplectic(int n) { return {GroupTag::Symplectic, n}; }
  static GroupSpec conformal(int n) { return {GroupTag::Conformal, n}; }

  // "gl:2", "sl:3", "sp:2", "conf:2"
  static GroupSpec parse(std::string_view text);
  std::string str() const;

  bool operator==(const GroupSpec& o) const { return tag == o.tag && n == o.n; }
};

/** Size of the group-constraint residual of F:
 *    GL    0 if det F > 0, else 1
 *    SL    |det F - 1|
 *    Sp    ||F w F^T - w||_F / sqrt(n)
 *    Conf  ||F F^T / (det F)^(2/n) - I||_F  (1 if det F <= 0)
 */
double membership_residual(const GroupSpec& g, const Mat& F);

bool member(const GroupSpec& g, const Mat& F, double tol = kGroupTol);

/** Lie algebra constraint residual of H:
 *    GL    0
 *    SL    |tr H|
 *    Sp    ||H w + w H^T||_F / sqrt(n)
 *    Conf  ||sym(H) - (tr H / n) I||_F
 */
double algebra_residual(const GroupSpec& g, const Mat& H);

bool algebra_member(const GroupSpec& g, const Mat& H, double tol = kGroupTol);

/** Draws an algebra element with entries of order one (entries seeded
 *  in [-1,1], then projected onto the constraint). */
Mat random_algebra_element(const GroupSpec& g, Rng& rng);

/** exp(scale * H) for a seeded random algebra element H; always passes
 *  member() for the given group. Deterministic per seed. */
Mat random_element(const GroupSpec& g, double scale, std::uint64_t seed);

}  // namespace nullag

#endif
