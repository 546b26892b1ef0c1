#ifndef NULLAG_LAGRANGIANS_HPP
#define NULLAG_LAGRANGIANS_HPP

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nullag/groups.hpp"
#include "nullag/linalg.hpp"

namespace nullag {

/** Selects a square subdeterminant of an n x n matrix: the minor over
 *  `rows` x `cols` (ascending, equal length). Empty index lists give
 *  the order-zero minor, the constant 1. */
struct MinorIndex {
  std::vector<int> rows;
  std::vector<int> cols;

  static MinorIndex full(int n);  // the determinant
  std::string str() const;        // "c", "11", "12|12", "det:n"
};

double minor_value(const Mat& F, const MinorIndex& mi);
Mat minor_gradient(const Mat& F, const MinorIndex& mi);
// Every minor of an n x n matrix, orders 0..n (the fit basis used by
// the evidence campaigns).
std::vector<MinorIndex> all_minors(int n);

/** Constant-coefficient differential r-form on R^n: a sum of terms
 *  c(y) dy^{i1} ^ ... ^ dy^{ir} with ascending index tuples. */
struct FormTerm {
  std::vector<int> indices;                  // ascending, 0-based
  std::function<double(const Vec&)> coeff;
  std::function<Vec(const Vec&)> coeff_gradient;  // may be empty (constant)
};

struct DifferentialForm {
  int n = 0;       // ambient dimension
  int degree = 0;  // r
  std::vector<FormTerm> terms;

  static DifferentialForm constant_one_form(int n, const Vec& coeffs);
  // y dx on R^2 with coordinates (x, y): the single term y[1] dy^0.
  static DifferentialForm calabi(int n = 2);
  static DifferentialForm volume_2form_2d();  // dx ^ dy on R^2

  // alpha(x) applied to `degree` many tangent vectors
  double apply(const Vec& x, const std::vector<Vec>& vs) const;
};

/** Potential W(x, y, F) with first and second derivatives in F.
 *  Built-in families carry analytic first derivatives; for everything
 *  else derivatives fall back to central finite differences with step
 *  1e-6 * max(1, |F|). Values are defined on all of R^{nxn} (the
 *  polynomial formulas extend off the group); a non-finite evaluation
 *  raises domain_error. */
class Lagrangian {
 public:
  enum class Kind { Minors, Affine, DetWeightedAffine, Quadratic, Pullback, Custom };

  using ValueFn = std::function<double(const Vec& x, const Vec& y, const Mat& F)>;
  using GradFn = std::function<Mat(const Vec& y, const Mat& F)>;
  using YGradFn = std::function<Vec(const Vec& y, const Mat& F)>;
  using ScalarFn = std::function<double(double)>;
  using MatrixFn = std::function<Mat(double)>;

  static Lagrangian constant(double c, GroupSpec g);
  static Lagrangian component(int i, int j, GroupSpec g);  // W = F_ij, 0-based
  static Lagrangian affine(const Mat& a, double b, GroupSpec g);
  static Lagrangian quadratic(const Mat& c, GroupSpec g);  // sum c_ij F_ij^2
  static Lagrangian frobenius_sq(GroupSpec g);
  static Lagrangian determinant(GroupSpec g);
  static Lagrangian minors(const std::vector<std::pair<MinorIndex, double>>& terms,
                           GroupSpec g);
  // W(F) = a_ij(det F) F_ij + b(det F); da, db are the derivatives.
  static Lagrangian det_weighted_affine(MatrixFn a, MatrixFn da, ScalarFn b,
                                        ScalarFn db, GroupSpec g);
  // W(y, F) = alpha(y)(F v_1, ..., F v_r)
  static Lagrangian pullback_potential(const DifferentialForm& alpha,
                                       const std::vector<Vec>& vs, GroupSpec g);
  static Lagrangian calabi_component(const Vec& v, GroupSpec g);
  static Lagrangian custom(std::string name, ValueFn fn, GroupSpec g,
                           bool homogeneous);

  /** CLI names: det | frob2 | calabi | comp11sq | const:<c> | comp:<ij> |
   *  comp<ij>sq | affine:<a11,...,ann>:<b> | minor:<key>=<c>,... with keys
   *  c, det, <ij>, <r1r2>|<c1c2> (1-based digits). */
  static Lagrangian from_string(std::string_view text, const GroupSpec& g);

  double eval(const Vec& x, const Vec& y, const Mat& F) const;
  Mat dF(const Vec& y, const Mat& F) const;
  Vec dy(const Vec& y, const Mat& F) const;
  // d^2/dt^2 W(F + tG) at t=0; exact for the polynomial families
  // (degree <= 3), second-order finite differences otherwise.
  double second_directional(const Vec& y, const Mat& F, const Mat& G) const;

  const std::string& name() const { return name_; }
  const GroupSpec& group() const { return group_; }
  Kind kind() const { return kind_; }
  bool homogeneous() const { return homogeneous_; }
  bool has_analytic_gradient() const { return static_cast<bool>(grad_); }
  int polynomial_degree() const { return poly_degree_; }  // -1: not polynomial

 private:
  Lagrangian(std::string name, GroupSpec g, Kind kind);

  std::string name_;
  GroupSpec group_;
  Kind kind_;
  bool homogeneous_ = true;
  int poly_degree_ = -1;
  ValueFn value_;
  GradFn grad_;
  YGradFn ygrad_;
};

// Spec-facing names.
inline Lagrangian minors_lagrangian(
    const std::vector<std::pair<MinorIndex, double>>& coeffs, GroupSpec g) {
  return Lagrangian::minors(coeffs, g);
}
inline Lagrangian pullback_potential(const DifferentialForm& alpha,
                                     const std::vector<Vec>& vs, GroupSpec g) {
  return Lagrangian::pullback_potential(alpha, vs, g);
}

/** Constant differential form of order `degree` over the Lie algebra:
 *  an alternating multilinear functional of `degree` algebra matrices,
 *  with (y, F) as parameters. */
struct AlgebraForm {
  int degree = 1;
  std::function<double(const Vec& y, const Mat& F, const std::vector<Mat>& hs)>
      eval;

  double operator()(const Vec& y, const Mat& F, const std::vector<Mat>& hs) const {
    return eval(y, F, hs);
  }
};

}  // namespace nullag

#endif
