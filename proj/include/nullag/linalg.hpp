#ifndef NULLAG_LINALG_HPP
#define NULLAG_LINALG_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <vector>

namespace nullag {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Pairing convention used throughout: <A,B> = sum_ij A_ij B_ij.
inline double frobenius_dot(const Mat& a, const Mat& b) {
  return (a.array() * b.array()).sum();
}

// Canonical symplectic matrix on R^n, n = 2m: [[0, I_m], [-I_m, 0]].
inline Mat symplectic_form(int n) {
  const int m = n / 2;
  Mat w = Mat::Zero(n, n);
  w.block(0, m, m, m) = Mat::Identity(m, m);
  w.block(m, 0, m, m) = -Mat::Identity(m, m);
  return w;
}

// Scaling-and-squaring Pade exponential (Eigen's implementation).
inline Mat matrix_exp(const Mat& h) { return h.exp(); }

// Deterministic reduction independent of how the terms were produced.
double pairwise_sum(const std::vector<double>& terms);

inline bool all_finite(const Mat& m) { return m.allFinite(); }
inline bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace nullag

#endif
