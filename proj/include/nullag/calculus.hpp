#ifndef NULLAG_CALCULUS_HPP
#define NULLAG_CALCULUS_HPP

#include <cstdint>
#include <vector>

#include "nullag/fields.hpp"
#include "nullag/flows.hpp"
#include "nullag/lagrangians.hpp"
#include "nullag/quadrature.hpp"

namespace nullag {

/** Degree-raising derivation on potentials:
 *    D0 w (y,F) H = w(y,F) tr H - < dW/dF(y,F), F H >
 *  with (FH)_ij = F_ik H_kj and <A,B> = sum A_ij B_ij. */
double D0(const Lagrangian& w, const Vec& y, const Mat& F, const Mat& H);

AlgebraForm D0_form(const Lagrangian& w);

/** Degree-1 to degree-2 derivation:
 *    D1 w (y,F)(H,P) = D0(w(.)H)(y,F) P - D0(w(.)P)(y,F) H + w(y,F)([P,H])
 *  where w(.)H is the scalar obtained by freezing the algebra slot and
 *  [P,H] = PH - HP. F-derivatives of the frozen scalars go through the
 *  finite-difference path of a wrapped potential. */
double D1(const AlgebraForm& w, const Vec& y, const Mat& F, const Mat& H,
          const Mat& P);

AlgebraForm D1_form(const AlgebraForm& w);

/** max |D1(D0 w)(y,F,H,P)| over seeded samples with y in the unit box,
 *  F a random group element and H, P algebra elements; a numeric
 *  witness for D^2 = 0. */
double d_squared_residual(const Lagrangian& w, int samples, std::uint64_t seed);

/** Pointwise classical Euler-Lagrange operator
 *    E_j = d/dy_j W(u,grad u) - d/dx_i [ dW/dF_ij (u, grad u) ]
 *  with the divergence taken by central differences of step h_el
 *  (default 1e-4 * min side). */
Vec classical_el(const Lagrangian& w, const Map& u, const Vec& x,
                 const Domain& dom, double h_el = -1.0);

struct ElPairing {
  double pairing = 0.0;          // integral of E_j(x) grad(u)_jk eta_k
  double pairing_error = 0.0;    // FD-step + quadrature refinement estimate
  double flow_derivative = 0.0;  // d/dt I_W(u o phi_{-t}) at t = 0
  double flow_error = 0.0;
};

/** Euler-Lagrange pairing of W against a tangent field, computed both
 *  through the classical operator and through the t-derivative of the
 *  composed variational integral; the two must agree. */
ElPairing el_pairing(const Lagrangian& w, const MapPtr& u,
                     const CompactField& eta, const Domain& dom);

/** Rank-one contraction of the second F-derivative:
 *    sum d2W/dF_ij dF_kl a_i a_k b_j b_l  =  d^2/dt^2 W(F + t a b^T). */
double legendre_hadamard(const Lagrangian& w, const Mat& F, const Vec& a,
                         const Vec& b);

struct SecondVariation {
  double value = 0.0;
  double error_estimate = 0.0;
};

/** d^2/dt^2 of t -> integral of W(F grad phi_{-t}(x)) dx at t = 0 by a
 *  5-point stencil (delta_t = 1e-3); zero for null lagrangians. */
SecondVariation second_variation_residual(const Lagrangian& w, const Mat& F,
                                          const CompactField& eta,
                                          const Domain& dom);

/** RMS deviation of t -> W(F (I + t a b^T)) from its best affine fit
 *  over the given t grid; requires a.b = 0 so the argument stays in
 *  the special linear group. */
double rank_one_linearity_defect(const Lagrangian& w, const Mat& F, const Vec& a,
                                 const Vec& b, const std::vector<double>& t_grid);

}  // namespace nullag

#endif
