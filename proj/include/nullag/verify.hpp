#ifndef NULLAG_VERIFY_HPP
#define NULLAG_VERIFY_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nullag/calculus.hpp"
#include "nullag/fields.hpp"
#include "nullag/flows.hpp"
#include "nullag/lagrangians.hpp"
#include "nullag/quadrature.hpp"

namespace nullag {

/** Campaign decision thresholds; every value can be overridden from
 *  the CLI (--tol-override key=val). */
struct Tolerances {
  double group = kGroupTol;         // "group": membership residual
  double null_tol = 1e-5;           // "null": consistency floor
  double falsify_factor = 10.0;     // "falsify": defect > k * estimate
  double consistency_factor = 3.0;  // "consist": defect <= k * estimate
  double tangency_limit = 1e-6;     // "tangency": probe residual gate
  double d_squared = 1e-6;          // "d2": D^2 residual bound

  void apply_override(const std::string& key, double value);
};

enum class Verdict { ConsistentNull, FalsifiedNull, Inconclusive };
const char* verdict_name(Verdict v);

struct TrialRecord {
  std::uint64_t seed = 0;
  double defect = 0.0;
  double error_estimate = 0.0;
  double worst_membership_residual = 0.0;
};

struct CampaignReport {
  std::string campaign;
  std::string group;
  std::string lagrangian;
  std::vector<TrialRecord> trials;
  Verdict verdict = Verdict::Inconclusive;
  double tolerance = 0.0;
  bool evidence_only = false;
  // least-squares distance to the span of minors (evidence campaigns)
  bool fit_performed = false;
  double fit_residual = 0.0;

  nlohmann::json to_json() const;
};

Verdict decide_verdict(const std::vector<TrialRecord>& trials, const Tolerances& tol);

struct InvarianceResult {
  double defect = 0.0;
  double error_estimate = 0.0;
  double worst_membership_residual = 0.0;
};

/** |I_W(u o phi) - I_W(u)| over the box, computed as one quadrature of
 *  the pointwise difference (the integrands agree identically wherever
 *  phi fixes x). Group membership of the composed Jacobian is probed
 *  at the contributing quadrature nodes plus 32 seeded random points;
 *  a residual above the tangency limit raises tangency_violation. */
InvarianceResult invariance_defect(const Lagrangian& w, const MapPtr& u,
                                   const MapPtr& phi, const Domain& dom,
                                   const Tolerances& tol = Tolerances());

/** Periodic rescaling of a compactly supported map of the unit cube at
 *  corner x1: on the cube of side 1/h at x1 the map is
 *  x + (phi - id)(wrap(h k (x - x1) + x1)) / (h k), elsewhere the
 *  identity. The Jacobian is grad(phi) at the wrapped argument. */
MapPtr rescaled_map(const MapPtr& phi, const Vec& x1, double h, int k,
                    const Domain& omega);

struct RescaleRow {
  int k = 0;
  double integral = 0.0;
  double target = 0.0;
  double defect = 0.0;
  double est_order = 0.0;  // NaN on the first row
  double error_estimate = 0.0;
};

/** Convergence table for I(psi o phi_{h,k}; Q_h) against the double
 *  integral of W(x, psi(x), grad(psi)(x) grad(phi)(y)) over Q_h x Q_1. */
std::vector<RescaleRow> rescaling_limit_check(const Lagrangian& w, const MapPtr& psi,
                                              const FlowMap& phi, double h,
                                              const std::vector<int>& k_list,
                                              const Domain& omega);

/** Residuals of the second-order system satisfied by W restricted to
 *  the chart F = [[X, Y], [Z, (1+YZ)/X]] of the special linear group:
 *    r0 = g_xx X^2 - 2 g_yz (1+YZ)
 *    r1 = g_xz X + g_yz Y
 *    r2 = g_xy X + g_yz Z
 *    r3 = g_yy
 *    r4 = g_zz
 *  for g(X,Y,Z) = W(F(X,Y,Z)); affine W solves the system. */
Eigen::Matrix<double, 5, 1> sl2_pde_residuals(const Lagrangian& w, double X,
                                              double Y, double Z);

/** Line integral of (phi^* alpha - alpha) along a closed polyline;
 *  zero whenever the pulled-back form differs by an exact form. */
double differential_invariant_defect(const DifferentialForm& alpha,
                                     const MapPtr& phi, const std::vector<Vec>& loop,
                                     const Domain& dom);

std::vector<Vec> circle_loop(const Vec& center, double radius, int segments = 128);

/** Invariance campaign of one lagrangian against seeded flows of one
 *  group; u = id per trial. */
CampaignReport null_campaign(const Lagrangian& w, const GroupSpec& g,
                             const Domain& dom, int trials, std::uint64_t seed,
                             double amplitude, const Tolerances& tol = Tolerances());

struct CalabiReport {
  CampaignReport symplectic_half;
  CampaignReport general_half;
  nlohmann::json to_json() const;
};

/** The pullback component of y dx under seeded symplectic flows
 *  (expected invariant) and general linear flows (expected falsified). */
CalabiReport calabi_component_campaign(const Vec& v, const Domain& dom,
                                       int trials = 20, std::uint64_t seed = 1,
                                       double amplitude = 0.5,
                                       const Tolerances& tol = Tolerances());

/** If the null campaign is consistent, least-squares fit of W by a
 *  combination of minors on sampled group elements; reported as
 *  EVIDENCE, never as a proof. */
CampaignReport conjecture_evidence(const Lagrangian& w, const GroupSpec& g,
                                   int trials, std::uint64_t seed, const Domain& dom,
                                   double amplitude = 0.5,
                                   const Tolerances& tol = Tolerances());

}  // namespace nullag

#endif
