#include "nullag/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "nullag/errors.hpp"

namespace nullag {

void Tolerances::apply_override(const std::string& key, double value) {
  if (key == "group") group = value;
  else if (key == "null") null_tol = value;
  else if (key == "falsify") falsify_factor = value;
  else if (key == "consist") consistency_factor = value;
  else if (key == "tangency") tangency_limit = value;
  else if (key == "d2") d_squared = value;
  else throw std::invalid_argument("unknown tolerance key \"" + key + "\"");
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::ConsistentNull: return "consistent-null";
    case Verdict::FalsifiedNull: return "falsified-null";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict decide_verdict(const std::vector<TrialRecord>& trials,
                       const Tolerances& tol) {
  bool all_consistent = true;
  for (const auto& t : trials) {
    if (t.defect > std::max(tol.falsify_factor * t.error_estimate, tol.null_tol))
      return Verdict::FalsifiedNull;
    if (t.defect > std::max(tol.null_tol, tol.consistency_factor * t.error_estimate))
      all_consistent = false;
  }
  return all_consistent ? Verdict::ConsistentNull : Verdict::Inconclusive;
}

nlohmann::json CampaignReport::to_json() const {
  nlohmann::json j;
  j["campaign"] = campaign;
  j["group"] = group;
  j["lagrangian"] = lagrangian;
  j["verdict"] = verdict_name(verdict);
  j["tolerance"] = tolerance;
  if (evidence_only) {
    j["label"] = "EVIDENCE";
    j["fit_performed"] = fit_performed;
    if (fit_performed) j["fit_residual"] = fit_residual;
  }
  j["trials"] = nlohmann::json::array();
  for (const auto& t : trials) {
    j["trials"].push_back({{"seed", t.seed},
                           {"defect", t.defect},
                           {"error_estimate", t.error_estimate},
                           {"worst_membership_residual",
                            t.worst_membership_residual}});
  }
  return j;
}

// ------------------------------------------------------------ invariance

namespace {

// lock-free max accumulator; the maximum is order-independent, so the
// result stays deterministic under concurrent updates
void atomic_max(std::atomic<double>& slot, double value) {
  double seen = slot.load(std::memory_order_relaxed);
  while (value > seen &&
         !slot.compare_exchange_weak(seen, value, std::memory_order_relaxed)) {
  }
}

constexpr std::uint64_t kProbeSeed = 0x9e3779b97f4a7c15ull;

}  // namespace

InvarianceResult invariance_defect(const Lagrangian& w, const MapPtr& u,
                                   const MapPtr& phi, const Domain& dom,
                                   const Tolerances& tol) {
  const GroupSpec g = w.group();
  std::atomic<double> worst{0.0};

  const Integrand difference = [&](const Vec& x) {
    if (phi->fixes(x)) return 0.0;
    const auto [px, jp] = phi->eval_with_jacobian(x);
    const auto [upx, jup] = u->eval_with_jacobian(px);
    const Mat jc = jup * jp;
    atomic_max(worst, membership_residual(g, jc));
    const auto [ux, ju] = u->eval_with_jacobian(x);
    atomic_max(worst, membership_residual(g, ju));
    return w.eval(x, upx, jc) - w.eval(x, ux, ju);
  };

  const IntegralResult integral = integrate_with_estimate(difference, dom);

  // 32 seeded probe points across the whole box
  Rng rng(kProbeSeed);
  for (int p = 0; p < 32; ++p) {
    Vec x(dom.dim());
    for (int d = 0; d < dom.dim(); ++d)
      x[d] = rng.uniform(dom.lower[d], dom.upper[d]);
    const auto [px, jp] = phi->eval_with_jacobian(x);
    const auto [upx, jup] = u->eval_with_jacobian(px);
    (void)upx;
    atomic_max(worst, membership_residual(g, jup * jp));
    atomic_max(worst, membership_residual(g, u->jacobian(x)));
  }

  InvarianceResult out;
  out.defect = std::abs(integral.value);
  out.worst_membership_residual = worst.load();
  out.error_estimate = integral.error_estimate + out.worst_membership_residual;
  if (out.worst_membership_residual > tol.tangency_limit)
    throw tangency_violation("membership residual " +
                             std::to_string(out.worst_membership_residual) +
                             " at a probe point");
  return out;
}

// --------------------------------------------------------- rescaled map

namespace {

class PeriodicRescaledMap final : public Map {
 public:
  PeriodicRescaledMap(MapPtr base, Vec x1, double h, int k)
      : base_(std::move(base)), x1_(std::move(x1)), h_(h), k_(k) {}

  int dim() const override { return base_->dim(); }

  bool inside(const Vec& x) const {
    for (int d = 0; d < x.size(); ++d)
      if (x[d] <= x1_[d] || x[d] >= x1_[d] + 1.0 / h_) return false;
    return true;
  }

  // wraps h k (x - x1) + x1 back into the unit cube at x1
  Vec wrapped(const Vec& x) const {
    Vec z = h_ * k_ * (x - x1_);
    for (int d = 0; d < z.size(); ++d) z[d] -= std::floor(z[d]);
    return x1_ + z;
  }

  Vec eval(const Vec& x) const override {
    if (!inside(x)) return x;
    const Vec warg = wrapped(x);
    return x + (base_->eval(warg) - warg) / (h_ * k_);
  }

  Mat jacobian(const Vec& x) const override {
    if (!inside(x)) return Mat::Identity(dim(), dim());
    return base_->jacobian(wrapped(x));
  }

  std::pair<Vec, Mat> eval_with_jacobian(const Vec& x) const override {
    if (!inside(x)) return {x, Mat::Identity(dim(), dim())};
    const Vec warg = wrapped(x);
    auto [val, jac] = base_->eval_with_jacobian(warg);
    return {x + (val - warg) / (h_ * k_), std::move(jac)};
  }

  bool fixes(const Vec& x) const override {
    if (!inside(x)) return true;
    return base_->fixes(wrapped(x));
  }

 private:
  MapPtr base_;
  Vec x1_;
  double h_;
  int k_;
};

}  // namespace

MapPtr rescaled_map(const MapPtr& phi, const Vec& x1, double h, int k,
                    const Domain& omega) {
  if (!(h > 0.0) || k < 1) throw std::invalid_argument("need h > 0 and k >= 1");
  if (x1.size() != omega.dim())
    throw std::invalid_argument("corner dimension mismatch");
  const Vec hi = x1 + Vec::Constant(omega.dim(), 1.0 / h);
  for (int d = 0; d < omega.dim(); ++d)
    if (x1[d] < omega.lower[d] - 1e-12 || hi[d] > omega.upper[d] + 1e-12)
      throw std::invalid_argument("rescaling cube not inside the domain");
  return std::make_shared<PeriodicRescaledMap>(phi, x1, h, k);
}

std::vector<RescaleRow> rescaling_limit_check(const Lagrangian& w, const MapPtr& psi,
                                              const FlowMap& phi, double h,
                                              const std::vector<int>& k_list,
                                              const Domain& omega) {
  const int n = omega.dim();
  const Domain& q1 = phi.field().domain();
  if ((q1.side() - Vec::Ones(n)).norm() > 1e-9)
    throw std::invalid_argument("phi must be a flow of a unit-cube field");
  const Vec x1 = q1.lower;
  const Domain qh(x1, x1 + Vec::Constant(n, 1.0 / h), omega.resolution);
  for (int d = 0; d < n; ++d)
    if (qh.lower[d] < omega.lower[d] - 1e-12 || qh.upper[d] > omega.upper[d] + 1e-12)
      throw std::invalid_argument("rescaling cube not inside the domain");

  const MapPtr phi_ptr = std::make_shared<FlowMap>(phi);

  // target: int over Q_h of int over Q_1 of W(x, psi(x), grad psi(x) grad phi(y))
  const auto target_at = [&](int res) {
    const Domain inner = q1.with_resolution(res);
    std::vector<std::pair<Mat, double>> jphi;
    for (const auto& [y, wt] : quadrature_nodes(inner))
      jphi.emplace_back(phi.jacobian(y), wt);
    const Integrand f = [&](const Vec& x) {
      const auto [px, jpsi] = psi->eval_with_jacobian(x);
      double acc = 0.0;
      for (const auto& [jp, wt] : jphi) acc += wt * w.eval(x, px, jpsi * jp);
      return acc;
    };
    return integrate(f, qh.with_resolution(res));
  };

  const double target = target_at(omega.resolution);
  const double target_coarse = target_at(std::max(8, omega.resolution / 2));
  const double target_err = std::abs(target - target_coarse);

  std::vector<RescaleRow> rows;
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    const int k = k_list[i];
    const MapPtr composed =
        compose({psi, rescaled_map(phi_ptr, x1, h, k, omega)});
    const Integrand f = [&](const Vec& x) {
      const auto [cx, jc] = composed->eval_with_jacobian(x);
      return w.eval(x, cx, jc);
    };
    const IntegralResult integral = integrate_with_estimate(f, qh);

    RescaleRow row;
    row.k = k;
    row.integral = integral.value;
    row.target = target;
    row.defect = std::abs(integral.value - target);
    row.error_estimate = integral.error_estimate + target_err;
    if (i == 0 || rows.back().defect <= 0.0 || row.defect <= 0.0 ||
        k == k_list[i - 1]) {
      row.est_order = std::numeric_limits<double>::quiet_NaN();
    } else {
      row.est_order = std::log(rows.back().defect / row.defect) /
                      std::log(double(k) / double(k_list[i - 1]));
    }
    rows.push_back(row);
  }
  return rows;
}

// ------------------------------------------------------------- SL2 PDEs

Eigen::Matrix<double, 5, 1> sl2_pde_residuals(const Lagrangian& w, double X,
                                              double Y, double Z) {
  if (std::abs(X) < 1e-6)
    throw chart_singularity("chart needs |X| >= 1e-6, got " + std::to_string(X));
  const Vec y0 = Vec::Zero(2);
  const auto g = [&](double xx, double yy, double zz) {
    Mat f(2, 2);
    f << xx, yy, zz, (1.0 + yy * zz) / xx;
    return w.eval(y0, y0, f);
  };
  const double s = 1e-4 * std::max({1.0, std::abs(X), std::abs(Y), std::abs(Z)});
  const double g0 = g(X, Y, Z);

  const double gxx = (g(X + s, Y, Z) - 2.0 * g0 + g(X - s, Y, Z)) / (s * s);
  const double gyy = (g(X, Y + s, Z) - 2.0 * g0 + g(X, Y - s, Z)) / (s * s);
  const double gzz = (g(X, Y, Z + s) - 2.0 * g0 + g(X, Y, Z - s)) / (s * s);
  const auto mixed = [&](int first, int second) {
    auto shift = [&](double sa, double sb) {
      double xx = X, yy = Y, zz = Z;
      (first == 0 ? xx : (first == 1 ? yy : zz)) += sa;
      (second == 0 ? xx : (second == 1 ? yy : zz)) += sb;
      return g(xx, yy, zz);
    };
    return (shift(s, s) - shift(s, -s) - shift(-s, s) + shift(-s, -s)) /
           (4.0 * s * s);
  };
  const double gyz = mixed(1, 2);
  const double gxy = mixed(0, 1);
  const double gxz = mixed(0, 2);

  Eigen::Matrix<double, 5, 1> r;
  r[0] = gxx * X * X - 2.0 * gyz * (1.0 + Y * Z);
  r[1] = gxz * X + gyz * Y;
  r[2] = gxy * X + gyz * Z;
  r[3] = gyy;
  r[4] = gzz;
  return r;
}

// ----------------------------------------------- differential invariants

std::vector<Vec> circle_loop(const Vec& center, double radius, int segments) {
  std::vector<Vec> loop;
  loop.reserve(segments);
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * M_PI * i / segments;
    Vec v = center;
    v[0] += radius * std::cos(a);
    v[1] += radius * std::sin(a);
    loop.push_back(v);
  }
  return loop;
}

double differential_invariant_defect(const DifferentialForm& alpha,
                                     const MapPtr& phi, const std::vector<Vec>& loop,
                                     const Domain& dom) {
  if (alpha.degree != 1)
    throw std::invalid_argument("loop integrals take a one-form");
  if (loop.size() < 3) throw std::invalid_argument("loop needs >= 3 vertices");
  for (const auto& v : loop)
    if (!dom.contains(v)) throw std::invalid_argument("loop leaves the domain");

  // 4-point Gauss-Legendre on each closing segment
  static const double nodes[4] = {-0.86113631159405257, -0.33998104358485626,
                                  0.33998104358485626, 0.86113631159405257};
  static const double weights[4] = {0.34785484513745386, 0.65214515486254614,
                                    0.65214515486254614, 0.34785484513745386};

  std::vector<double> contributions;
  const std::size_t m = loop.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec& p = loop[i];
    const Vec& q = loop[(i + 1) % m];
    const Vec tangent = q - p;
    double seg = 0.0;
    for (int t = 0; t < 4; ++t) {
      const double sarg = 0.5 * (nodes[t] + 1.0);
      const Vec x = p + sarg * tangent;
      const auto [px, jp] = phi->eval_with_jacobian(x);
      const double pulled = alpha.apply(px, {jp * tangent});
      const double base = alpha.apply(x, {tangent});
      seg += 0.5 * weights[t] * (pulled - base);
    }
    contributions.push_back(seg);
  }
  return pairwise_sum(contributions);
}

// -------------------------------------------------------------- campaigns

namespace {

// Richardson step in the flow integrator: rerun the defect with half
// the RK4 substeps and treat the difference as integrator error.
double plain_defect(const Lagrangian& w, const MapPtr& u, const MapPtr& phi,
                    const Domain& dom) {
  const Integrand difference = [&](const Vec& x) {
    if (phi->fixes(x)) return 0.0;
    const auto [px, jp] = phi->eval_with_jacobian(x);
    const auto [upx, jup] = u->eval_with_jacobian(px);
    const auto [ux, ju] = u->eval_with_jacobian(x);
    return w.eval(x, upx, jup * jp) - w.eval(x, ux, ju);
  };
  return std::abs(integrate(difference, dom));
}

}  // namespace

CampaignReport null_campaign(const Lagrangian& w, const GroupSpec& g,
                             const Domain& dom, int trials, std::uint64_t seed,
                             double amplitude, const Tolerances& tol) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  CampaignReport report;
  report.campaign = "verify-null";
  report.group = g.str();
  report.lagrangian = w.name();
  report.tolerance = tol.null_tol;

  const MapPtr id = identity_map(g.n);
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t trial_seed = seed + static_cast<std::uint64_t>(i);
    const CompactField field = CompactField::sample(g, dom, amplitude, trial_seed);
    const MapPtr flow = flow_map(field, 1.0);
    InvarianceResult r = invariance_defect(w, id, flow, dom, tol);
    const MapPtr coarse_flow = flow_map(field, 1.0, FlowMap::kDefaultSubsteps / 2);
    const double coarse = plain_defect(w, id, coarse_flow, dom);
    TrialRecord record;
    record.seed = trial_seed;
    record.defect = r.defect;
    record.worst_membership_residual = r.worst_membership_residual;
    record.error_estimate = r.error_estimate + std::abs(r.defect - coarse);
    report.trials.push_back(record);
  }
  report.verdict = decide_verdict(report.trials, tol);
  return report;
}

nlohmann::json CalabiReport::to_json() const {
  nlohmann::json j;
  j["campaign"] = "calabi-component";
  j["halves"] = {symplectic_half.to_json(), general_half.to_json()};
  return j;
}

CalabiReport calabi_component_campaign(const Vec& v, const Domain& dom, int trials,
                                       std::uint64_t seed, double amplitude,
                                       const Tolerances& tol) {
  if (v.norm() == 0.0) throw std::invalid_argument("direction must be nonzero");
  if (dom.dim() != 2)
    throw std::invalid_argument("the Calabi form lives on a planar domain");
  CalabiReport out;
  const Lagrangian w_sp =
      Lagrangian::calabi_component(v, GroupSpec::symplectic(2));
  out.symplectic_half =
      null_campaign(w_sp, GroupSpec::symplectic(2), dom, trials, seed, amplitude, tol);
  out.symplectic_half.campaign = "calabi-sp";
  const Lagrangian w_gl =
      Lagrangian::calabi_component(v, GroupSpec::general_linear(2));
  out.general_half = null_campaign(w_gl, GroupSpec::general_linear(2), dom, trials,
                                   seed, amplitude, tol);
  out.general_half.campaign = "calabi-gl";
  return out;
}

CampaignReport conjecture_evidence(const Lagrangian& w, const GroupSpec& g,
                                   int trials, std::uint64_t seed, const Domain& dom,
                                   double amplitude, const Tolerances& tol) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!w.homogeneous())
    throw std::invalid_argument("evidence fits homogeneous potentials only");
  CampaignReport report = null_campaign(w, g, dom, trials, seed, amplitude, tol);
  report.campaign = "conjecture-evidence";
  report.evidence_only = true;
  if (report.verdict != Verdict::ConsistentNull) return report;

  // fit W on sampled group elements by a combination of minors
  const std::vector<MinorIndex> basis = all_minors(g.n);
  const int cols = static_cast<int>(basis.size());
  const int samples = 10 * trials;
  if (samples < cols)
    throw needs_more_samples("fit needs >= " + std::to_string(cols) +
                             " samples, have " + std::to_string(samples));
  Rng rng(seed ^ 0x5bf03635u);
  Mat design(samples, cols);
  Vec rhs(samples);
  const Vec y0 = Vec::Zero(g.n);
  for (int s = 0; s < samples; ++s) {
    const Mat f = matrix_exp(0.5 * random_algebra_element(g, rng));
    for (int c = 0; c < cols; ++c) design(s, c) = minor_value(f, basis[c]);
    rhs[s] = w.eval(y0, y0, f);
  }
  const Vec coeff = design.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
  report.fit_performed = true;
  report.fit_residual = (design * coeff - rhs).cwiseAbs().maxCoeff();
  return report;
}

}  // namespace nullag
