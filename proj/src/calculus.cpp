#include "nullag/calculus.hpp"

#include <cmath>
#include <stdexcept>

#include "nullag/errors.hpp"

namespace nullag {

namespace {

void require_algebra(const GroupSpec& g, const Mat& h, const char* what) {
  const double tol = 1e-8 * std::max(1.0, h.norm());
  if (algebra_residual(g, h) > tol)
    throw std::invalid_argument(std::string(what) + " is not a Lie algebra element");
}

}  // namespace

double D0(const Lagrangian& w, const Vec& y, const Mat& F, const Mat& H) {
  require_algebra(w.group(), H, "H");
  const Vec x0 = Vec::Zero(w.group().n);
  return w.eval(x0, y, F) * H.trace() - frobenius_dot(w.dF(y, F), F * H);
}

AlgebraForm D0_form(const Lagrangian& w) {
  return AlgebraForm{1, [w](const Vec& y, const Mat& F, const std::vector<Mat>& hs) {
                       return D0(w, y, F, hs[0]);
                     }};
}

namespace {

// The scalar (y,F) -> w(y,F)(H) for frozen H, wrapped so that its
// F-derivative goes through the central-difference machinery.
Lagrangian freeze_slot(const AlgebraForm& w, const Mat& h, int n) {
  return Lagrangian::custom(
      "frozen",
      [w, h](const Vec&, const Vec& y, const Mat& F) { return w.eval(y, F, {h}); },
      GroupSpec::general_linear(n), /*homogeneous=*/false);
}

}  // namespace

double D1(const AlgebraForm& w, const Vec& y, const Mat& F, const Mat& H,
          const Mat& P) {
  if (w.degree != 1) throw std::invalid_argument("D1 wants a degree-1 form");
  const int n = static_cast<int>(F.rows());
  const Lagrangian frozen_h = freeze_slot(w, H, n);
  const Lagrangian frozen_p = freeze_slot(w, P, n);
  const Mat commutator = P * H - H * P;

  const auto d0_scalar = [&](const Lagrangian& s, const Mat& arg) {
    const Vec x0 = Vec::Zero(n);
    return s.eval(x0, y, F) * arg.trace() - frobenius_dot(s.dF(y, F), F * arg);
  };

  return d0_scalar(frozen_h, P) - d0_scalar(frozen_p, H) + w.eval(y, F, {commutator});
}

AlgebraForm D1_form(const AlgebraForm& w) {
  return AlgebraForm{2, [w](const Vec& y, const Mat& F, const std::vector<Mat>& hs) {
                       return D1(w, y, F, hs[0], hs[1]);
                     }};
}

double d_squared_residual(const Lagrangian& w, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const GroupSpec g = w.group();
  Rng rng(seed);
  const AlgebraForm dw = D0_form(w);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec y = rng.uniform_vec(g.n, 0.0, 1.0);
    const Mat F = matrix_exp(0.4 * random_algebra_element(g, rng));
    const Mat H = random_algebra_element(g, rng);
    const Mat P = random_algebra_element(g, rng);
    worst = std::max(worst, std::abs(D1(dw, y, F, H, P)));
  }
  return worst;
}

Vec classical_el(const Lagrangian& w, const Map& u, const Vec& x,
                 const Domain& dom, double h_el) {
  if (!dom.contains(x)) throw std::domain_error("point outside the domain");
  if (h_el <= 0.0) h_el = 1e-4 * dom.side().minCoeff();
  const int n = dom.dim();

  const auto [ux, gux] = u.eval_with_jacobian(x);
  Vec el = w.dy(ux, gux);

  Vec probe = x;
  for (int i = 0; i < n; ++i) {
    probe[i] = x[i] + h_el;
    if (!dom.contains(probe)) throw std::domain_error("difference probe left domain");
    const auto [up_y, up_g] = u.eval_with_jacobian(probe);
    const Mat a_up = w.dF(up_y, up_g);
    probe[i] = x[i] - h_el;
    if (!dom.contains(probe)) throw std::domain_error("difference probe left domain");
    const auto [dn_y, dn_g] = u.eval_with_jacobian(probe);
    const Mat a_dn = w.dF(dn_y, dn_g);
    probe[i] = x[i];
    el -= ((a_up - a_dn).row(i) / (2.0 * h_el)).transpose();
  }
  return el;
}

namespace {

double pairing_integral(const Lagrangian& w, const MapPtr& u,
                        const CompactField& eta, const Domain& dom, double h_el,
                        double* quad_estimate) {
  const Integrand f = [&](const Vec& x) {
    if (!eta.in_support(x)) return 0.0;
    const Vec el = classical_el(w, *u, x, dom, h_el);
    const auto [ux, gux] = u->eval_with_jacobian(x);
    (void)ux;
    return el.dot(gux * eta.value(x));
  };
  if (quad_estimate) {
    const IntegralResult r = integrate_with_estimate(f, dom);
    *quad_estimate = r.error_estimate;
    return r.value;
  }
  return integrate(f, dom);
}

double flow_difference_quotient(const Lagrangian& w, const MapPtr& u,
                                const CompactField& eta, const Domain& dom,
                                double delta, double* quad_estimate) {
  // d/dt I_W(u o phi_{-t}) at t=0 as one quadrature of the pointwise
  // central difference; outside the field support the two branches
  // coincide, so the integrand vanishes there identically.
  const auto back = flow_map(eta, -delta, 8);
  const auto fwd = flow_map(eta, delta, 8);
  const Integrand f = [&](const Vec& x) {
    if (!eta.in_support(x)) return 0.0;
    const auto [yb, gb] = back->eval_with_jacobian(x);
    const auto [ub, gub] = u->eval_with_jacobian(yb);
    const double w_back = w.eval(x, ub, gub * gb);
    const auto [yf, gf] = fwd->eval_with_jacobian(x);
    const auto [uf, guf] = u->eval_with_jacobian(yf);
    const double w_fwd = w.eval(x, uf, guf * gf);
    return (w_back - w_fwd) / (2.0 * delta);
  };
  if (quad_estimate) {
    const IntegralResult r = integrate_with_estimate(f, dom);
    *quad_estimate = r.error_estimate;
    return r.value;
  }
  return integrate(f, dom);
}

}  // namespace

ElPairing el_pairing(const Lagrangian& w, const MapPtr& u, const CompactField& eta,
                     const Domain& dom) {
  if (!(eta.group() == w.group()))
    throw std::invalid_argument("field group does not match the lagrangian");

  ElPairing out;
  const double h_el = 1e-4 * dom.side().minCoeff();
  double quad_a = 0.0;
  out.pairing = pairing_integral(w, u, eta, dom, h_el, &quad_a);
  const double pairing_coarse_h =
      pairing_integral(w, u, eta, dom, 2.0 * h_el, nullptr);
  out.pairing_error = std::abs(out.pairing - pairing_coarse_h) + quad_a;

  const double delta = 1e-3;
  double quad_b = 0.0;
  out.flow_derivative = flow_difference_quotient(w, u, eta, dom, delta, &quad_b);
  const double flow_coarse =
      flow_difference_quotient(w, u, eta, dom, 2.0 * delta, nullptr);
  out.flow_error = std::abs(out.flow_derivative - flow_coarse) + quad_b;
  return out;
}

double legendre_hadamard(const Lagrangian& w, const Mat& F, const Vec& a,
                         const Vec& b) {
  if (a.norm() == 0.0 || b.norm() == 0.0)
    throw std::invalid_argument("directions must be nonzero");
  const Vec y0 = Vec::Zero(w.group().n);
  return w.second_directional(y0, F, a * b.transpose());
}

SecondVariation second_variation_residual(const Lagrangian& w, const Mat& F,
                                          const CompactField& eta,
                                          const Domain& dom) {
  if (!w.homogeneous())
    throw std::invalid_argument("second variation needs a homogeneous potential");
  if (!member(w.group(), F, 1e-6))
    throw std::invalid_argument("base matrix is not in the group");
  if (eta.group().tag != w.group().tag || eta.group().n != w.group().n)
    throw std::invalid_argument("field group does not match the lagrangian");

  const Vec x0 = Vec::Zero(w.group().n);
  const double w_at_f = w.eval(x0, x0, F);

  const auto shifted_integral = [&](double t, int res) {
    const auto phi = flow_map(eta, -t, 16);
    const Integrand f = [&](const Vec& x) {
      if (!eta.in_support(x)) return 0.0;
      return w.eval(x, x0, F * phi->jacobian(x)) - w_at_f;
    };
    return integrate(f, dom.with_resolution(res));
  };

  const double dt = 1e-3;
  const auto stencil = [&](int res) {
    const double f_m2 = shifted_integral(-2.0 * dt, res);
    const double f_m1 = shifted_integral(-dt, res);
    const double f_p1 = shifted_integral(dt, res);
    const double f_p2 = shifted_integral(2.0 * dt, res);
    const double five = (-f_m2 + 16.0 * f_m1 + 16.0 * f_p1 - f_p2) / (12.0 * dt * dt);
    const double three = (f_p1 + f_m1) / (dt * dt);
    return std::pair<double, double>(five, std::abs(five - three));
  };

  const auto [value, fd_err] = stencil(dom.resolution);
  const auto [coarse, coarse_err] = stencil(std::max(8, dom.resolution / 2));
  (void)coarse_err;

  SecondVariation out;
  out.value = value;
  out.error_estimate = fd_err + std::abs(value - coarse);
  return out;
}

double rank_one_linearity_defect(const Lagrangian& w, const Mat& F, const Vec& a,
                                 const Vec& b, const std::vector<double>& t_grid) {
  if (std::abs(a.dot(b)) > 1e-12)
    throw std::invalid_argument("rank-one direction needs a.b = 0");
  if (!member(w.group(), F, 1e-6))
    throw std::invalid_argument("base matrix is not in the group");
  if (t_grid.size() < 3)
    throw std::invalid_argument("need at least three t samples");

  const int n = static_cast<int>(F.rows());
  const Vec y0 = Vec::Zero(n);
  const Mat dir = a * b.transpose();

  // best affine fit of f(t) = W(F (I + t a b^T)) by least squares
  const int m = static_cast<int>(t_grid.size());
  Eigen::MatrixXd design(m, 2);
  Vec values(m);
  for (int i = 0; i < m; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = t_grid[i];
    values[i] = w.eval(y0, y0, F * (Mat::Identity(n, n) + t_grid[i] * dir));
  }
  const Eigen::Vector2d fit =
      design.colPivHouseholderQr().solve(values);
  const Vec residual = values - design * fit;
  return std::sqrt(residual.squaredNorm() / m);
}

}  // namespace nullag
