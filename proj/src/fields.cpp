#include "nullag/fields.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "nullag/errors.hpp"

namespace nullag {

// ---------------------------------------------------------------- Bump

namespace {

// u(s) = exp(-1/(1-s)) on s < 1, with u' and u''.
struct Profile {
  double u = 0.0, du = 0.0, ddu = 0.0;
};

Profile profile(double s) {
  Profile p;
  if (s >= 1.0) return p;
  const double inv = 1.0 / (1.0 - s);
  p.u = std::exp(-inv);
  p.du = -p.u * inv * inv;
  p.ddu = p.u * (2.0 * s - 1.0) * inv * inv * inv * inv;
  return p;
}

}  // namespace

double Bump::value(const Vec& x) const {
  const double s = (x - center).squaredNorm() / (radius * radius);
  return profile(s).u;
}

Vec Bump::gradient(const Vec& x) const {
  const Vec d = x - center;
  const double s = d.squaredNorm() / (radius * radius);
  return profile(s).du * (2.0 / (radius * radius)) * d;
}

Mat Bump::hessian(const Vec& x) const {
  const Vec d = x - center;
  const double r2 = radius * radius;
  const double s = d.squaredNorm() / r2;
  const Profile p = profile(s);
  const Vec ds = (2.0 / r2) * d;
  return p.ddu * ds * ds.transpose() +
         p.du * (2.0 / r2) * Mat::Identity(x.size(), x.size());
}

std::pair<double, Vec> bump(const Vec& center, double radius, const Vec& x) {
  if (!(radius > 0.0)) throw std::invalid_argument("bump radius must be positive");
  Bump b{center, radius};
  return {b.value(x), b.gradient(x)};
}

// ---------------------------------------------------------- Polynomial

Polynomial::Polynomial(int vars, std::vector<std::vector<int>> exponents,
                       std::vector<double> coeffs)
    : vars_(vars), exponents_(std::move(exponents)), coeffs_(std::move(coeffs)) {
  if (exponents_.size() != coeffs_.size())
    throw std::invalid_argument("exponent/coefficient count mismatch");
}

Polynomial Polynomial::random(int vars, int max_degree, Rng& rng) {
  std::vector<std::vector<int>> exps;
  std::vector<int> e(vars, 0);
  // enumerate all monomials with total degree <= max_degree
  while (true) {
    int total = 0;
    for (int v : e) total += v;
    if (total <= max_degree) exps.push_back(e);
    int d = vars - 1;
    while (d >= 0 && ++e[d] > max_degree) e[d--] = 0;
    if (d < 0) break;
  }
  std::vector<double> coeffs(exps.size());
  for (auto& c : coeffs) c = rng.uniform(-1.0, 1.0);
  return Polynomial(vars, std::move(exps), std::move(coeffs));
}

double Polynomial::value(const Vec& x) const {
  double acc = 0.0;
  for (std::size_t m = 0; m < coeffs_.size(); ++m) {
    double term = coeffs_[m];
    for (int v = 0; v < vars_; ++v)
      for (int k = 0; k < exponents_[m][v]; ++k) term *= x[v];
    acc += term;
  }
  return acc;
}

Vec Polynomial::gradient(const Vec& x) const {
  Vec g = Vec::Zero(vars_);
  for (std::size_t m = 0; m < coeffs_.size(); ++m) {
    for (int d = 0; d < vars_; ++d) {
      const int ed = exponents_[m][d];
      if (ed == 0) continue;
      double term = coeffs_[m] * ed;
      for (int v = 0; v < vars_; ++v) {
        const int reps = (v == d) ? exponents_[m][v] - 1 : exponents_[m][v];
        for (int k = 0; k < reps; ++k) term *= x[v];
      }
      g[d] += term;
    }
  }
  return g;
}

Mat Polynomial::hessian(const Vec& x) const {
  Mat h = Mat::Zero(vars_, vars_);
  for (std::size_t m = 0; m < coeffs_.size(); ++m) {
    for (int d1 = 0; d1 < vars_; ++d1) {
      for (int d2 = d1; d2 < vars_; ++d2) {
        std::vector<int> e = exponents_[m];
        double factor = coeffs_[m];
        factor *= e[d1];
        if (e[d1] == 0) continue;
        e[d1] -= 1;
        factor *= e[d2];
        if (factor == 0.0 || e[d2] == 0) continue;
        e[d2] -= 1;
        double term = factor;
        for (int v = 0; v < vars_; ++v)
          for (int k = 0; k < e[v]; ++k) term *= x[v];
        h(d1, d2) += term;
        if (d2 != d1) h(d2, d1) += term;
      }
    }
  }
  return h;
}

// --------------------------------------------------------- CompactField

namespace {

constexpr int kPolyDegree = 3;

}  // namespace

CompactField::CompactField(GroupSpec g, Domain dom, double amplitude,
                           std::uint64_t seed)
    : group_(g), domain_(std::move(dom)), amplitude_(amplitude), seed_(seed) {}

CompactField CompactField::sample(const GroupSpec& g, const Domain& dom,
                                  double amplitude, std::uint64_t seed) {
  if (!std::isfinite(amplitude))
    throw std::invalid_argument("amplitude must be finite");
  if (g.n != dom.dim())
    throw std::invalid_argument("field domain dimension must match group");

  CompactField f(g, dom, amplitude, seed);
  Rng rng(seed);

  // Support ball: jittered center, radius 0.35 * min side. Worst-case
  // extent is (0.08 + 0.35) * side from the domain center, which keeps
  // a >= 5% margin to the boundary on every axis.
  const Vec side = dom.side();
  const double min_side = side.minCoeff();
  Vec center = 0.5 * (dom.lower + dom.upper);
  for (int i = 0; i < g.n; ++i)
    center[i] += rng.uniform(-0.08, 0.08) * side[i];
  f.bump_ = Bump{center, 0.35 * min_side};

  const int n = g.n;
  switch (g.tag) {
    case GroupTag::GeneralLinear:
      f.generator_ = Generator::Componentwise;
      for (int i = 0; i < n; ++i)
        f.polys_.push_back(Polynomial::random(n, kPolyDegree, rng));
      break;
    case GroupTag::SpecialLinear:
      if (n == 2) {
        f.generator_ = Generator::Stream2d;
        f.polys_.push_back(Polynomial::random(n, kPolyDegree, rng));
      } else if (n == 3) {
        f.generator_ = Generator::Curl3d;
        for (int i = 0; i < 3; ++i)
          f.polys_.push_back(Polynomial::random(n, kPolyDegree, rng));
      } else {
        throw unsupported_configuration("SL fields implemented for n in {2,3}");
      }
      break;
    case GroupTag::Symplectic:
      if (n == 2) {
        f.generator_ = Generator::Hamiltonian2d;
        f.polys_.push_back(Polynomial::random(n, kPolyDegree, rng));
      } else {
        throw unsupported_configuration("Sp fields implemented for n = 2");
      }
      break;
    case GroupTag::Conformal:
      // The only compactly supported conformal flow is the identity.
      f.generator_ = Generator::Zero;
      break;
  }
  return f;
}

double CompactField::scalar(int k, const Vec& x) const {
  return amplitude_ * bump_.value(x) * polys_[k].value(x);
}

Vec CompactField::scalar_gradient(int k, const Vec& x) const {
  const double b = bump_.value(x);
  if (b == 0.0) return Vec::Zero(x.size());
  const Vec db = bump_.gradient(x);
  return amplitude_ * (b * polys_[k].gradient(x) + polys_[k].value(x) * db);
}

Mat CompactField::scalar_hessian(int k, const Vec& x) const {
  const int n = static_cast<int>(x.size());
  const double b = bump_.value(x);
  if (b == 0.0) return Mat::Zero(n, n);
  const Vec db = bump_.gradient(x);
  const Mat ddb = bump_.hessian(x);
  const double p = polys_[k].value(x);
  const Vec dp = polys_[k].gradient(x);
  const Mat ddp = polys_[k].hessian(x);
  return amplitude_ * (b * ddp + db * dp.transpose() + dp * db.transpose() + p * ddb);
}

Vec CompactField::value(const Vec& x) const {
  const int n = group_.n;
  switch (generator_) {
    case Generator::Zero:
      return Vec::Zero(n);
    case Generator::Componentwise: {
      Vec v(n);
      for (int i = 0; i < n; ++i) v[i] = scalar(i, x);
      return v;
    }
    case Generator::Stream2d:
    case Generator::Hamiltonian2d: {
      // (d psi/dx2, -d psi/dx1): divergence-free, and for n = 2 this is
      // exactly the Hamiltonian field w * grad(psi).
      const Vec g = scalar_gradient(0, x);
      Vec v(2);
      v[0] = g[1];
      v[1] = -g[0];
      return v;
    }
    case Generator::Curl3d: {
      Vec v(3);
      const Vec g0 = scalar_gradient(0, x);
      const Vec g1 = scalar_gradient(1, x);
      const Vec g2 = scalar_gradient(2, x);
      v[0] = g2[1] - g1[2];
      v[1] = g0[2] - g2[0];
      v[2] = g1[0] - g0[1];
      return v;
    }
  }
  return Vec::Zero(n);
}

Mat CompactField::jacobian(const Vec& x) const {
  const int n = group_.n;
  switch (generator_) {
    case Generator::Zero:
      return Mat::Zero(n, n);
    case Generator::Componentwise: {
      Mat j(n, n);
      for (int i = 0; i < n; ++i) j.row(i) = scalar_gradient(i, x).transpose();
      return j;
    }
    case Generator::Stream2d:
    case Generator::Hamiltonian2d: {
      const Mat h = scalar_hessian(0, x);
      Mat j(2, 2);
      j(0, 0) = h(1, 0);
      j(0, 1) = h(1, 1);
      j(1, 0) = -h(0, 0);
      j(1, 1) = -h(0, 1);
      return j;
    }
    case Generator::Curl3d: {
      const Mat h0 = scalar_hessian(0, x);
      const Mat h1 = scalar_hessian(1, x);
      const Mat h2 = scalar_hessian(2, x);
      Mat j(3, 3);
      for (int col = 0; col < 3; ++col) {
        j(0, col) = h2(1, col) - h1(2, col);
        j(1, col) = h0(2, col) - h2(0, col);
        j(2, col) = h1(0, col) - h0(1, col);
      }
      return j;
    }
  }
  return Mat::Zero(n, n);
}

Vec CompactField::support_lower() const {
  return bump_.center - Vec::Constant(group_.n, bump_.radius);
}

Vec CompactField::support_upper() const {
  return bump_.center + Vec::Constant(group_.n, bump_.radius);
}

bool CompactField::in_support(const Vec& x) const {
  if (generator_ == Generator::Zero) return false;
  return (x - bump_.center).norm() < bump_.radius;
}

nlohmann::json CompactField::to_json() const {
  const char* kind = "zero";
  switch (generator_) {
    case Generator::Componentwise: kind = "componentwise"; break;
    case Generator::Stream2d: kind = "stream2d"; break;
    case Generator::Curl3d: kind = "curl3d"; break;
    case Generator::Hamiltonian2d: kind = "hamiltonian2d"; break;
    case Generator::Zero: kind = "zero"; break;
  }
  const Vec lo = support_lower();
  const Vec hi = support_upper();
  nlohmann::json j;
  j["group"] = group_.str();
  j["generator"] = kind;
  j["seed"] = seed_;
  j["amplitude"] = amplitude_;
  j["support_lower"] = std::vector<double>(lo.data(), lo.data() + group_.n);
  j["support_upper"] = std::vector<double>(hi.data(), hi.data() + group_.n);
  return j;
}

}  // namespace nullag
