#include "nullag/groups.hpp"

#include <cmath>
#include <stdexcept>

#include "nullag/errors.hpp"

namespace nullag {

GroupSpec::GroupSpec(GroupTag t, int dim) : tag(t), n(dim) {
  if (n < 2) throw std::invalid_argument("group dimension must be >= 2");
  if (tag == GroupTag::Symplectic && n % 2 != 0)
    throw std::invalid_argument("symplectic group needs even dimension");
}

GroupSpec GroupSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("group spec must look like \"sl:2\"");
  const std::string_view name = text.substr(0, colon);
  int n = 0;
  try {
    n = std::stoi(std::string(text.substr(colon + 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad group dimension in \"" + std::string(text) + "\"");
  }
  if (name == "gl") return general_linear(n);
  if (name == "sl") return special_linear(n);
  if (name == "sp") return symplectic(n);
  if (name == "conf") return conformal(n);
  throw std::invalid_argument("unknown group tag \"" + std::string(name) + "\"");
}

std::string GroupSpec::str() const {
  std::string name;
  switch (tag) {
    case GroupTag::GeneralLinear: name = "gl"; break;
    case GroupTag::SpecialLinear: name = "sl"; break;
    case GroupTag::Symplectic: name = "sp"; break;
    case GroupTag::Conformal: name = "conf"; break;
  }
  return name + ":" + std::to_string(n);
}

namespace {

void check_shape(const GroupSpec& g, const Mat& m) {
  if (m.rows() != g.n || m.cols() != g.n)
    throw std::invalid_argument("matrix shape does not match group dimension");
  if (!all_finite(m)) throw std::invalid_argument("matrix has non-finite entries");
}

}  // namespace

double membership_residual(const GroupSpec& g, const Mat& F) {
  check_shape(g, F);
  const double det = F.determinant();
  switch (g.tag) {
    case GroupTag::GeneralLinear:
      return det > 0.0 ? 0.0 : 1.0;
    case GroupTag::SpecialLinear:
      return std::abs(det - 1.0);
    case GroupTag::Symplectic: {
      const Mat w = symplectic_form(g.n);
      return (F * w * F.transpose() - w).norm() / std::sqrt(double(g.n));
    }
    case GroupTag::Conformal: {
      if (det <= 0.0) return 1.0;
      const double lam2 = std::pow(det, 2.0 / g.n);
      return (F * F.transpose() / lam2 - Mat::Identity(g.n, g.n)).norm();
    }
  }
  return 1.0;
}

bool member(const GroupSpec& g, const Mat& F, double tol) {
  return membership_residual(g, F) <= tol;
}

double algebra_residual(const GroupSpec& g, const Mat& H) {
  check_shape(g, H);
  switch (g.tag) {
    case GroupTag::GeneralLinear:
      return 0.0;
    case GroupTag::SpecialLinear:
      return std::abs(H.trace());
    case GroupTag::Symplectic: {
      const Mat w = symplectic_form(g.n);
      return (H * w + w * H.transpose()).norm() / std::sqrt(double(g.n));
    }
    case GroupTag::Conformal: {
      const Mat sym = 0.5 * (H + H.transpose());
      return (sym - (H.trace() / g.n) * Mat::Identity(g.n, g.n)).norm();
    }
  }
  return 1.0;
}

bool algebra_member(const GroupSpec& g, const Mat& H, double tol) {
  return algebra_residual(g, H) <= tol;
}

Mat random_algebra_element(const GroupSpec& g, Rng& rng) {
  const int n = g.n;
  Mat raw = rng.uniform_mat(n, n, -1.0, 1.0);
  switch (g.tag) {
    case GroupTag::GeneralLinear:
      return raw;
    case GroupTag::SpecialLinear:
      return raw - (raw.trace() / n) * Mat::Identity(n, n);
    case GroupTag::Symplectic: {
      // w * S with S symmetric solves H w + w H^T = 0.
      const Mat sym = 0.5 * (raw + raw.transpose());
      return symplectic_form(n) * sym;
    }
    case GroupTag::Conformal: {
      const Mat skew = 0.5 * (raw - raw.transpose());
      return rng.uniform(-1.0, 1.0) * Mat::Identity(n, n) + skew;
    }
  }
  return raw;
}

Mat random_element(const GroupSpec& g, double scale, std::uint64_t seed) {
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  Rng rng(seed);
  const Mat h = random_algebra_element(g, rng);
  return matrix_exp(scale * h);
}

}  // namespace nullag
