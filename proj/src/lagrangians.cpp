#include "nullag/lagrangians.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nullag {

// ------------------------------------------------------------- minors

MinorIndex MinorIndex::full(int n) {
  MinorIndex mi;
  mi.rows.resize(n);
  mi.cols.resize(n);
  std::iota(mi.rows.begin(), mi.rows.end(), 0);
  std::iota(mi.cols.begin(), mi.cols.end(), 0);
  return mi;
}

std::string MinorIndex::str() const {
  if (rows.empty()) return "c";
  std::string r, c;
  for (int i : rows) r += std::to_string(i + 1);
  for (int j : cols) c += std::to_string(j + 1);
  if (rows.size() == 1) return r + c;
  return r + "|" + c;
}

namespace {

int permutation_sign(const std::vector<int>& p) {
  int inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

void check_minor(const Mat& F, const MinorIndex& mi) {
  if (mi.rows.size() != mi.cols.size())
    throw std::invalid_argument("minor needs equally many rows and cols");
  for (int r : mi.rows)
    if (r < 0 || r >= F.rows()) throw std::invalid_argument("minor row out of range");
  for (int c : mi.cols)
    if (c < 0 || c >= F.cols()) throw std::invalid_argument("minor col out of range");
}

}  // namespace

double minor_value(const Mat& F, const MinorIndex& mi) {
  check_minor(F, mi);
  const int k = static_cast<int>(mi.rows.size());
  if (k == 0) return 1.0;
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double acc = 0.0;
  do {
    double term = permutation_sign(perm);
    for (int a = 0; a < k; ++a) term *= F(mi.rows[a], mi.cols[perm[a]]);
    acc += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc;
}

Mat minor_gradient(const Mat& F, const MinorIndex& mi) {
  check_minor(F, mi);
  Mat g = Mat::Zero(F.rows(), F.cols());
  const int k = static_cast<int>(mi.rows.size());
  if (k == 0) return g;
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    const int sign = permutation_sign(perm);
    for (int a0 = 0; a0 < k; ++a0) {
      double term = sign;
      for (int a = 0; a < k; ++a)
        if (a != a0) term *= F(mi.rows[a], mi.cols[perm[a]]);
      g(mi.rows[a0], mi.cols[perm[a0]]) += term;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return g;
}

namespace {

void subsets_of_size(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> pick(k);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      out.push_back(pick);
      return;
    }
    for (int v = start; v < n; ++v) {
      pick[depth] = v;
      rec(v + 1, depth + 1);
    }
  };
  rec(0, 0);
}

}  // namespace

std::vector<MinorIndex> all_minors(int n) {
  std::vector<MinorIndex> out;
  out.push_back(MinorIndex{});  // the constant
  for (int k = 1; k <= n; ++k) {
    std::vector<std::vector<int>> subs;
    subsets_of_size(n, k, subs);
    for (const auto& r : subs)
      for (const auto& c : subs) out.push_back(MinorIndex{r, c});
  }
  return out;
}

// --------------------------------------------------- differential forms

DifferentialForm DifferentialForm::constant_one_form(int n, const Vec& coeffs) {
  DifferentialForm a;
  a.n = n;
  a.degree = 1;
  for (int i = 0; i < n; ++i) {
    const double ci = coeffs[i];
    if (ci == 0.0) continue;
    a.terms.push_back(FormTerm{{i}, [ci](const Vec&) { return ci; },
                               [n](const Vec&) { return Vec::Zero(n); }});
  }
  return a;
}

DifferentialForm DifferentialForm::calabi(int n) {
  DifferentialForm a;
  a.n = n;
  a.degree = 1;
  Vec e2 = Vec::Zero(n);
  e2[1] = 1.0;
  a.terms.push_back(FormTerm{{0}, [](const Vec& y) { return y[1]; },
                             [e2](const Vec&) { return e2; }});
  return a;
}

DifferentialForm DifferentialForm::volume_2form_2d() {
  DifferentialForm a;
  a.n = 2;
  a.degree = 2;
  a.terms.push_back(FormTerm{{0, 1}, [](const Vec&) { return 1.0; },
                             [](const Vec&) { return Vec::Zero(2); }});
  return a;
}

double DifferentialForm::apply(const Vec& x, const std::vector<Vec>& vs) const {
  if (static_cast<int>(vs.size()) != degree)
    throw std::invalid_argument("form applied to wrong number of vectors");
  double acc = 0.0;
  for (const auto& t : terms) {
    // det of the degree x degree matrix (v_b)[indices[a]]
    Mat m(degree, degree);
    for (int a = 0; a < degree; ++a)
      for (int b = 0; b < degree; ++b) m(a, b) = vs[b][t.indices[a]];
    acc += t.coeff(x) * minor_value(m, MinorIndex::full(degree));
  }
  return acc;
}

// ----------------------------------------------------------- Lagrangian

Lagrangian::Lagrangian(std::string name, GroupSpec g, Kind kind)
    : name_(std::move(name)), group_(g), kind_(kind) {}

Lagrangian Lagrangian::minors(
    const std::vector<std::pair<MinorIndex, double>>& terms, GroupSpec g) {
  const int n = g.n;
  for (const auto& [mi, c] : terms) {
    (void)c;
    check_minor(Mat::Zero(n, n), mi);
  }
  std::string name;
  if (terms.size() == 1 && static_cast<int>(terms[0].first.rows.size()) == n &&
      terms[0].second == 1.0 && terms[0].first.rows == MinorIndex::full(n).rows &&
      terms[0].first.cols == MinorIndex::full(n).cols) {
    name = "det";
  } else if (terms.size() == 1 && terms[0].first.rows.empty()) {
    std::ostringstream os;
    os << "const:" << terms[0].second;
    name = os.str();
  } else {
    std::ostringstream os;
    os << "minor:";
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (i) os << ",";
      os << terms[i].first.str() << "=" << terms[i].second;
    }
    name = os.str();
  }
  Lagrangian w(name, g, Kind::Minors);
  int degree = 0;
  for (const auto& [mi, c] : terms) {
    (void)c;
    degree = std::max(degree, static_cast<int>(mi.rows.size()));
  }
  w.poly_degree_ = degree;
  auto held = terms;
  w.value_ = [held](const Vec&, const Vec&, const Mat& F) {
    double acc = 0.0;
    for (const auto& [mi, c] : held) acc += c * minor_value(F, mi);
    return acc;
  };
  w.grad_ = [held](const Vec&, const Mat& F) {
    Mat g_ = Mat::Zero(F.rows(), F.cols());
    for (const auto& [mi, c] : held) g_ += c * minor_gradient(F, mi);
    return g_;
  };
  return w;
}

Lagrangian Lagrangian::constant(double c, GroupSpec g) {
  return minors({{MinorIndex{}, c}}, g);
}

Lagrangian Lagrangian::component(int i, int j, GroupSpec g) {
  return minors({{MinorIndex{{i}, {j}}, 1.0}}, g);
}

Lagrangian Lagrangian::determinant(GroupSpec g) {
  return minors({{MinorIndex::full(g.n), 1.0}}, g);
}

Lagrangian Lagrangian::affine(const Mat& a, double b, GroupSpec g) {
  if (a.rows() != g.n || a.cols() != g.n)
    throw std::invalid_argument("affine coefficient shape mismatch");
  std::ostringstream os;
  os << "affine:";
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      os << (i + j ? "," : "") << a(i, j);
  os << ":" << b;
  Lagrangian w(os.str(), g, Kind::Affine);
  w.poly_degree_ = 1;
  Mat ac = a;
  w.value_ = [ac, b](const Vec&, const Vec&, const Mat& F) {
    return frobenius_dot(ac, F) + b;
  };
  w.grad_ = [ac](const Vec&, const Mat&) { return ac; };
  return w;
}

Lagrangian Lagrangian::quadratic(const Mat& c, GroupSpec g) {
  if (c.rows() != g.n || c.cols() != g.n)
    throw std::invalid_argument("quadratic coefficient shape mismatch");
  std::string name;
  if ((c.array() == 1.0).all()) {
    name = "frob2";
  } else if ((c.array() != 0.0).count() == 1) {
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        if (c(i, j) != 0.0)
          name = "comp" + std::to_string(i + 1) + std::to_string(j + 1) + "sq";
  } else {
    name = "quad";
  }
  Lagrangian w(name, g, Kind::Quadratic);
  w.poly_degree_ = 2;
  Mat cc = c;
  w.value_ = [cc](const Vec&, const Vec&, const Mat& F) {
    return (cc.array() * F.array() * F.array()).sum();
  };
  w.grad_ = [cc](const Vec&, const Mat& F) { return Mat(2.0 * cc.array() * F.array()); };
  return w;
}

Lagrangian Lagrangian::frobenius_sq(GroupSpec g) {
  return quadratic(Mat::Ones(g.n, g.n), g);
}

Lagrangian Lagrangian::det_weighted_affine(MatrixFn a, MatrixFn da, ScalarFn b,
                                           ScalarFn db, GroupSpec g) {
  Lagrangian w("detaffine", g, Kind::DetWeightedAffine);
  const int n = g.n;
  w.value_ = [a, b](const Vec&, const Vec&, const Mat& F) {
    const double d = F.determinant();
    return frobenius_dot(a(d), F) + b(d);
  };
  w.grad_ = [a, da, db, n](const Vec&, const Mat& F) {
    const double d = F.determinant();
    const Mat cof = minor_gradient(F, MinorIndex::full(n));
    return Mat(a(d) + (frobenius_dot(da(d), F) + db(d)) * cof);
  };
  return w;
}

Lagrangian Lagrangian::pullback_potential(const DifferentialForm& alpha,
                                          const std::vector<Vec>& vs, GroupSpec g) {
  if (alpha.degree != static_cast<int>(vs.size()))
    throw std::invalid_argument("pullback needs one vector per form degree");
  if (alpha.degree > g.n)
    throw std::invalid_argument("form degree exceeds dimension");
  for (const auto& v : vs)
    if (v.size() != g.n) throw std::invalid_argument("pullback vector dimension");

  Lagrangian w("pullback", g, Kind::Pullback);
  w.homogeneous_ = false;
  w.poly_degree_ = alpha.degree;
  const int r = alpha.degree;
  auto form = alpha;
  auto vecs = vs;

  w.value_ = [form, vecs, r](const Vec&, const Vec& y, const Mat& F) {
    std::vector<Vec> fv(r);
    for (int b = 0; b < r; ++b) fv[b] = F * vecs[b];
    return form.apply(y, fv);
  };
  w.grad_ = [form, vecs, r](const Vec& y, const Mat& F) {
    Mat g_ = Mat::Zero(F.rows(), F.cols());
    const MinorIndex full_r = MinorIndex::full(r);
    for (const auto& t : form.terms) {
      Mat m(r, r);
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) m(a, b) = (F * vecs[b])[t.indices[a]];
      const Mat cof = minor_gradient(m, full_r);
      const double cy = t.coeff(y);
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
          g_.row(t.indices[a]) += cy * cof(a, b) * vecs[b].transpose();
    }
    return g_;
  };
  w.ygrad_ = [form, vecs, r](const Vec& y, const Mat& F) {
    Vec g_ = Vec::Zero(y.size());
    for (const auto& t : form.terms) {
      if (!t.coeff_gradient) continue;
      Mat m(r, r);
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) m(a, b) = (F * vecs[b])[t.indices[a]];
      g_ += t.coeff_gradient(y) * minor_value(m, MinorIndex::full(r));
    }
    return g_;
  };
  return w;
}

Lagrangian Lagrangian::calabi_component(const Vec& v, GroupSpec g) {
  if (v.norm() == 0.0) throw std::invalid_argument("calabi component needs v != 0");
  Lagrangian w = pullback_potential(DifferentialForm::calabi(g.n), {v}, g);
  w.name_ = "calabi";
  return w;
}

Lagrangian Lagrangian::custom(std::string name, ValueFn fn, GroupSpec g,
                              bool homogeneous) {
  Lagrangian w(std::move(name), g, Kind::Custom);
  w.homogeneous_ = homogeneous;
  w.value_ = std::move(fn);
  return w;
}

double Lagrangian::eval(const Vec& x, const Vec& y, const Mat& F) const {
  const double v = value_(x, y, F);
  if (!std::isfinite(v))
    throw std::domain_error("lagrangian " + name_ + " non-finite");
  return v;
}

Mat Lagrangian::dF(const Vec& y, const Mat& F) const {
  if (grad_) return grad_(y, F);
  // central differences, step 1e-6 * max(1, |F|)
  const double h = 1e-6 * std::max(1.0, F.norm());
  const Vec x0 = Vec::Zero(group_.n);
  Mat g = Mat::Zero(F.rows(), F.cols());
  Mat probe = F;
  for (int i = 0; i < F.rows(); ++i) {
    for (int j = 0; j < F.cols(); ++j) {
      probe(i, j) = F(i, j) + h;
      const double up = eval(x0, y, probe);
      probe(i, j) = F(i, j) - h;
      const double dn = eval(x0, y, probe);
      probe(i, j) = F(i, j);
      g(i, j) = (up - dn) / (2.0 * h);
    }
  }
  return g;
}

Vec Lagrangian::dy(const Vec& y, const Mat& F) const {
  if (homogeneous_) return Vec::Zero(y.size());
  if (ygrad_) return ygrad_(y, F);
  const double h = 1e-6 * std::max(1.0, y.norm());
  const Vec x0 = Vec::Zero(group_.n);
  Vec g = Vec::Zero(y.size());
  Vec probe = y;
  for (int i = 0; i < y.size(); ++i) {
    probe[i] = y[i] + h;
    const double up = eval(x0, probe, F);
    probe[i] = y[i] - h;
    const double dn = eval(x0, probe, F);
    probe[i] = y[i];
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

double Lagrangian::second_directional(const Vec& y, const Mat& F,
                                      const Mat& G) const {
  const Vec x0 = Vec::Zero(group_.n);
  if (poly_degree_ >= 0 && poly_degree_ <= 3) {
    // exact: the restriction t -> W(F + tG) is a polynomial of degree <= 3
    return eval(x0, y, F + G) - 2.0 * eval(x0, y, F) + eval(x0, y, F - G);
  }
  const double h = 1e-4;
  return (eval(x0, y, F + h * G) - 2.0 * eval(x0, y, F) + eval(x0, y, F - h * G)) /
         (h * h);
}

// ------------------------------------------------------------- parsing

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      break;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number \"" + s + "\"");
  return v;
}

MinorIndex parse_minor_key(const std::string& key, int n) {
  if (key == "c") return MinorIndex{};
  if (key == "det") return MinorIndex::full(n);
  const auto bar = key.find('|');
  std::string rows = key, cols = key;
  if (bar != std::string::npos) {
    rows = key.substr(0, bar);
    cols = key.substr(bar + 1);
  } else {
    if (key.size() != 2)
      throw std::invalid_argument("minor key must be ij, r..|c.., c or det");
    rows = key.substr(0, 1);
    cols = key.substr(1, 1);
  }
  if (rows.size() != cols.size())
    throw std::invalid_argument("minor key rows/cols size mismatch");
  MinorIndex mi;
  for (char ch : rows) mi.rows.push_back(ch - '1');
  for (char ch : cols) mi.cols.push_back(ch - '1');
  for (int r : mi.rows)
    if (r < 0 || r >= n) throw std::invalid_argument("minor row out of range");
  for (int c : mi.cols)
    if (c < 0 || c >= n) throw std::invalid_argument("minor col out of range");
  return mi;
}

}  // namespace

Lagrangian Lagrangian::from_string(std::string_view text, const GroupSpec& g) {
  const std::string s(text);
  if (s == "det") return determinant(g);
  if (s == "frob2") return frobenius_sq(g);
  if (s == "calabi") {
    Vec e1 = Vec::Zero(g.n);
    e1[0] = 1.0;
    return calabi_component(e1, g);
  }
  // comp<i><j>sq
  if (s.size() == 8 && s.rfind("comp", 0) == 0 && s.substr(6) == "sq") {
    const int i = s[4] - '1';
    const int j = s[5] - '1';
    if (i < 0 || i >= g.n || j < 0 || j >= g.n)
      throw std::invalid_argument("component index out of range in " + s);
    Mat c = Mat::Zero(g.n, g.n);
    c(i, j) = 1.0;
    return quadratic(c, g);
  }
  const auto parts = split(s, ':');
  if (parts.size() == 2 && parts[0] == "const")
    return constant(parse_double(parts[1]), g);
  if (parts.size() == 2 && parts[0] == "comp") {
    if (parts[1].size() != 2) throw std::invalid_argument("comp wants two digits");
    const int i = parts[1][0] - '1';
    const int j = parts[1][1] - '1';
    if (i < 0 || i >= g.n || j < 0 || j >= g.n)
      throw std::invalid_argument("component index out of range in " + s);
    return component(i, j, g);
  }
  if (parts.size() == 3 && parts[0] == "affine") {
    const auto entries = split(parts[1], ',');
    if (static_cast<int>(entries.size()) != g.n * g.n)
      throw std::invalid_argument("affine wants n*n matrix entries");
    Mat a(g.n, g.n);
    int idx = 0;
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j) a(i, j) = parse_double(entries[idx++]);
    return affine(a, parse_double(parts[2]), g);
  }
  if (parts.size() == 2 && parts[0] == "minor") {
    std::vector<std::pair<MinorIndex, double>> terms;
    for (const auto& item : split(parts[1], ',')) {
      const auto kv = split(item, '=');
      if (kv.size() != 2) throw std::invalid_argument("minor item wants key=value");
      terms.emplace_back(parse_minor_key(kv[0], g.n), parse_double(kv[1]));
    }
    return minors(terms, g);
  }
  throw std::invalid_argument("unknown lagrangian \"" + s + "\"");
}

}  // namespace nullag
