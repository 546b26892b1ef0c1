#include "nullag/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nullag/calculus.hpp"
#include "nullag/errors.hpp"
#include "nullag/verify.hpp"

namespace nullag::cli {

namespace {

using nlohmann::json;

struct RunConfig {
  std::string command;
  std::string group = "sl:2";
  std::string lagrangian = "affine:1,0,0,0:2";
  std::string domain = "0..1";
  int resolution = 64;
  int trials = 20;
  int samples = 50;
  std::uint64_t seed = 1;
  double amplitude = 0.5;
  double h = 2.0;
  std::string k_list = "1,2,4,8";
  std::string out;
  std::string csv;
  std::string expect = "auto";
  std::vector<std::string> tol_overrides;

  json to_json() const {
    return json{{"command", command},   {"group", group},
                {"lagrangian", lagrangian}, {"domain", domain},
                {"resolution", resolution}, {"trials", trials},
                {"samples", samples},   {"seed", seed},
                {"amplitude", amplitude},   {"h", h},
                {"k_list", k_list},     {"out", out},
                {"csv", csv},           {"expect", expect},
                {"tol_overrides", tol_overrides}};
  }
};

Domain make_domain(const RunConfig& cfg, int n) {
  const auto pos = cfg.domain.find("..");
  if (pos == std::string::npos)
    throw std::invalid_argument("--domain wants the form lo..hi");
  const double lo = std::stod(cfg.domain.substr(0, pos));
  const double hi = std::stod(cfg.domain.substr(pos + 2));
  return Domain(Vec::Constant(n, lo), Vec::Constant(n, hi), cfg.resolution);
}

Tolerances make_tolerances(const RunConfig& cfg) {
  Tolerances tol;
  for (const auto& item : cfg.tol_overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--tol-override wants key=value");
    tol.apply_override(item.substr(0, eq), std::stod(item.substr(eq + 1)));
  }
  return tol;
}

enum class Expectation { Null, Falsified, None };

Expectation parse_expectation(const std::string& text, const Lagrangian& w,
                              const GroupSpec& g) {
  if (text == "null") return Expectation::Null;
  if (text == "falsified") return Expectation::Falsified;
  if (text == "none") return Expectation::None;
  if (text != "auto") throw std::invalid_argument("--expect wants auto|null|falsified|none");
  // auto: what the structure of the family predicts for this group
  if (g.tag == GroupTag::Conformal) return Expectation::Null;  // trivial flows
  switch (w.kind()) {
    case Lagrangian::Kind::Minors:
    case Lagrangian::Kind::Affine:
      return Expectation::Null;
    case Lagrangian::Kind::Quadratic:
      return Expectation::Falsified;
    case Lagrangian::Kind::Pullback:
      if (w.name() == "calabi")
        return (g.tag == GroupTag::Symplectic ||
                (g.tag == GroupTag::SpecialLinear && g.n == 2))
                   ? Expectation::Null
                   : Expectation::Falsified;
      return Expectation::None;
    default:
      return Expectation::None;
  }
}

bool verdict_matches(Verdict v, Expectation e) {
  switch (e) {
    case Expectation::Null: return v == Verdict::ConsistentNull;
    case Expectation::Falsified: return v == Verdict::FalsifiedNull;
    case Expectation::None: return true;
  }
  return true;
}

const char* expectation_name(Expectation e) {
  switch (e) {
    case Expectation::Null: return "consistent-null";
    case Expectation::Falsified: return "falsified-null";
    case Expectation::None: return "none";
  }
  return "none";
}

void emit(const RunConfig& cfg, const json& results) {
  json report;
  report["config"] = cfg.to_json();
  report["results"] = results;
  const std::string text = report.dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream file(cfg.out);
    if (!file) throw std::runtime_error("cannot write " + cfg.out);
    file << text;
  }
}

void emit_csv(const RunConfig& cfg, const std::vector<RescaleRow>& rows) {
  std::string path = cfg.csv;
  if (path.empty() && !cfg.out.empty()) path = cfg.out + ".csv";
  std::ostringstream table;
  table << "k,integral,target,defect,est_order\n";
  table.precision(17);
  for (const auto& r : rows) {
    table << r.k << "," << r.integral << "," << r.target << "," << r.defect << ",";
    if (std::isfinite(r.est_order)) table << r.est_order;
    table << "\n";
  }
  if (path.empty()) {
    std::cout << table.str();
  } else {
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write " + path);
    file << table.str();
  }
}

// ------------------------------------------------------------- commands

int cmd_verify_null(const RunConfig& cfg) {
  const GroupSpec g = GroupSpec::parse(cfg.group);
  const Lagrangian w = Lagrangian::from_string(cfg.lagrangian, g);
  const Domain dom = make_domain(cfg, g.n);
  const Tolerances tol = make_tolerances(cfg);
  const Expectation expect = parse_expectation(cfg.expect, w, g);

  CampaignReport report =
      null_campaign(w, g, dom, cfg.trials, cfg.seed, cfg.amplitude, tol);
  const bool pass = verdict_matches(report.verdict, expect);

  json results = report.to_json();
  results["expected"] = expectation_name(expect);
  results["pass"] = pass;
  emit(cfg, results);
  return pass ? 0 : 1;
}

int cmd_d_complex(const RunConfig& cfg) {
  const GroupSpec g = GroupSpec::parse(cfg.group);
  const Lagrangian w = Lagrangian::from_string(cfg.lagrangian, g);
  const Tolerances tol = make_tolerances(cfg);
  const double residual = d_squared_residual(w, cfg.samples, cfg.seed);
  const bool pass = residual <= tol.d_squared;
  emit(cfg, json{{"campaign", "d-complex"},
                 {"lagrangian", w.name()},
                 {"group", g.str()},
                 {"samples", cfg.samples},
                 {"max_residual", residual},
                 {"bound", tol.d_squared},
                 {"pass", pass}});
  return pass ? 0 : 1;
}

int cmd_el_check(const RunConfig& cfg) {
  const GroupSpec g = GroupSpec::parse(cfg.group);
  const Lagrangian w = Lagrangian::from_string(cfg.lagrangian, g);
  const Domain dom = make_domain(cfg, g.n);

  json rows = json::array();
  bool pass = true;
  for (int i = 0; i < cfg.trials; ++i) {
    const std::uint64_t s = cfg.seed + static_cast<std::uint64_t>(i);
    const CompactField eta = CompactField::sample(g, dom, cfg.amplitude, s);
    const CompactField carrier =
        CompactField::sample(g, dom, cfg.amplitude, s + 1000);
    const MapPtr u = (i % 2 == 0) ? identity_map(g.n) : flow_map(carrier, 0.7);
    const ElPairing p = el_pairing(w, u, eta, dom);
    const double gap = std::abs(p.pairing - p.flow_derivative);
    const double allowed =
        std::max(1e-5, 3.0 * (p.pairing_error + p.flow_error));
    pass = pass && gap <= allowed;
    rows.push_back({{"seed", s},
                    {"pairing", p.pairing},
                    {"flow_derivative", p.flow_derivative},
                    {"gap", gap},
                    {"allowed", allowed}});
  }
  emit(cfg, json{{"campaign", "el-check"},
                 {"lagrangian", w.name()},
                 {"group", g.str()},
                 {"trials", rows},
                 {"pass", pass}});
  return pass ? 0 : 1;
}

int cmd_legendre_hadamard(const RunConfig& cfg) {
  const GroupSpec g = GroupSpec::parse(cfg.group);
  const Lagrangian w = Lagrangian::from_string(cfg.lagrangian, g);
  const Expectation expect = parse_expectation(cfg.expect, w, g);

  Rng rng(cfg.seed);
  double worst = 0.0;
  double worst_identity_gap = 0.0;  // frob2: value must equal 2 |a|^2 |b|^2
  for (int s = 0; s < cfg.samples; ++s) {
    const Mat F = matrix_exp(0.4 * random_algebra_element(g, rng));
    const Vec a = rng.uniform_vec(g.n, -1.0, 1.0);
    const Vec b = rng.uniform_vec(g.n, -1.0, 1.0);
    if (a.norm() < 1e-3 || b.norm() < 1e-3) continue;
    const double lh = legendre_hadamard(w, F, a, b);
    worst = std::max(worst, std::abs(lh));
    if (w.name() == "frob2")
      worst_identity_gap =
          std::max(worst_identity_gap,
                   std::abs(lh - 2.0 * a.squaredNorm() * b.squaredNorm()));
  }
  bool pass = true;
  if (expect == Expectation::Null) pass = worst <= 1e-7;
  if (w.name() == "frob2") pass = worst_identity_gap <= 1e-7;
  emit(cfg, json{{"campaign", "legendre-hadamard"},
                 {"lagrangian", w.name()},
                 {"group", g.str()},
                 {"samples", cfg.samples},
                 {"max_abs", worst},
                 {"frob2_identity_gap", worst_identity_gap},
                 {"expected", expectation_name(expect)},
                 {"pass", pass}});
  return pass ? 0 : 1;
}

int cmd_rank_one(const RunConfig& cfg) {
  const GroupSpec g = GroupSpec::parse(cfg.group);
  const Lagrangian w = Lagrangian::from_string(cfg.lagrangian, g);
  const Expectation expect = parse_expectation(cfg.expect, w, g);
  const std::vector<double> t_grid = {-1.0, -0.5, 0.0, 0.5, 1.0};

  Rng rng(cfg.seed);
  double worst = 0.0;
  int used = 0;
  while (used < cfg.samples) {
    const Mat F = matrix_exp(0.4 * random_algebra_element(g, rng));
    const Vec a = rng.uniform_vec(g.n, -1.0, 1.0);
    Vec b = rng.uniform_vec(g.n, -1.0, 1.0);
    if (a.norm() < 1e-3) continue;
    b -= (a.dot(b) / a.squaredNorm()) * a;  // enforce a.b = 0 exactly enough
    b -= (a.dot(b) / a.squaredNorm()) * a;
    if (b.norm() < 1e-3) continue;
    worst = std::max(worst, rank_one_linearity_defect(w, F, a, b, t_grid));
    ++used;
  }
  bool pass = true;
  if (expect == Expectation::Null) pass = worst <= 1e-10;
  if (expect == Expectation::Falsified) pass = worst > 1e-3;
  emit(cfg, json{{"campaign", "rank-one"},
                 {"lagrangian", w.name()},
                 {"group", g.str()},
                 {"samples", cfg.samples},
                 {"max_defect", worst},
                 {"expected", expectation_name(expect)},
                 {"pass", pass}});
  return pass ? 0 : 1;
}

int cmd_sl2_classify(const RunConfig& cfg) {
  const GroupSpec g = GroupSpec::special_linear(2);
  const Lagrangian w = Lagrangian::from_string(cfg.lagrangian, g);
  const Expectation expect = parse_expectation(cfg.expect, w, g);

  Rng rng(cfg.seed);
  Eigen::Matrix<double, 5, 1> worst = Eigen::Matrix<double, 5, 1>::Zero();
  for (int s = 0; s < cfg.samples; ++s) {
    const double X = rng.uniform(0.5, 1.5);
    const double Y = rng.uniform(-1.0, 1.0);
    const double Z = rng.uniform(-1.0, 1.0);
    const auto r = sl2_pde_residuals(w, X, Y, Z).cwiseAbs();
    worst = worst.cwiseMax(r);
  }
  bool pass = true;
  if (expect == Expectation::Null) pass = worst.maxCoeff() <= 1e-6;
  if (expect == Expectation::Falsified) pass = worst.maxCoeff() > 1e-3;
  emit(cfg, json{{"campaign", "sl2-classify"},
                 {"lagrangian", w.name()},
                 {"samples", cfg.samples},
                 {"max_residuals", {worst[0], worst[1], worst[2], worst[3], worst[4]}},
                 {"expected", expectation_name(expect)},
                 {"pass", pass}});
  return pass ? 0 : 1;
}

int cmd_rescale_limit(const RunConfig& cfg) {
  const GroupSpec g = GroupSpec::parse(cfg.group);
  const Lagrangian w = Lagrangian::from_string(cfg.lagrangian, g);
  const Domain omega = make_domain(cfg, g.n);

  std::vector<int> ks;
  {
    std::stringstream ss(cfg.k_list);
    std::string item;
    while (std::getline(ss, item, ',')) ks.push_back(std::stoi(item));
  }
  if (ks.empty()) throw std::invalid_argument("--k-list must not be empty");

  // phi lives on the unit cube anchored so that Q_h sits inside omega
  const Vec x1 = omega.lower + 0.25 * omega.side();
  const Domain q1(x1, x1 + Vec::Ones(g.n), omega.resolution);
  const CompactField phi_field = CompactField::sample(g, q1, cfg.amplitude, cfg.seed);
  const FlowMap phi(phi_field, 1.0);
  const CompactField psi_field =
      CompactField::sample(g, omega, cfg.amplitude, cfg.seed + 1000);
  const MapPtr psi = flow_map(psi_field, 1.0);

  const auto rows = rescaling_limit_check(w, psi, phi, cfg.h, ks, omega);

  bool pass = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double band =
        std::max(rows[i - 1].error_estimate, rows[i].error_estimate);
    if (rows[i].defect > rows[i - 1].defect + band) pass = false;
  }

  json jrows = json::array();
  for (const auto& r : rows) {
    json jr = {{"k", r.k},
               {"integral", r.integral},
               {"target", r.target},
               {"defect", r.defect},
               {"error_estimate", r.error_estimate}};
    if (std::isfinite(r.est_order)) jr["est_order"] = r.est_order;
    jrows.push_back(jr);
  }
  emit(cfg, json{{"campaign", "rescale-limit"},
                 {"lagrangian", w.name()},
                 {"group", g.str()},
                 {"h", cfg.h},
                 {"rows", jrows},
                 {"pass", pass}});
  emit_csv(cfg, rows);
  return pass ? 0 : 1;
}

int cmd_calabi(const RunConfig& cfg) {
  const Tolerances tol = make_tolerances(cfg);
  RunConfig local = cfg;
  local.group = "sp:2";
  const Domain dom = make_domain(local, 2);
  Vec v = Vec::Zero(2);
  v[0] = 1.0;
  const CalabiReport report = calabi_component_campaign(
      v, dom, cfg.trials, cfg.seed, cfg.amplitude, tol);
  const bool pass =
      report.symplectic_half.verdict == Verdict::ConsistentNull &&
      report.general_half.verdict == Verdict::FalsifiedNull;
  json results = report.to_json();
  results["pass"] = pass;
  emit(cfg, results);
  return pass ? 0 : 1;
}

int cmd_conjecture_evidence(const RunConfig& cfg) {
  const GroupSpec g = GroupSpec::parse(cfg.group);
  const Lagrangian w = Lagrangian::from_string(cfg.lagrangian, g);
  const Domain dom = make_domain(cfg, g.n);
  const Tolerances tol = make_tolerances(cfg);
  const Expectation expect = parse_expectation(cfg.expect, w, g);

  const CampaignReport report =
      conjecture_evidence(w, g, cfg.trials, cfg.seed, dom, cfg.amplitude, tol);
  const bool pass = verdict_matches(report.verdict, expect);
  json results = report.to_json();
  results["expected"] = expectation_name(expect);
  results["pass"] = pass;
  emit(cfg, results);
  return pass ? 0 : 1;
}

int cmd_all(const RunConfig& cfg) {
  int failures = 0;
  const auto sub = [&](RunConfig c, int (*fn)(const RunConfig&),
                       const std::string& label) {
    c.out = cfg.out.empty() ? "" : cfg.out + "." + label + ".json";
    c.csv = "";
    try {
      if (fn(c) != 0) ++failures;
    } catch (const std::exception& e) {
      std::cerr << "[all] " << label << " failed: " << e.what() << "\n";
      ++failures;
    }
  };

  RunConfig base = cfg;
  base.trials = std::min(cfg.trials, 5);
  base.resolution = std::min(cfg.resolution, 32);

  RunConfig c = base;
  for (const char* name : {"det", "affine:1,0,0,0:2", "frob2", "calabi"}) {
    c.lagrangian = name;
    c.group = (std::string(name) == "calabi") ? "sp:2" : "sl:2";
    if (std::string(name) == "det" || std::string(name) == "frob2") c.group = "gl:2";
    sub(c, cmd_d_complex, std::string("d-complex-") + name);
  }

  c = base;
  c.group = "sl:2";
  c.lagrangian = "affine:1,0,0,0:2";
  sub(c, cmd_verify_null, "null-affine-sl2");
  c.lagrangian = "comp11sq";
  sub(c, cmd_verify_null, "null-comp11sq-sl2");
  c.group = "gl:2";
  c.lagrangian = "det";
  sub(c, cmd_verify_null, "null-det-gl2");
  c.lagrangian = "frob2";
  sub(c, cmd_verify_null, "null-frob2-gl2");

  c = base;
  c.samples = 50;
  c.lagrangian = "affine:1,2,3,4:5";
  sub(c, cmd_sl2_classify, "sl2-affine");
  c.lagrangian = "comp11sq";
  sub(c, cmd_sl2_classify, "sl2-comp11sq");
  c.lagrangian = "affine:1,2,3,4:5";
  sub(c, cmd_rank_one, "rank-one-affine");
  c.lagrangian = "frob2";
  c.group = "gl:2";
  sub(c, cmd_rank_one, "rank-one-frob2");
  c.lagrangian = "det";
  sub(c, cmd_legendre_hadamard, "lh-det");
  c.lagrangian = "frob2";
  sub(c, cmd_legendre_hadamard, "lh-frob2");

  c = base;
  sub(c, cmd_calabi, "calabi");

  c = base;
  c.group = "gl:2";
  c.lagrangian = "frob2";
  c.resolution = 16;
  c.k_list = "1,2,4";
  sub(c, cmd_rescale_limit, "rescale-frob2");

  emit(cfg, json{{"campaign", "all"}, {"failures", failures}});
  return failures == 0 ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& argv) {
  CLI::App app{"numerical checks for group-constrained variational invariants"};
  app.require_subcommand(1);

  RunConfig cfg;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--group", cfg.group, "group spec, e.g. sl:2, gl:3, sp:2, conf:2");
    sub->add_option("--lagrangian", cfg.lagrangian,
                    "det | frob2 | calabi | comp11sq | const:<c> | comp:<ij> | "
                    "affine:<a11,...>:<b> | minor:<key>=<c>,...");
    sub->add_option("--domain", cfg.domain, "box bounds lo..hi (default 0..1)");
    sub->add_option("--resolution", cfg.resolution, "quadrature points per axis");
    sub->add_option("--trials", cfg.trials, "number of seeded trials");
    sub->add_option("--samples", cfg.samples, "number of seeded samples");
    sub->add_option("--seed", cfg.seed, "base seed");
    sub->add_option("--amplitude", cfg.amplitude, "field amplitude");
    sub->add_option("--out", cfg.out, "write the JSON report here");
    sub->add_option("--csv", cfg.csv, "write the CSV table here (rescale-limit)");
    sub->add_option("--expect", cfg.expect, "auto | null | falsified | none");
    sub->add_option("--h", cfg.h, "rescaling cube parameter (side 1/h)");
    sub->add_option("--k-list", cfg.k_list, "comma-separated k values");
    sub->add_option("--tol-override", cfg.tol_overrides,
                    "key=value, keys: group,null,falsify,consist,tangency,d2");
  };

  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&);
  };
  const std::vector<Entry> entries = {
      {"verify-null", "invariance campaign for one lagrangian", cmd_verify_null},
      {"d-complex", "max |D(Dw)| over seeded samples", cmd_d_complex},
      {"el-check", "Euler-Lagrange pairing vs flow derivative", cmd_el_check},
      {"legendre-hadamard", "rank-one Hessian contraction", cmd_legendre_hadamard},
      {"rank-one", "linearity along rank-one lines", cmd_rank_one},
      {"sl2-classify", "second-order chart system on SL(2)", cmd_sl2_classify},
      {"rescale-limit", "periodic rescaling convergence table", cmd_rescale_limit},
      {"calabi", "pullback component of y dx on Sp and GL flows", cmd_calabi},
      {"conjecture-evidence", "minors fit after a consistent campaign",
       cmd_conjecture_evidence},
      {"all", "compact battery of the above", cmd_all},
  };
  for (const auto& e : entries) add_common(app.add_subcommand(e.name, e.help));

  std::vector<std::string> reversed(argv.rbegin(), argv.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (const auto& e : entries)
      if (app.get_subcommand(e.name)->parsed()) {
        cfg.command = e.name;
        return e.fn(cfg);
      }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace nullag::cli
