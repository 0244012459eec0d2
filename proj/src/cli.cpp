#include "sdym/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sdym/numeric.hpp"
#include "sdym/operators.hpp"
#include "sdym/suites.hpp"

namespace sdym::cli {

namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Settings shared by all subcommands. Precedence: built-in defaults, then the
/// config file, then flags.
struct SuiteConfig {
  int grid = 16;
  double tolerance = 1e-8;
  int depth = 2;
  std::string seed = "M";
  std::string format = "text";
  std::uint64_t random_seed = 20240611;
  int probes = 50;

  json to_json() const {
    return {{"grid", grid},   {"tolerance", tolerance},     {"depth", depth},
            {"seed", seed},   {"format", format},           {"random_seed", random_seed},
            {"probes", probes}};
  }

  void validate() const {
    if (grid < 5) throw ConfigError("grid must have at least 5 points per axis");
    if (!(tolerance > 0)) throw ConfigError("tolerance must be positive");
    if (depth < 0) throw ConfigError("depth must be non-negative");
    if (probes < 1) throw ConfigError("probes must be positive");
    if (format != "text" && format != "json") throw ConfigError("format must be text or json");
  }
};

void merge_file(SuiteConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "grid") c.grid = v.get<int>();
      else if (key == "tolerance") c.tolerance = v.get<double>();
      else if (key == "depth") c.depth = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::string>();
      else if (key == "format") c.format = v.get<std::string>();
      else if (key == "random_seed") c.random_seed = v.get<std::uint64_t>();
      else if (key == "probes") c.probes = v.get<int>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

struct Report {
  std::string command;
  std::vector<std::string> outputs;
  std::vector<CheckResult> checks;
  std::vector<SuiteResult> suites;
};

std::string number_text(double v) { return json(v).dump(); }

json check_json(const CheckResult& c) {
  json j{{"name", c.name},
         {"status", std::string(to_string(c.status))},
         {"method", c.method},
         {"residual", c.residual},
         {"details", c.details}};
  j["value"] = c.value ? json(*c.value) : json(nullptr);
  j["threshold"] = c.threshold ? json(*c.threshold) : json(nullptr);
  return j;
}

struct Tally {
  int pass = 0;
  int fail = 0;
  int inconclusive = 0;
};

Tally tally(const Report& r) {
  Tally t;
  auto add = [&](Verdict v) {
    if (v == Verdict::pass) ++t.pass;
    else if (v == Verdict::fail) ++t.fail;
    else ++t.inconclusive;
  };
  for (const auto& c : r.checks) add(c.status);
  for (const auto& s : r.suites) {
    for (const auto& c : s.checks) add(c.status);
  }
  return t;
}

bool report_ok(const Report& r, bool allow_inconclusive) {
  Tally t = tally(r);
  if (t.fail > 0 || (t.inconclusive > 0 && !allow_inconclusive)) return false;
  return std::all_of(r.suites.begin(), r.suites.end(),
                     [&](const SuiteResult& s) { return s.passed(allow_inconclusive); });
}

std::string_view upper(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

void print_check(std::ostream& os, const CheckResult& c, const std::string& indent) {
  os << indent << std::left << std::setw(13) << upper(c.status) << c.name;
  if (!c.method.empty()) os << "  [" << c.method << "]";
  if (c.value) os << "  value=" << number_text(*c.value);
  if (c.threshold) os << "  threshold=" << number_text(*c.threshold);
  os << "\n";
  if (c.status != Verdict::pass && !c.residual.empty() && c.residual != "0") {
    os << indent << "             residual: " << c.residual << "\n";
  }
  if (!c.details.empty()) os << indent << "             " << c.details << "\n";
}

void emit(std::ostream& os, const Report& r, const SuiteConfig& cfg, bool allow_inconclusive) {
  const bool ok = report_ok(r, allow_inconclusive);
  const Tally t = tally(r);
  if (cfg.format == "json") {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["command"] = r.command;
    j["random_seed"] = cfg.random_seed;
    j["config"] = cfg.to_json();
    j["outputs"] = r.outputs;
    j["checks"] = json::array();
    for (const auto& c : r.checks) j["checks"].push_back(check_json(c));
    j["suites"] = json::array();
    for (const auto& s : r.suites) {
      json sj{{"criterion", s.criterion},
              {"title", s.title},
              {"verdict", s.passed(allow_inconclusive) ? "pass" : "fail"},
              {"seconds", s.seconds},
              {"runtime_limit", s.runtime_limit > 0 ? json(s.runtime_limit) : json(nullptr)},
              {"checks", json::array()}};
      for (const auto& c : s.checks) sj["checks"].push_back(check_json(c));
      j["suites"].push_back(std::move(sj));
    }
    j["summary"] = {{"pass", t.pass}, {"fail", t.fail}, {"inconclusive", t.inconclusive},
                    {"ok", ok}};
    os << j.dump(2) << "\n";
    return;
  }
  for (const auto& line : r.outputs) os << line << "\n";
  for (const auto& c : r.checks) print_check(os, c, "");
  if (!r.suites.empty()) {
    os << "\n" << std::left << std::setw(4) << "#" << std::setw(42) << "suite" << std::setw(8)
       << "verdict" << "seconds\n";
    for (const auto& s : r.suites) {
      std::ostringstream secs;
      secs << std::fixed << std::setprecision(2) << s.seconds;
      if (s.runtime_limit > 0) secs << " (limit " << s.runtime_limit << ")";
      os << std::left << std::setw(4) << s.criterion << std::setw(42) << s.title << std::setw(8)
         << (s.passed(allow_inconclusive) ? "PASS" : "FAIL") << secs.str() << "\n";
    }
    for (const auto& s : r.suites) {
      os << "\n[" << s.criterion << "] " << s.title << "\n";
      for (const auto& c : s.checks) print_check(os, c, "  ");
    }
  }
  if (t.pass + t.fail + t.inconclusive > 0) {
    os << "summary: " << t.pass << " pass, " << t.fail << " fail, " << t.inconclusive
       << " inconclusive; random seed " << cfg.random_seed << "\n";
  }
}

// ---------------------------------------------------------------------------

Characteristic characteristic(const std::string& text, const std::string& target) {
  Expr e = parse(text);
  if (target == "X") return Characteristic::on_x(e);
  if (target == "J") return Characteristic::on_j(e);
  if (target != "auto") throw ConfigError("target must be auto, X or J");
  bool j = e.contains_head(Head::J) || e.contains_head(Head::Jinv);
  return j ? Characteristic::on_j(e) : Characteristic::on_x(e);
}

std::set<std::string> split_names(const std::string& s) {
  std::set<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (!item.empty()) out.insert(item);
  }
  return out;
}

std::set<std::string> constants_of(const Expr& e) {
  std::set<std::string> out;
  e.none_of_atoms([&](const JetAtom& a) {
    if (a.is_constant()) out.insert(a.name);
    return false;
  });
  return out;
}

numeric::Matrix matrix_arg(const std::string& text) {
  try {
    return numeric::parse_matrix(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad matrix: ") + e.what());
  }
}

CheckResult fold(std::string name, const std::vector<VerificationReport>& reps) {
  CheckResult c;
  c.name = std::move(name) + " (" + std::to_string(reps.size()) + " probes)";
  c.status = Verdict::pass;
  c.method = "per-probe";
  for (const auto& r : reps) {
    if (r.status != Verdict::pass) {
      c.status = r.status;
      c.residual = to_pretty_string(r.residual);
      c.details = "first failure: " + r.name + "; " + r.details;
      break;
    }
  }
  return c;
}

const char* kFooter = R"(Exit codes:
  0  all checks passed
  1  a check failed (or was inconclusive without --allow-inconclusive)
  2  usage error: unknown subcommand or bad flags
  3  malformed expression
  4  config violation (bad value, unknown key, mismatched target)
  5  file could not be read or written
  6  internal error

Expressions use the DSL: X, J, Jinv with jet suffixes (X_yyb, J_z), constant
matrices (M, N, ...), coordinates y, z, yb, lam, products, [a, b] and Int_z(...).

A JSON file with keys grid, tolerance, depth, seed, format, random_seed, probes
supplies defaults; its path comes from --config or the SDYM_CONFIG variable.)";

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symmetry and recursion operator checks for SDYM3 / PSDYM3", "sdym"};
  app.footer(kFooter);
  app.require_subcommand(1);
  app.fallthrough();

  SuiteConfig flags;
  std::string config_path;
  bool allow_inconclusive = false;
  auto* o_config = app.add_option("--config", config_path, "JSON config file");
  auto* o_format = app.add_option("--format", flags.format, "Report format: text or json");
  auto* o_seed_rng = app.add_option("--seed-rng", flags.random_seed, "Random seed for probes");
  auto* o_tol = app.add_option("--tolerance", flags.tolerance, "Numeric tolerance");
  auto* o_grid = app.add_option("--grid", flags.grid, "Grid points per axis on [-1, 1]^3");
  auto* o_probes = app.add_option("--probes", flags.probes, "Random probes per identity");
  app.add_flag("--allow-inconclusive", allow_inconclusive,
               "Do not count inconclusive checks as failures");
  (void)o_config;

  // per-command options
  std::string family = "abelian", h_text = "diag(1,-1)", c_text = "[[0,1],[0,0]]";
  std::string snapshot_in, snapshot_out;
  auto* cs = app.add_subcommand("check-solution", "Field equations and Baecklund relations on a sample solution");
  cs->add_option("--family", family, "abelian or shear")->check(CLI::IsMember({"abelian", "shear"}));
  cs->add_option("--H", h_text, "Matrix H (abelian) or K (shear)");
  cs->add_option("--C", c_text, "Nilpotent matrix C (shear)");
  cs->add_option("--snapshot", snapshot_in, "Read fields from a snapshot instead");
  cs->add_option("--write-snapshot", snapshot_out, "Write the sampled fields");

  std::string seed_text, target = "auto";
  int n_steps = 1;
  auto* ar = app.add_subcommand("apply-recursion", "Apply R (X seeds) or T (J seeds) n times");
  auto* o_ar_seed = ar->add_option("--seed", seed_text, "Seed characteristic");
  ar->add_option("--n", n_steps, "Number of applications");
  ar->add_option("--target", target, "auto, X or J");

  std::string traceless_text;
  bool verify = false;
  auto* hi = app.add_subcommand("hierarchy", "List op^k seed for k <= n with trace status");
  auto* o_hi_seed = hi->add_option("--seed", seed_text, "Seed characteristic");
  auto* o_hi_n = hi->add_option("--n", n_steps, "Highest power (default: config depth)");
  hi->add_option("--target", target, "auto, X or J");
  hi->add_option("--traceless", traceless_text, "Comma list of traceless constants (default: all)");
  hi->add_flag("--verify", verify, "Also check the symmetry condition of every member");

  std::string expr_text, system_name;
  auto* sy = app.add_subcommand("check-symmetry", "Linearized equation for a characteristic");
  sy->add_option("--expr", expr_text, "Characteristic")->required();
  sy->add_option("--target", target, "auto, X or J");
  sy->add_option("--system", system_name, "PSDYM3 (X target) or SDYM3 (J target)");

  std::string phi_text = "X_y", probe_text;
  auto* l17 = app.add_subcommand("lemma17", "Delta R - R Delta = Int_z([Phi_z, .])");
  l17->add_option("--phi", phi_text, "X characteristic");
  l17->add_option("--probe", probe_text, "Probe expression (default: random probes)");

  auto* id5 = app.add_subcommand("identity5", "Commutator of covariant and total derivatives");
  id5->add_option("--expr", expr_text, "Probe expression (default: random probes)");
  auto* zc = app.add_subcommand("zero-curvature", "[A_y, A_z] e = -[G[X], e]");
  zc->add_option("--expr", expr_text, "Probe expression (default: random probes)");

  std::string p_tag = "R", s_tag = "T";
  std::vector<std::string> q_texts;
  auto* iso = app.add_subcommand("iso-check", "P I{Q} = I{S Q}");
  iso->add_option("--q", q_texts, "J characteristics (default: J*M1, J*M2, J_y)");
  iso->add_option("--p", p_tag, "Operator on X characteristics")->check(CLI::IsMember({"R", "T"}));
  iso->add_option("--s", s_tag, "Operator on J characteristics")->check(CLI::IsMember({"R", "T"}));

  std::string qi_text, qj_text;
  auto* br = app.add_subcommand("bracket", "Lie bracket of two characteristics");
  br->add_option("--a", qi_text, "First characteristic")->required();
  br->add_option("--b", qj_text, "Second characteristic")->required();
  br->add_option("--target", target, "auto, X or J");

  std::string seed_op = "d_y";
  std::vector<std::string> probe_texts;
  auto* ab = app.add_subcommand("abelian", "Commuting hierarchy from D_y or scaling");
  ab->add_option("--seed-op", seed_op, "d_y or scaling")->check(CLI::IsMember({"d_y", "scaling"}));
  auto* o_ab_depth = ab->add_option("--depth", n_steps, "Largest index (default: config depth)");
  ab->add_option("--probe", probe_texts, "Probes for the hypotheses");

  double lax_a = 1.0, lax_lam = 0.5;
  std::string psi_text = "J*M";
  auto* lx = app.add_subcommand("lax", "Lax pair residuals");
  lx->add_option("--a", lax_a, "Wave parameter a");
  lx->add_option("--lambda", lax_lam, "Spectral parameter");
  lx->add_option("--H", h_text, "Matrix H of the abelian solution");
  lx->add_option("--psi", psi_text, "Symbolic Psi for the reduced residuals");

  std::string mode = "fd", q_text = "J_y";
  auto* co = app.add_subcommand("conservation", "Conservation law residual on the abelian solution");
  co->add_option("--q", q_text, "J characteristic");
  co->add_option("--mode", mode, "fd or analytic")->check(CLI::IsMember({"fd", "analytic"}));
  co->add_option("--H", h_text, "Matrix H of the abelian solution");

  auto* sa = app.add_subcommand("suite-all", "Full acceptance matrix");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  SuiteConfig cfg;
  Report report;
  try {
    if (config_path.empty()) {
      if (const char* env = std::getenv(kConfigEnv); env && *env) config_path = env;
    }
    if (!config_path.empty()) merge_file(cfg, config_path);
    if (o_format->count()) cfg.format = flags.format;
    if (o_seed_rng->count()) cfg.random_seed = flags.random_seed;
    if (o_tol->count()) cfg.tolerance = flags.tolerance;
    if (o_grid->count()) cfg.grid = flags.grid;
    if (o_probes->count()) cfg.probes = flags.probes;
    cfg.validate();

    CheckPolicy policy;
    policy.tolerance = cfg.tolerance;
    CLI::App* cmd = app.get_subcommands().front();
    report.command = cmd->get_name();

    if (cmd == cs) {
      using namespace numeric;
      NumericSolution sol;
      if (!snapshot_in.empty()) {
        std::ifstream in(snapshot_in);
        if (!in) throw IoError("cannot read snapshot '" + snapshot_in + "'");
        try {
          sol = read_snapshot(in);
        } catch (const std::invalid_argument& e) {
          throw IoError(e.what());
        }
      } else {
        Grid g = Grid::cube(cfg.grid);
        try {
          sol = family == "abelian" ? make_abelian_solution(matrix_arg(h_text), g)
                                    : make_shear_solution(matrix_arg(h_text), matrix_arg(c_text), g);
        } catch (const ConfigError&) {
          throw;
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
      report.outputs.push_back("solution: " + sol.provenance);
      const bool analytic = sol.closed_form != nullptr;
      const double hz = sol.grid.h(1);
      const double fd_tol = 10 * hz * hz;
      const double tol = analytic ? std::min(cfg.tolerance, 1e-10) : fd_tol;
      const std::string how = analytic ? "analytic" : "finite difference";
      if (sol.j) {
        report.checks.push_back(threshold_check("residual_F", residual_F(sol), tol, how));
        report.checks.push_back(threshold_check("det J = 1", max_det_deviation(sol), analytic ? tol : 1e-8, "pointwise"));
      }
      if (sol.x) {
        report.checks.push_back(threshold_check("residual_G", residual_G(sol), tol, how));
        report.checks.push_back(threshold_check("tr X = 0", max_trace(sol), 1e-10, "pointwise"));
      }
      if (sol.x && sol.j) {
        report.checks.push_back(threshold_check("bt_residual", bt_residual(sol), tol, how));
      }
      if (!snapshot_out.empty()) {
        std::ofstream os(snapshot_out);
        if (!os) throw IoError("cannot write snapshot '" + snapshot_out + "'");
        write_snapshot(os, sol);
      }
    } else if (cmd == ar) {
      if (!o_ar_seed->count()) seed_text = cfg.seed;
      if (n_steps < 0) throw ConfigError("--n must be non-negative");
      Characteristic c = characteristic(seed_text, target);
      for (int k = 0; k < n_steps; ++k) c = c.target == Target::X ? recursion_R(c) : recursion_T(c);
      report.outputs.push_back(to_pretty_string(c.expr));
    } else if (cmd == hi) {
      if (!o_hi_seed->count()) seed_text = cfg.seed;
      if (!o_hi_n->count()) n_steps = cfg.depth;
      if (n_steps < 0) throw ConfigError("--n must be non-negative");
      Characteristic seed = characteristic(seed_text, target);
      auto traceless = traceless_text.empty() ? constants_of(seed.expr) : split_names(traceless_text);
      Hierarchy h = hierarchy(seed, n_steps, traceless);
      const char* op = h.op == OperatorTag::R ? "R" : "T";
      for (std::size_t k = 0; k < h.items.size(); ++k) {
        report.outputs.push_back(std::string(op) + "^" + std::to_string(k) + ": " +
                                 to_pretty_string(h.items[k].expr));
        CheckResult c;
        c.name = "trace of member " + std::to_string(k);
        c.method = "trace by cyclicity";
        c.status = h.trace[k] == TraceStatus::yes  ? Verdict::pass
                   : h.trace[k] == TraceStatus::no ? Verdict::fail
                                                   : Verdict::inconclusive;
        report.checks.push_back(std::move(c));
        if (verify) {
          VerificationReport v;
          if (k > 0) {
            auto x_side = [&](const Characteristic& c) {
              return c.target == Target::X ? c : Characteristic::on_x(reduce_mod(
                                                     Expr::jinv() * c.expr, EquationSystem::coupled()));
            };
            v = check_recursion_step(x_side(h.items[k - 1]), x_side(h.items[k]), policy);
          } else {
            Expr r = seed.target == Target::X ? symmetry_residual_psdym3(seed) : symmetry_residual_sdym3(seed);
            v = verify_zero("", r, policy);
          }
          v.name = "symmetry of member " + std::to_string(k);
          report.checks.push_back(to_check(v));
        }
      }
    } else if (cmd == sy) {
      std::string t = target;
      if (!system_name.empty()) {
        const EquationSystem* sys = nullptr;
        try {
          sys = &EquationSystem::by_name(system_name);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        std::string implied = sys->kind() == EquationSystem::Kind::sdym3 ? "J" : "X";
        if (sys->kind() == EquationSystem::Kind::coupled) throw ConfigError("use PSDYM3 or SDYM3");
        if (t != "auto" && t != implied) throw ConfigError("--system contradicts --target");
        t = implied;
      }
      Characteristic c = characteristic(expr_text, t);
      bool x = c.target == Target::X;
      Expr r = x ? symmetry_residual_psdym3(c) : symmetry_residual_sdym3(c);
      report.checks.push_back(to_check(
          verify_zero(std::string(x ? "PSDYM3" : "SDYM3") + " symmetry of " + to_pretty_string(c.expr),
                      r, policy)));
    } else if (cmd == l17) {
      Characteristic phi = characteristic(phi_text, "X");
      if (!probe_text.empty()) {
        report.checks.push_back(to_check(check_lemma17(phi, parse(probe_text))));
      } else {
        std::vector<VerificationReport> reps;
        for (const auto& p : identity_probes(cfg.random_seed, cfg.probes, false)) {
          reps.push_back(check_lemma17(phi, p));
        }
        report.checks.push_back(fold("lemma17 phi=" + phi_text, reps));
      }
    } else if (cmd == id5 || cmd == zc) {
      auto check = [&](const Expr& e) { return cmd == id5 ? check_identity5(e) : check_zero_curvature(e); };
      if (!expr_text.empty()) {
        report.checks.push_back(to_check(check(parse(expr_text))));
      } else {
        std::vector<VerificationReport> reps;
        for (const auto& p : identity_probes(cfg.random_seed, cfg.probes, cmd == id5)) reps.push_back(check(p));
        report.checks.push_back(fold(cmd == id5 ? "identity5" : "zero-curvature", reps));
      }
    } else if (cmd == iso) {
      if (q_texts.empty()) q_texts = {"J*M1", "J*M2", "J_y"};
      OperatorTag p = p_tag == "R" ? OperatorTag::R : OperatorTag::T;
      OperatorTag s = s_tag == "R" ? OperatorTag::R : OperatorTag::T;
      for (const auto& q : q_texts) {
        report.checks.push_back(to_check(check_I_equivalence(p, s, characteristic(q, "J"))));
      }
    } else if (cmd == br) {
      Characteristic a = characteristic(qi_text, target);
      Characteristic b = characteristic(qj_text, target);
      if (a.target != b.target) throw ConfigError("bracket operands have different targets");
      report.outputs.push_back(to_pretty_string(lie_bracket(a, b).expr));
      if (a.target == Target::J) report.checks.push_back(to_check(check_homomorphy(a, b)));
    } else if (cmd == ab) {
      if (!o_ab_depth->count()) n_steps = cfg.depth;
      if (n_steps < 0) throw ConfigError("--depth must be non-negative");
      std::vector<Expr> probes;
      for (const auto& p : probe_texts) probes.push_back(parse(p));
      AbelianSeed s = seed_op == "d_y" ? AbelianSeed::d_y : AbelianSeed::scaling;
      for (const auto& r : check_abelian(s, n_steps, probes)) report.checks.push_back(to_check(r));
    } else if (cmd == lx) {
      using namespace numeric;
      Matrix h = matrix_arg(h_text);
      NumericSolution sol;
      try {
        sol = make_abelian_solution(h, Grid::cube(cfg.grid));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      LaxResidual r = lax_residual(sol, h, lax_a, lax_lam);
      report.checks.push_back(threshold_check("Lax first equation", r.first, cfg.tolerance, "analytic"));
      report.checks.push_back(threshold_check("Lax second equation", r.second, cfg.tolerance, "analytic"));
      report.checks.push_back(threshold_check("compatibility", r.compatibility, cfg.tolerance, "analytic"));
      LaxSymbolic s = lax_residual_symbolic(parse(psi_text));
      report.outputs.push_back("first:  " + to_pretty_string(s.first));
      report.outputs.push_back("second: " + to_pretty_string(s.second));
      report.checks.push_back(to_check(verify_zero("symbolic compatibility for Psi=" + psi_text,
                                                   s.compatibility, policy)));
    } else if (cmd == co) {
      using namespace numeric;
      NumericSolution sol;
      try {
        sol = make_abelian_solution(matrix_arg(h_text), Grid::cube(cfg.grid));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      EvalOptions eo;
      double tol = cfg.tolerance;
      if (mode == "fd") {
        sol.closed_form.reset();
        eo.mode = EvalMode::finite_difference;
        tol = 10 * sol.grid.h(1) * sol.grid.h(1);
      }
      Expr q = parse(q_text);
      report.checks.push_back(threshold_check("conservation Q=" + to_pretty_string(q),
                                              conservation_residual(sol, q, eo), tol,
                                              mode == "fd" ? "finite difference" : "analytic"));
    } else if (cmd == sa) {
      SuiteOptions so;
      so.random_seed = cfg.random_seed;
      so.probes = cfg.probes;
      so.grid = cfg.grid;
      for (int k = 1; k <= kCriteria; ++k) report.suites.push_back(run_criterion(k, so));
    }
  } catch (const ParseError& e) {
    err << "error: malformed expression: " << e.what() << "\n";
    return kMalformedExpression;
  } catch (const ConfigError& e) {
    err << "error: config violation: " << e.what() << "\n";
    return kConfigViolation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "error: config violation: " << e.what() << "\n";
    return kConfigViolation;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kInternalError;
  }

  emit(out, report, cfg, allow_inconclusive);
  return report_ok(report, allow_inconclusive) ? kOk : kCheckFailed;
}

}  // namespace sdym::cli
