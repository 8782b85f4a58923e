// lgpos: command-line front end for the verification suites.
//
// Option precedence: command-line flags > --config file > --manifest > defaults.
// Values from the config file and manifest are appended as extra tokens for
// every option the command line did not set, then the command line is parsed
// a second time.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lgpos/report/commands.hpp"

namespace fs = std::filesystem;
using namespace lgpos;
using namespace lgpos::report;

namespace {

constexpr int kExitBadInput = 3;

// Everything bound to CLI11 options lives here so a fresh App can be built per parse.
struct State {
  std::string out = "lgpos-out";
  std::string config;
  std::string manifest;
  bool quiet = false;
  CommonArgs common;

  FpArgs fp;
  std::string fp_t;
  HankelArgs hankel;
  TpArgs tp;
  std::string tp_xs, tp_ys;
  BiorthArgs biorth;
  std::string biorth_phase;
  MultivariateArgs mv;
  FourierArgs fourier;
  std::string fourier_s = "0.5,1,2";
  SuiteArgs suite;
};

const std::vector<std::string> kCommands = {"fp", "hankel", "tp", "biorth", "multivariate", "fourier-check", "suite"};

void build(CLI::App& app, State& s) {
  app.require_subcommand(0, 1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));
  app.add_option("--out", s.out, "output directory")->capture_default_str();
  app.add_option("--config", s.config, "flat key = value config file");
  app.add_option("--manifest", s.manifest, "replay a manifest.json");
  app.add_option("--cap-digits", s.common.cap_digits, "precision cap in decimal digits")
      ->capture_default_str()
      ->check(CLI::Range(10, 100000));
  app.add_option("--threads", s.common.threads, "worker threads (0 = hardware)")->capture_default_str();
  app.add_option("--seed", s.common.seed, "base RNG seed")->capture_default_str();
  app.add_flag("--quiet", s.quiet, "suppress the summary");

  auto* fp = app.add_subcommand("fp", "evaluate the one-variable kernel F_p");
  fp->add_option("--d", s.fp.d)->capture_default_str();
  fp->add_option("--p", s.fp.p)->capture_default_str();
  fp->add_option("--t", s.fp_t, "comma list of t values");
  fp->add_option("--t-grid", s.fp.t_grid, "grid of t: log:a..b:n, lin:a..b:n or a list");
  fp->add_option("--u-grid", s.fp.u_grid, "grid of u = 2 log t");
  fp->add_option("--tol", s.fp.tol)->capture_default_str();
  fp->add_option("--route", s.fp.route)
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "series", "quadrature", "both"}));

  auto* hk = app.add_subcommand("hankel", "certified Hankel determinant scan");
  hk->add_option("--d", s.hankel.d)->capture_default_str();
  hk->add_option("--p", s.hankel.p)->capture_default_str();
  hk->add_option("--N-max", s.hankel.N_max)->capture_default_str()->check(CLI::Range(1, 64));
  hk->add_option("--u-grid", s.hankel.u_grid)->capture_default_str();
  hk->add_option("--tol", s.hankel.tol)->capture_default_str();

  auto* tp = app.add_subcommand("tp", "total positivity on random or explicit grids");
  tp->add_option("--d", s.tp.d)->capture_default_str();
  tp->add_option("--p", s.tp.p)->capture_default_str();
  tp->add_option("--N", s.tp.N, "grid size")->capture_default_str()->check(CLI::Range(1, 32));
  tp->add_option("--grids", s.tp.grids, "number of seeded grids")->capture_default_str();
  tp->add_option("--lo", s.tp.lo)->capture_default_str();
  tp->add_option("--hi", s.tp.hi)->capture_default_str();
  tp->add_option("--xs", s.tp_xs, "explicit x grid (comma list)");
  tp->add_option("--ys", s.tp_ys, "explicit y grid (comma list)");

  auto* bi = app.add_subcommand("biorth", "moment matrices and biorthogonal systems");
  bi->add_option("--d", s.biorth.d)->capture_default_str();
  bi->add_option("--p", s.biorth.p)->capture_default_str();
  bi->add_flag("--full", s.biorth.full, "all residues; --N is then the top degree");
  bi->add_option("--N", s.biorth.N)->capture_default_str()->check(CLI::Range(1, 64));
  bi->add_option("--t", s.biorth.t)->capture_default_str()->check(CLI::NonNegativeNumber);
  bi->add_option("--tol", s.biorth.tol)->capture_default_str();
  bi->add_option("--phase", s.biorth_phase, "also check the phase normal form at this angle");

  auto* mvc = app.add_subcommand("multivariate", "multivariate integral estimates");
  mvc->add_option("--n", s.mv.n)->capture_default_str()->check(CLI::Range(1, 16));
  mvc->add_option("--d", s.mv.d)->capture_default_str()->check(CLI::Range(1, 64));
  mvc->add_option("--W", s.mv.W, "zero | random:SEED | separable:a1,.. | monomial:e1,.. | FILE")->capture_default_str();
  mvc->add_option("--rho", s.mv.rho, "one | abs2:SPEC")->capture_default_str();
  mvc->add_option("--samples", s.mv.samples)->capture_default_str();
  mvc->add_option("--method", s.mv.method)
      ->capture_default_str()
      ->check(CLI::IsMember({"direct", "sphere", "both"}));
  mvc->add_option("--count", s.mv.count, "consecutive random seeds")->capture_default_str()->check(CLI::Range(1, 10000));

  auto* fc = app.add_subcommand("fourier-check", "Fourier transform against the Gamma formula");
  fc->add_option("--d", s.fourier.d)->capture_default_str();
  fc->add_option("--p", s.fourier.p)->capture_default_str();
  fc->add_option("--s", s.fourier_s, "comma list of frequencies")->capture_default_str();
  fc->add_option("--tol", s.fourier.tol)->capture_default_str();
  fc->add_option("--M", s.fourier.M, "partial product length")->capture_default_str();
  fc->add_option("--max-discrepancy", s.fourier.max_discrepancy)->capture_default_str();
  fc->add_option("--product-tolerance", s.fourier.product_tolerance)->capture_default_str();

  auto* su = app.add_subcommand("suite", "acceptance criteria 1-9 plus a determinism rerun");
  su->add_flag("--quick", s.suite.quick, "reduced grids");
  su->add_option("--inject-gamma-fault", s.suite.gamma_fault, "relative error injected into Gamma (testing only)")
      ->capture_default_str();
}

CLI::App* selected(CLI::App& app) {
  auto subs = app.get_subcommands();
  return subs.empty() ? nullptr : subs.front();
}

bool given(CLI::App& app, CLI::App* sub, const std::string& key) {
  for (CLI::App* a : {sub, &app}) {
    if (!a) continue;
    if (auto* opt = a->get_option_no_throw("--" + key); opt && opt->count() > 0) return true;
  }
  return false;
}

bool known(CLI::App& app, CLI::App* sub, const std::string& key) {
  return (sub && sub->get_option_no_throw("--" + key)) || app.get_option_no_throw("--" + key);
}

CommandResult dispatch(const std::string& cmd, State& s) {
  if (cmd == "fp") {
    if (!s.fp_t.empty()) s.fp.t = parse_grid(s.fp_t);
    return cmd_fp(s.fp, s.common);
  }
  if (cmd == "hankel") return cmd_hankel(s.hankel, s.common);
  if (cmd == "tp") {
    if (!s.tp_xs.empty()) s.tp.xs = parse_grid(s.tp_xs);
    if (!s.tp_ys.empty()) s.tp.ys = parse_grid(s.tp_ys);
    if (s.tp.xs.size() != s.tp.ys.size()) throw std::invalid_argument("--xs and --ys need the same length");
    return cmd_tp(s.tp, s.common);
  }
  if (cmd == "biorth") {
    if (!s.biorth_phase.empty()) s.biorth.phase = std::stod(s.biorth_phase);
    return cmd_biorth(s.biorth, s.common);
  }
  if (cmd == "multivariate") return cmd_multivariate(s.mv, s.common);
  if (cmd == "fourier-check") {
    s.fourier.s = parse_grid(s.fourier_s);
    return cmd_fourier(s.fourier, s.common);
  }
  return cmd_suite(s.suite, s.common);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> tokens(argv + 1, argv + argc);

  // First pass: find the subcommand and which options were set explicitly.
  State s;
  auto app = std::make_unique<CLI::App>("certified positivity checks for Gaussian-type kernels", "lgpos");
  build(*app, s);
  try {
    std::vector<std::string> rev(tokens.rbegin(), tokens.rend());
    app->parse(rev);
  } catch (const CLI::ParseError& e) {
    return app->exit(e);
  }

  std::string command;
  if (CLI::App* sub = selected(*app)) command = sub->get_name();
  std::map<std::string, std::string> merged;
  try {
    if (!s.manifest.empty()) {
      RunManifest m = manifest_from_json(read_json(s.manifest));
      if (command.empty()) command = m.command;
      if (m.command != command) throw std::invalid_argument("manifest is for '" + m.command + "', not '" + command + "'");
      merged = m.params;
      merged["seed"] = std::to_string(m.seed);
      merged["cap-digits"] = std::to_string(m.cap_digits);
    }
    if (!s.config.empty()) {
      for (auto& [k, v] : read_config_file(s.config)) {
        if (k == "command") {
          if (command.empty()) command = v;
          continue;
        }
        merged[k] = v;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "lgpos: " << e.what() << "\n";
    return kExitBadInput;
  }
  if (command.empty()) {
    std::cerr << app->help();
    return kExitBadInput;
  }
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    std::cerr << "lgpos: unknown command '" << command << "'\n";
    return kExitBadInput;
  }

  // Second pass with the merged values appended after the subcommand.
  std::vector<std::string> full = tokens;
  if (!selected(*app)) full.push_back(command);
  CLI::App* sub1 = app->get_subcommand(command);
  for (const auto& [k, v] : merged) {
    if (v.empty() || given(*app, sub1, k)) continue;
    if (!known(*app, sub1, k)) {
      std::cerr << "lgpos: ignoring unknown key '" << k << "'\n";
      continue;
    }
    full.push_back("--" + k + "=" + v);
  }
  State s2;
  auto app2 = std::make_unique<CLI::App>("certified positivity checks for Gaussian-type kernels", "lgpos");
  build(*app2, s2);
  try {
    std::vector<std::string> rev(full.rbegin(), full.rend());
    app2->parse(rev);
  } catch (const CLI::ParseError& e) {
    return app2->exit(e);
  }

  auto t0 = std::chrono::steady_clock::now();
  std::string started = utc_timestamp();
  CommandResult r;
  try {
    r = dispatch(command, s2);
  } catch (const std::invalid_argument& e) {
    std::cerr << "lgpos: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::domain_error& e) {
    std::cerr << "lgpos: " << e.what() << "\n";
    return kExitBadInput;
  }
  r.report.manifest.started_at = started;
  r.report.manifest.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  try {
    fs::create_directories(s2.out);
    write_json(fs::path(s2.out) / "report.json", to_json(r.report));
    write_json(fs::path(s2.out) / "manifest.json", to_json(r.report.manifest));
    for (const auto& [name, csv] : r.csvs) csv.save(fs::path(s2.out) / name);
  } catch (const std::exception& e) {
    std::cerr << "lgpos: " << e.what() << "\n";
    return kExitBadInput;
  }

  if (!s2.quiet) {
    for (const auto& line : r.lines) std::cout << line << "\n";
    if (!r.report.counterexample_flags.empty())
      std::cout << r.report.counterexample_flags.size() << " counterexample flag(s), see report.json\n";
    const Outcome& o = r.report.manifest.outcome;
    std::cout << command << ": " << o.passed << " ok, " << o.failed << " failed, " << o.indeterminate
              << " indeterminate; run " << r.report.manifest.run_id << " -> " << s2.out << " (exit " << r.exit_code
              << ")\n";
  }
  return r.exit_code;
}
