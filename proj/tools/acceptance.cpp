// Acceptance runner: one PASS/FAIL line per criterion. Criteria 1-9 run in
// process; criterion 10 drives the lgpos binary twice through a manifest.

#include <iomanip>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lgpos/report/acceptance.hpp"

#ifndef LGPOS_CLI_PATH
#define LGPOS_CLI_PATH "lgpos"
#endif

namespace fs = std::filesystem;
using namespace lgpos;
using namespace lgpos::report;

namespace {

int run(const std::string& cmd) {
  int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

CriterionResult criterion_manifest_replay(const std::string& cli, const fs::path& work) {
  CriterionResult c{10, "determinism (suite replayed from its manifest)"};
  detail::Stopwatch sw;
  fs::remove_all(work);
  fs::path a = work / "first", b = work / "replay";
  std::string q = "\"";
  int rc1 = run(q + cli + q + " --quiet --out " + q + a.string() + q + " suite --quick");
  int rc2 = run(q + cli + q + " --quiet --out " + q + b.string() + q + " --manifest " + q +
                (a / "manifest.json").string() + q);
  c.rows.push_back(row("first_run_exit", {{"cli", cli}}, rc1, 0.0, detail::pass_fail(rc1 == 0)));
  c.rows.push_back(row("replay_exit", {{"cli", cli}}, rc2, 0.0, detail::pass_fail(rc2 == 0)));
  if (fs::exists(a / "report.json") && fs::exists(b / "report.json")) {
    json ja = strip_volatile(read_json(a / "report.json"));
    json jb = strip_volatile(read_json(b / "report.json"));
    bool same = ja == jb;
    c.rows.push_back(row("reports_identical", {{"results", ja["results"].size()}}, same ? 1.0 : 0.0, 0.0,
                         detail::pass_fail(same)));
    bool same_id = ja["manifest"]["run_id"] == jb["manifest"]["run_id"];
    c.rows.push_back(row("run_id_stable", {}, same_id ? 1.0 : 0.0, 0.0, detail::pass_fail(same_id)));
  } else {
    c.rows.push_back(row("reports_written", {}, 0.0, 0.0, Verdict::Fail, "report.json missing"));
  }
  detail::finish(c, sw, "replayed report identical apart from timestamps");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("acceptance criteria 1-10", "acceptance");
  bool quick = false;
  std::string cli = LGPOS_CLI_PATH;
  std::string work = (fs::temp_directory_path() / "lgpos-acceptance").string();
  std::string json_out;
  app.add_flag("--quick", quick, "reduced grids (development only)");
  app.add_option("--cli", cli, "path to the lgpos binary")->capture_default_str();
  app.add_option("--work", work, "scratch directory for criterion 10")->capture_default_str();
  app.add_option("--json", json_out, "also write the criterion results here");
  CLI11_PARSE(app, argc, argv);

  SuiteOptions opt;
  opt.quick = quick;
  json all = json::array();
  int failures = 0;
  auto report = [&](const CriterionResult& c) {
    std::cout << (c.passed ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " -- " << c.summary
              << " [" << std::fixed << std::setprecision(2) << c.duration_s << std::defaultfloat << " s]" << std::endl;
    if (!c.passed) ++failures;
    json j = to_json(c);
    j["rows"] = json::array();
    for (const auto& r : c.rows) j["rows"].push_back(to_json(r));
    all.push_back(j);
  };
  for (const auto& fn : in_process_criteria()) report(fn(opt));
  report(criterion_manifest_replay(cli, work));
  if (!json_out.empty()) write_json(json_out, all);
  std::cout << (failures == 0 ? "all 10 criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
  return failures == 0 ? 0 : 1;
}
