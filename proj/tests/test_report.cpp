#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "lgpos/report/commands.hpp"
#include "lgpos/report/schema.hpp"

using namespace lgpos;
using namespace lgpos::report;
namespace fs = std::filesystem;

namespace {

SchemaValidator load(const std::string& name) { return SchemaValidator(read_json(fs::path(LGPOS_SCHEMA_DIR) / name)); }

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("lgpos-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void expect_valid(const CommandResult& r) {
  auto rep = load("report.v1.json").validate(to_json(r.report));
  EXPECT_TRUE(rep.empty()) << (rep.empty() ? "" : rep.front());
  auto man = load("manifest.v1.json").validate(to_json(r.report.manifest));
  EXPECT_TRUE(man.empty()) << (man.empty() ? "" : man.front());
}

bool has_verdict(const CommandResult& r, Verdict v) {
  for (const auto& row : r.report.results)
    if (row.verdict == v) return true;
  return false;
}

}  // namespace

// Parsing ---------------------------------------------------------------------

TEST(ParseGrid, Forms) {
  auto lin = parse_grid("lin:-4..4:9");
  ASSERT_EQ(lin.size(), 9u);
  EXPECT_EQ(lin.front(), -4.0);
  EXPECT_EQ(lin[4], 0.0);
  EXPECT_EQ(lin.back(), 4.0);
  auto lg = parse_grid("log:1..100:3");
  EXPECT_NEAR(lg[1], 10.0, 1e-12);
  EXPECT_EQ(lg.back(), 100.0);
  EXPECT_EQ(parse_grid("0.5, 1,2"), (std::vector<double>{0.5, 1.0, 2.0}));
  EXPECT_EQ(parse_grid("lin:2..3:1"), (std::vector<double>{2.0}));
}

TEST(ParseGrid, Errors) {
  EXPECT_THROW(parse_grid("log:0..1:3"), std::invalid_argument);
  EXPECT_THROW(parse_grid("cubic:0..1:3"), std::invalid_argument);
  EXPECT_THROW(parse_grid("lin:0..1:0"), std::invalid_argument);
  EXPECT_THROW(parse_grid("lin:0-1:3"), std::invalid_argument);
  EXPECT_THROW(parse_grid("1,x"), std::invalid_argument);
}

TEST(ParseComplex, Forms) {
  EXPECT_EQ(parse_complex("1.5"), std::complex<double>(1.5, 0.0));
  EXPECT_EQ(parse_complex("-2i"), std::complex<double>(0.0, -2.0));
  EXPECT_EQ(parse_complex("1+2i"), std::complex<double>(1.0, 2.0));
  EXPECT_EQ(parse_complex("0.5-0.25i"), std::complex<double>(0.5, -0.25));
  EXPECT_EQ(parse_complex("1e-3+1e+2i"), std::complex<double>(1e-3, 1e2));
  EXPECT_EQ(parse_complex("i"), std::complex<double>(0.0, 1.0));
  EXPECT_EQ(parse_complex("3-i"), std::complex<double>(3.0, -1.0));
  EXPECT_THROW(parse_complex(""), std::invalid_argument);
}

TEST(ParsePoly, Specs) {
  auto z = parse_poly_spec("zero", 3, 3);
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(z.n(), 3);
  auto s = parse_poly_spec("separable:1,2i", 0, 4);
  EXPECT_EQ(s.n(), 2);
  EXPECT_EQ(s.degree(), 4);
  auto m = parse_poly_spec("monomial:1,2", 0, 0);
  EXPECT_EQ(m.degree(), 3);
  EXPECT_EQ(parse_poly_spec("random:5", 2, 3).to_string(), mv::HomogeneousPoly::random(2, 3, 5).to_string());
  EXPECT_THROW(parse_poly_spec("/nonexistent/poly.txt", 2, 3), std::invalid_argument);
}

TEST(ParsePoly, FileFormat) {
  fs::path dir = scratch("poly");
  {
    std::ofstream f(dir / "w.txt");
    f << "# z1^3 + i z1 z2^2\n1 0 3 0\n0 1 1 2   # trailing comment\n\n";
  }
  auto W = parse_poly_spec((dir / "w.txt").string(), 0, 0);
  EXPECT_EQ(W.n(), 2);
  EXPECT_EQ(W.degree(), 3);
  std::vector<mv::cplx> z{{1.0, 0.0}, {1.0, 0.0}};
  EXPECT_EQ(W.eval(z), mv::cplx(1.0, 1.0));
  {
    std::ofstream f(dir / "bad.txt");
    f << "1 0 3 0\n1 0 1 1\n";
  }
  EXPECT_THROW(parse_poly_spec((dir / "bad.txt").string(), 0, 0), std::invalid_argument);
}

TEST(ParseDensity, Specs) {
  EXPECT_EQ(parse_density("one", 2).ell(), 0);
  EXPECT_EQ(parse_density("abs2:monomial:1,1", 2).ell(), 2);
  EXPECT_THROW(parse_density("abs2:random:1", 2), std::invalid_argument);
  EXPECT_THROW(parse_density("gauss", 2), std::invalid_argument);
}

TEST(ConfigFile, KeyValue) {
  fs::path dir = scratch("conf");
  {
    std::ofstream f(dir / "a.conf");
    f << "# comment\n d = 4\n--p=1   # flag style\n\nt-grid = lin:0.5..2:4\n";
  }
  auto m = read_config_file((dir / "a.conf").string());
  EXPECT_EQ(m.size(), 3u);
  EXPECT_EQ(m["d"], "4");
  EXPECT_EQ(m["p"], "1");
  EXPECT_EQ(m["t-grid"], "lin:0.5..2:4");
  {
    std::ofstream f(dir / "b.conf");
    f << "d 4\n";
  }
  EXPECT_THROW(read_config_file((dir / "b.conf").string()), std::invalid_argument);
  EXPECT_THROW(read_config_file((dir / "missing.conf").string()), std::invalid_argument);
}

// Report plumbing -----------------------------------------------------------------

TEST(Csv, Quoting) {
  CsvWriter w({"a", "b"});
  w.add({"1", "x,y"});
  w.add({"say \"hi\"", "line\nbreak"});
  EXPECT_EQ(w.str(), "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",\"line\nbreak\"\n");
  EXPECT_EQ(w.size(), 2u);
  EXPECT_THROW(w.add({"only one"}), std::invalid_argument);
}

TEST(Fmt, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) EXPECT_EQ(std::stod(fmt(v)), v);
}

TEST(Fnv, KnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(StripVolatile, RemovesClockKeysAtAnyDepth) {
  json j = {{"started_at", "x"}, {"a", {{"wall_time_s", 1.0}, {"b", 2}}}, {"c", {{{"duration_s", 3}, {"d", 4}}}}};
  json s = strip_volatile(j);
  EXPECT_EQ(s, json({{"a", {{"b", 2}}}, {"c", {{{"d", 4}}}}}));
}

TEST(Manifest, RoundTripAndStableId) {
  RunManifest m;
  m.command = "fp";
  m.params = {{"d", "3"}, {"p", "0"}};
  m.seed = 7;
  m.assign_id();
  std::string id = m.run_id;
  m.started_at = "2020-01-01T00:00:00Z";
  m.wall_time_s = 4.0;
  m.assign_id();
  EXPECT_EQ(m.run_id, id);  // clock fields do not enter the id
  RunManifest back = manifest_from_json(to_json(m));
  EXPECT_EQ(back.command, m.command);
  EXPECT_EQ(back.params, m.params);
  EXPECT_EQ(back.seed, 7u);
  EXPECT_EQ(back.cap_digits, m.cap_digits);
  back.assign_id();
  EXPECT_EQ(back.run_id, id);
  m.seed = 8;
  m.assign_id();
  EXPECT_NE(m.run_id, id);
}

TEST(Report, TallyAndNulls) {
  VerificationReport rep;
  rep.results.push_back(row("a", {}, 1.0, 0.0, Verdict::Positive));
  rep.results.push_back(row("b", {}, 1.0, 0.0, Verdict::Fail));
  rep.results.push_back(row("c", {}, std::nan(""), 0.0, Verdict::Indeterminate));
  Outcome o = rep.tally();
  EXPECT_EQ(o.passed, 1u);
  EXPECT_EQ(o.failed, 1u);
  EXPECT_EQ(o.indeterminate, 1u);
  json j = to_json(rep.results[2]);
  EXPECT_TRUE(j["value"].is_null());
}

// Schemas -------------------------------------------------------------------------

TEST(Schema, RejectsBrokenDocuments) {
  CommandResult r = cmd_fp(FpArgs{});
  json good = to_json(r.report);
  SchemaValidator v = load("report.v1.json");
  EXPECT_TRUE(v.validate(good).empty());
  json missing = good;
  missing.erase("results");
  EXPECT_FALSE(v.validate(missing).empty());
  json bad_verdict = good;
  bad_verdict["results"][0]["verdict"] = "Maybe";
  EXPECT_FALSE(v.validate(bad_verdict).empty());
  SchemaValidator mv_ = load("manifest.v1.json");
  json man = to_json(r.report.manifest);
  json bad_type = man;
  bad_type["seed"] = "one";
  EXPECT_FALSE(mv_.validate(bad_type).empty());
  man["precision"].erase("cap_digits");
  EXPECT_FALSE(mv_.validate(man).empty());
}

// Commands ----------------------------------------------------------------------------

TEST(Commands, FpDefaultGrid) {
  CommandResult r = cmd_fp(FpArgs{});
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(r.report.results.size(), 7u);
  expect_valid(r);
  ASSERT_EQ(r.csvs.size(), 1u);
  EXPECT_EQ(r.csvs[0].first, "fp.csv");
  EXPECT_EQ(r.csvs[0].second.size(), 7u);
}

TEST(Commands, FpZeroIsExactAndSignChangeReported) {
  FpArgs a;
  a.t = {0.0};
  CommandResult r = cmd_fp(a);
  EXPECT_LT(r.report.results.at(0).err, 1e-40);  // closed form, only the final rounding
  EXPECT_NEAR(r.report.results.at(0).value, 1.0 / 3.0, 1e-16);
  FpArgs b;
  b.p = 3;
  b.t_grid = "log:1..100:5";
  CommandResult q = cmd_fp(b);
  EXPECT_EQ(q.exit_code, kExitOk);  // p = d is outside the proven range
  EXPECT_TRUE(q.report.sections.contains("sign_changes"));
  EXPECT_FALSE(q.report.sections["sign_changes"].empty());
  expect_valid(q);
}

TEST(Commands, FpBothRoutes) {
  FpArgs a;
  a.route = "both";
  a.t = {0.3, 1.0};
  CommandResult r = cmd_fp(a);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_FALSE(has_verdict(r, Verdict::Fail));
  expect_valid(r);
  FpArgs bad;
  bad.route = "sideways";
  EXPECT_THROW(cmd_fp(bad), std::invalid_argument);
}

TEST(Commands, HankelProvenAndLowCap) {
  HankelArgs a;
  a.N_max = 3;
  a.u_grid = "lin:-2..2:3";
  CommandResult r = cmd_hankel(a);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(r.report.results.size(), 9u);
  expect_valid(r);
  HankelArgs b;
  b.d = 4;
  b.p = 3;
  CommonArgs low;
  low.cap_digits = 10;
  CommandResult q = cmd_hankel(b, low);
  EXPECT_EQ(q.exit_code, kExitInconclusive);
  EXPECT_TRUE(has_verdict(q, Verdict::Indeterminate));
}

TEST(Commands, TpSeeded) {
  TpArgs a;
  a.N = 3;
  a.grids = 4;
  CommandResult r = cmd_tp(a);
  EXPECT_EQ(r.exit_code, kExitOk);
  CommandResult again = cmd_tp(a);
  EXPECT_EQ(strip_volatile(to_json(r.report)), strip_volatile(to_json(again.report)));
  expect_valid(r);
}

TEST(Commands, BiorthBlockAndFull) {
  BiorthArgs a;
  a.N = 3;
  a.t = 1.0;
  CommandResult r = cmd_biorth(a);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_FALSE(has_verdict(r, Verdict::Fail));
  expect_valid(r);
  BiorthArgs f;
  f.full = true;
  f.N = 4;
  f.t = 0.5;
  CommandResult g = cmd_biorth(f);
  EXPECT_EQ(g.exit_code, kExitOk);
  expect_valid(g);
}

TEST(Commands, MultivariateProvenAndOpen) {
  MultivariateArgs a;
  a.samples = 50000;
  CommandResult r = cmd_multivariate(a);
  EXPECT_EQ(r.exit_code, kExitOk);
  expect_valid(r);
  MultivariateArgs b;
  b.n = 4;
  b.W = "random:7";
  b.samples = 20000;
  CommandResult q = cmd_multivariate(b);
  EXPECT_EQ(q.exit_code, kExitOk);
  EXPECT_TRUE(has_verdict(q, Verdict::Evidence));
  MultivariateArgs bad;
  bad.method = "guess";
  EXPECT_THROW(cmd_multivariate(bad), std::invalid_argument);
}

TEST(Commands, FourierCheck) {
  FourierArgs a;
  a.s = {1.0};
  CommandResult r = cmd_fourier(a);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(r.report.results.size(), 2u);
  expect_valid(r);
}

TEST(Commands, RunIdDependsOnParameters) {
  FpArgs a;
  a.t = {1.0};
  FpArgs b = a;
  b.p = 1;
  EXPECT_EQ(cmd_fp(a).report.manifest.run_id, cmd_fp(a).report.manifest.run_id);
  EXPECT_NE(cmd_fp(a).report.manifest.run_id, cmd_fp(b).report.manifest.run_id);
}
