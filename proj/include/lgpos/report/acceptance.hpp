#pragma once

// Acceptance criteria shared by the acceptance binary and the `suite`
// command. Each criterion returns its rows and a pass/fail flag; quick mode
// shrinks the grids but not the tolerances.

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lgpos/biorth/moments.hpp"
#include "lgpos/fp/fourier.hpp"
#include "lgpos/fp/kernel.hpp"
#include "lgpos/fp/table.hpp"
#include "lgpos/multivariate/integrals.hpp"
#include "lgpos/positivity/lab.hpp"
#include "lgpos/report/report.hpp"

namespace lgpos::report {

using num::Ball;

struct SuiteOptions {
  bool quick = false;
  unsigned threads = 0;
  std::uint64_t seed = 1;
  num::PrecisionPolicy policy;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  /// Failed only because some sign stayed undecided at the precision cap.
  bool inconclusive = false;
  std::string summary;
  double duration_s = 0.0;
  double budget_s = 0.0;
  std::vector<ResultRow> rows;
};

inline json to_json(const CriterionResult& c) {
  json j;
  j["id"] = c.id;
  j["title"] = c.title;
  j["passed"] = c.passed;
  j["inconclusive"] = c.inconclusive;
  j["summary"] = c.summary;
  j["budget_s"] = c.budget_s;
  j["duration_s"] = c.duration_s;
  return j;
}

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_;
};

inline Verdict pass_fail(bool ok) { return ok ? Verdict::Pass : Verdict::Fail; }

inline std::vector<double> criterion_t_grid(bool quick) {
  if (quick) return {0.1, 1.0, 10.0};
  return {0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
}

inline std::vector<int> criterion_degrees(bool quick) {
  if (quick) return {3};
  return {3, 4, 5};
}

/// n equally spaced points on [lo, hi], rounded to multiples of 2^-20.
inline std::vector<double> uniform_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) {
    double u = lo + (hi - lo) * i / (n - 1);
    g.push_back(std::ldexp(std::nearbyint(std::ldexp(u, 20)), -20));
  }
  return g;
}

inline std::string first_failure(const std::vector<ResultRow>& rows) {
  for (const auto& r : rows)
    if (r.verdict == Verdict::Fail) return r.test + " " + r.inputs.dump() + (r.detail.empty() ? "" : ": " + r.detail);
  return {};
}

inline void finish(CriterionResult& c, const Stopwatch& sw, const std::string& ok_summary) {
  c.duration_s = sw.seconds();
  bool rows_ok = true;
  for (const auto& r : c.rows)
    if (r.verdict == Verdict::Fail) rows_ok = false;
  bool in_budget = c.budget_s <= 0 || c.duration_s <= c.budget_s;
  c.passed = rows_ok && in_budget && !c.inconclusive;
  if (!rows_ok) c.summary = "first failure: " + first_failure(c.rows);
  else if (c.inconclusive) c.summary = "undecided signs at the precision cap";
  else if (!in_budget) c.summary = "runtime " + fmt(c.duration_s) + " s exceeds budget " + fmt(c.budget_s) + " s";
  else c.summary = ok_summary;
}

}  // namespace detail

/// 1. Series and quadrature agree within their combined certified error, and
/// each error is at most 1e-12 relative.
inline CriterionResult criterion_dual_route(const SuiteOptions& opt) {
  CriterionResult c{1, "kernel dual-route agreement"};
  c.budget_s = 120.0;
  detail::Stopwatch sw;
  double worst = 0.0;
  for (int d : detail::criterion_degrees(opt.quick)) {
    for (int p = 0; p <= d; ++p) {
      fp::FpKernel kernel({d, p});
      double f0 = std::tgamma(p + 1.0) / d;
      for (double t : detail::criterion_t_grid(opt.quick)) {
        json in = {{"d", d}, {"p", p}, {"t", t}};
        try {
          fp::FpValue s = fp::fp_series(kernel, t, 1e-20 * f0, opt.policy);
          double sv = s.value.mid_double();
          fp::FpValue q = fp::fp_quadrature({d, p}, t, std::max(1e-14 * std::fabs(sv), 1e-40));
          double qv = q.value.mid_double();
          double es = s.value.rad_double(), eq = q.value.rad_double();
          Ball delta = s.value - q.value;
          double diff = std::fabs(delta.mid_double());
          bool ok = delta.contains_zero() && es <= 1e-12 * std::fabs(sv) && eq <= 1e-12 * std::fabs(qv);
          worst = std::max(worst, diff / std::fabs(sv));
          std::ostringstream det;
          det << "series " << s.value.mid().to_string(20) << " +/- " << es << "; quadrature " << q.value.mid().to_string(20)
              << " +/- " << eq;
          c.rows.push_back(row("fp_dual_route", in, diff, es + eq, detail::pass_fail(ok), det.str()));
        } catch (const num::NonConvergence& e) {
          c.inconclusive = true;
          c.rows.push_back(row("fp_dual_route", in, NAN, NAN, Verdict::Indeterminate, e.what()));
        }
      }
    }
  }
  detail::finish(c, sw, std::to_string(c.rows.size()) + " points agree, max relative difference " + fmt(worst));
  return c;
}

/// 2. F_p(0) = Gamma(p+1)/d, and I(0, rho = 1) = pi^n from both multivariate routes.
inline CriterionResult criterion_gaussian_anchors(const SuiteOptions& opt) {
  CriterionResult c{2, "Gaussian anchors"};
  detail::Stopwatch sw;
  for (int d : detail::criterion_degrees(opt.quick)) {
    for (int p = 0; p <= d; ++p) {
      json in = {{"d", d}, {"p", p}, {"t", 0}};
      long fact = 1;
      for (int i = 2; i <= p; ++i) fact *= i;
      num::Bits bits = num::bits_for_digits(60);
      Ball exact = Ball::exact(fact, bits) / static_cast<long>(d);
      fp::FpValue q = fp::fp_quadrature({d, p}, 0.0, 1e-27);
      Ball z = fp::fp_at_zero({d, p});
      bool ok_q = q.value.rad_double() <= 1e-25 && (q.value - exact).contains_zero();
      bool ok_z = z.rad_double() <= 1e-25 && (z - exact).contains_zero();
      c.rows.push_back(row("fp_at_zero_quadrature", in, q.value, detail::pass_fail(ok_q)));
      c.rows.push_back(row("fp_at_zero_exact", in, z, detail::pass_fail(ok_z)));
    }
  }
  std::vector<int> ns = opt.quick ? std::vector<int>{1, 2} : std::vector<int>{1, 2, 3};
  for (int n : ns) {
    auto W = mv::HomogeneousPoly::zero(n, 3);
    mv::McConfig mc{opt.quick ? 10000u : 100000u, opt.seed, opt.threads};
    double target = std::pow(M_PI, n);
    auto a = mv::i_direct_mc(W, mv::Density::one(), mc);
    auto b = mv::i_sphere_reduced(W, mv::Density::one(), mc);
    // For W = 0 every sample is identical, so only rounding separates the
    // mean from pi^n.
    double round_a = 1e-13 * target;
    bool ok_a = std::fabs(a.value - target) <= std::max(3.0 * a.std_error, round_a);
    bool ok_b = std::fabs(b.value - target) <= b.certified_err + 3.0 * b.std_error;
    json in = {{"n", n}, {"d", 3}, {"W", "0"}, {"rho", "1"}, {"samples", mc.samples}};
    c.rows.push_back(row("gaussian_mass_direct_mc", in, a.value, a.std_error, detail::pass_fail(ok_a)));
    c.rows.push_back(row("gaussian_mass_sphere", in, b.value, b.total_error(), detail::pass_fail(ok_b)));
  }
  detail::finish(c, sw, "all anchors exact within err");
  return c;
}

/// 3. Every Hankel determinant of F_p(e^{u/2}) is certified positive in the proven range.
inline CriterionResult criterion_hankel(const SuiteOptions& opt) {
  CriterionResult c{3, "Hankel determinants positive"};
  c.budget_s = 600.0;
  detail::Stopwatch sw;
  std::vector<int> ds = opt.quick ? std::vector<int>{3} : std::vector<int>{3, 4};
  int N_max = opt.quick ? 4 : 6;
  auto grid = detail::uniform_grid(-4.0, 4.0, opt.quick ? 5 : 9);
  std::size_t cells = 0;
  int max_digits = 0;
  for (int d : ds)
    for (int p = 0; p <= d - 1; ++p) {
      auto out = positivity::hankel_scan({d, p}, N_max, grid, 1e-30, opt.policy);
      for (const auto& cell : out) {
        ++cells;
        max_digits = std::max(max_digits, cell.verdict.digits);
        json in = {{"d", d}, {"p", p}, {"N", cell.N}, {"u", cell.u}};
        Verdict v = from_sign(cell.verdict.sign);
        if (v == Verdict::Indeterminate) c.inconclusive = true;
        ResultRow r = row("hankel", in, cell.verdict.value, v == Verdict::Positive ? Verdict::Positive : Verdict::Fail);
        if (v == Verdict::Indeterminate) r.verdict = Verdict::Indeterminate;
        r.detail = "digits=" + std::to_string(cell.verdict.digits);
        c.rows.push_back(std::move(r));
      }
    }
  detail::finish(c, sw, std::to_string(cells) + " cells Positive, max " + std::to_string(max_digits) + " digits");
  return c;
}

/// 4. det f(x_i - y_j) > 0 on seeded random grids.
inline CriterionResult criterion_total_positivity(const SuiteOptions& opt) {
  CriterionResult c{4, "strict total positivity on random grids"};
  detail::Stopwatch sw;
  int seeds = opt.quick ? 10 : 50;
  for (int p = 0; p <= 2; ++p) {
    fp::FpKernel kernel({3, p});
    auto f = positivity::fp_u_kernel(kernel, opt.policy);
    for (int s = 0; s < seeds; ++s) {
      std::uint64_t seed = num::derive_seed(opt.seed, static_cast<std::uint64_t>(s));
      positivity::GridSpec g = positivity::seeded_grid(4, seed);
      for (std::size_t N = 1; N <= 4; ++N) {
        positivity::GridSpec sub{std::vector<double>(g.xs.begin(), g.xs.begin() + N),
                                 std::vector<double>(g.ys.begin(), g.ys.begin() + N)};
        auto v = positivity::tp_grid_det(f, sub, opt.policy);
        json in = {{"d", 3}, {"p", p}, {"N", N}, {"seed_index", s}, {"xs", sub.xs}, {"ys", sub.ys}};
        Verdict verdict = v.sign == num::Sign::Positive ? Verdict::Positive : Verdict::Fail;
        if (v.sign == num::Sign::Indeterminate) {
          verdict = Verdict::Indeterminate;
          c.inconclusive = true;
        }
        c.rows.push_back(row("tp_grid_det", in, v.value, verdict));
      }
    }
  }
  detail::finish(c, sw, std::to_string(c.rows.size()) + " determinants Positive");
  return c;
}

/// 5. Filtered nondegeneracy and positive norms of the n = 1 form.
inline CriterionResult criterion_biorthogonal(const SuiteOptions& opt) {
  CriterionResult c{5, "biorthogonalization for n = 1"};
  detail::Stopwatch sw;
  std::vector<double> ts = opt.quick ? std::vector<double>{1.0} : std::vector<double>{0.1, 1.0, 10.0};
  for (double t : ts) {
    auto rep = biorth::full_gram(3, 7, t, 1e-30, opt.policy);
    json in = {{"d", 3}, {"N_deg", 7}, {"t", t}};
    c.rows.push_back(row("filtered_nondegenerate", in, rep.nondegenerate ? 1.0 : 0.0, 0.0,
                         detail::pass_fail(rep.nondegenerate)));
    c.rows.push_back(row("biorth_residual", in, rep.max_residual, 0.0, detail::pass_fail(rep.max_residual <= 1e-20)));
    c.rows.push_back(row("block_product_minors", in, rep.block_product_discrepancy, 0.0,
                         detail::pass_fail(rep.block_product_discrepancy <= 1e-20)));
    for (const auto& blk : rep.blocks)
      for (std::size_t k = 0; k < blk.system.h.size(); ++k) {
        const num::CBall& h = blk.system.h[k];
        bool ok = blk.system.h_real[k] && h.real().sign() == num::Sign::Positive;
        json hin = {{"d", 3}, {"p", blk.residue}, {"k", k}, {"t", t}};
        ResultRow r = row("h_k", hin, h.real(), detail::pass_fail(ok));
        r.detail = "Im h = " + fmt(h.im().to_double());
        c.rows.push_back(std::move(r));
      }
  }
  detail::finish(c, sw, "nondegenerate, all h_k > 0, residual <= 1e-20");
  return c;
}

/// 6. F_d has a certified negative value on [1, 100] and matches its leading asymptotic at t = 100.
inline CriterionResult criterion_negativity(const SuiteOptions& opt) {
  CriterionResult c{6, "negativity of F_d for large t"};
  detail::Stopwatch sw;
  fp::FpKernel kernel({3, 3});
  int n = 20;
  bool any_negative = false;
  for (int i = 0; i < n; ++i) {
    double t = std::pow(10.0, 2.0 * i / (n - 1));
    fp::FpValue v = fp::fp_series(kernel, t, 1e-25, opt.policy);
    json in = {{"d", 3}, {"p", 3}, {"t", t}};
    Verdict s = from_sign(v.value.sign());
    any_negative = any_negative || s == Verdict::Negative;
    // Outside the proven range the sign is the observation itself.
    c.rows.push_back(row("fp_sign", in, v.value, s == Verdict::Indeterminate ? Verdict::Indeterminate : s));
  }
  c.rows.push_back(row("certified_negative_exists", {{"d", 3}, {"p", 3}}, any_negative ? 1.0 : 0.0, 0.0,
                       detail::pass_fail(any_negative)));
  fp::FpValue s100 = fp::fp_series(kernel, 100.0, 1e-30, opt.policy);
  Ball a100 = fp::fp_asymptotic({3, 3}, 100.0);
  double ratio = s100.value.mid_double() / a100.mid_double();
  c.rows.push_back(row("series_over_asymptotic", {{"d", 3}, {"p", 3}, {"t", 100}}, ratio, 0.0,
                       detail::pass_fail(ratio >= 0.9 && ratio <= 1.1)));
  // Negative rows are expected here; only Pass/Fail rows decide the criterion.
  detail::finish(c, sw, "certified Negative found; ratio at t=100 is " + fmt(ratio));
  return c;
}

/// 7. Numerical Fourier transform of F_p(e^{u/2}) against the Gamma formula and the product formula.
inline CriterionResult criterion_fourier(const SuiteOptions& opt) {
  CriterionResult c{7, "Fourier identity"};
  detail::Stopwatch sw;
  auto table = fp::shared_fp_table({3, 0});
  std::vector<double> ss = opt.quick ? std::vector<double>{1.0} : std::vector<double>{0.5, 1.0, 2.0};
  for (double s : ss) {
    fp::FourierCheck fc = fp::fp_fourier_check(*table, s);
    c.rows.push_back(row("fourier_numeric_vs_gamma", {{"d", 3}, {"p", 0}, {"s", s}}, fc.discrepancy,
                         fc.numeric_err + fc.formula_err, detail::pass_fail(fc.discrepancy <= 1e-6)));
  }
  {
    double s = 1.0;
    num::CBall g = fp::gp_eval({3, 0}, s);
    num::Bits bits = num::bits_for_digits(30);
    num::CBall gis = num::exp(num::ln_gamma(num::CBall::exact(0.0, s, bits)));
    num::CBall prod = gis * fp::hp_partial({3, 0}, s, 100000);
    double diff = std::abs(prod.mid_double() - g.mid_double());
    c.rows.push_back(row("gamma_times_product_vs_gamma", {{"d", 3}, {"p", 0}, {"s", s}, {"M", 100000}}, diff,
                         prod.rad_double(), detail::pass_fail(diff <= 1e-5)));
  }
  detail::finish(c, sw, "Fourier transforms match");
  return c;
}

/// 8. Positivity of I(W) for random (n = 2, d = 3) superpotentials by both routes.
inline CriterionResult criterion_multivariate(const SuiteOptions& opt) {
  CriterionResult c{8, "multivariate positivity n = 2, d = 3"};
  c.budget_s = 900.0;
  detail::Stopwatch sw;
  int count = opt.quick ? 3 : 20;
  mv::McConfig mc{1000000, 0, opt.threads};
  double worst_z = 0.0;
  for (int i = 0; i < count; ++i) {
    std::uint64_t wseed = num::derive_seed(opt.seed, 1000 + static_cast<std::uint64_t>(i));
    auto W = mv::HomogeneousPoly::random(2, 3, wseed);
    mc.seed = wseed;
    auto a = mv::i_direct_mc(W, mv::Density::one(), mc);
    auto b = mv::i_sphere_reduced(W, mv::Density::one(), mc);
    double se = std::hypot(a.total_error(), b.total_error());
    double z = std::fabs(a.value - b.value) / se;
    worst_z = std::max(worst_z, z);
    json in = {{"n", 2}, {"d", 3}, {"W_seed", wseed}, {"W", W.to_string()}, {"samples", mc.samples}};
    c.rows.push_back(row("direct_mc_positive", in, a.value, a.std_error,
                         detail::pass_fail(a.value - 3.0 * a.std_error > 0)));
    c.rows.push_back(row("sphere_positive", in, b.value, b.total_error(),
                         detail::pass_fail(b.value - 3.0 * b.total_error() > 0 && b.min_integrand >= -b.certified_err)));
    c.rows.push_back(row("routes_consistent", in, z, 3.0, detail::pass_fail(z <= 3.0),
                         "|direct - sphere| / combined SE"));
    c.rows.push_back(row("direct_mc_real", in, a.imag_value, a.imag_std_error,
                         detail::pass_fail(std::fabs(a.imag_value) <= 3.0 * a.imag_std_error)));
  }
  std::vector<std::vector<mv::cplx>> seps = {{1.0, 1.0}, {0.5, 2.0}, {mv::cplx(1.0, 1.0), 0.3}};
  if (opt.quick) seps.resize(1);
  for (const auto& a : seps) {
    auto W = mv::HomogeneousPoly::separable(a, 3);
    mc.seed = opt.seed;
    Ball exact = mv::i_separable(a, 3);
    double ev = exact.mid_double();
    auto x = mv::i_direct_mc(W, mv::Density::one(), mc);
    auto y = mv::i_sphere_reduced(W, mv::Density::one(), mc);
    json in = {{"n", 2}, {"d", 3}, {"W", W.to_string()}, {"samples", mc.samples}};
    c.rows.push_back(row("separable_direct_within_1pct", in, x.value / ev - 1.0, x.std_error / ev,
                         detail::pass_fail(std::fabs(x.value / ev - 1.0) <= 0.01)));
    c.rows.push_back(row("separable_sphere_within_1pct", in, y.value / ev - 1.0, y.total_error() / ev,
                         detail::pass_fail(std::fabs(y.value / ev - 1.0) <= 0.01)));
  }
  detail::finish(c, sw, "all positive; worst route z-score " + fmt(worst_z));
  return c;
}

/// 9. At t = 0 det(I) minors are positive while det((-1)^l I) minors are
/// negative exactly for N = 2, 3 (mod 4).
inline CriterionResult criterion_sign_convention(const SuiteOptions&) {
  CriterionResult c{9, "sign-convention audit at t = 0"};
  detail::Stopwatch sw;
  for (int p = 0; p <= 2; ++p) {
    auto M = biorth::moment_matrix(3, p, 8, 0.0);
    auto mr = biorth::leading_minors(M);
    for (std::size_t m = 0; m < mr.det_I.size(); ++m) {
      int N = static_cast<int>(m) + 1;
      json in = {{"d", 3}, {"p", p}, {"N", N}, {"t", 0}};
      bool pos = mr.det_I[m].sign == num::Sign::Positive;
      bool expect_neg = N % 4 == 2 || N % 4 == 3;
      num::Sign want = expect_neg ? num::Sign::Negative : num::Sign::Positive;
      bool tw = mr.det_twisted[m].sign == want;
      ResultRow a = row("det_I_minor", in, mr.det_I[m].value, detail::pass_fail(pos));
      ResultRow b = row("det_twisted_minor", in, mr.det_twisted[m].value, detail::pass_fail(tw));
      b.detail = std::string("sign ") + num::to_string(mr.det_twisted[m].sign);
      c.rows.push_back(std::move(a));
      c.rows.push_back(std::move(b));
    }
  }
  detail::finish(c, sw, "det(I) > 0; det((-1)^l I) < 0 exactly for N = 2, 3 mod 4");
  return c;
}

using CriterionFn = std::function<CriterionResult(const SuiteOptions&)>;

/// Criteria 1-9 (10 compares whole runs and lives with the callers).
inline std::vector<CriterionFn> in_process_criteria() {
  return {criterion_dual_route,     criterion_gaussian_anchors, criterion_hankel,
          criterion_total_positivity, criterion_biorthogonal,   criterion_negativity,
          criterion_fourier,        criterion_multivariate,     criterion_sign_convention};
}

}  // namespace lgpos::report
