#pragma once

// Gamma-coefficient series for F_p(e^{u/2}) and weighted variants of it
// (u-derivatives and moments), evaluated in ball arithmetic with adaptive
// precision and a rigorous tail bound.

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgpos/numerics/gamma.hpp"
#include "lgpos/numerics/precision.hpp"

namespace lgpos::fp {

using num::Ball;
using num::Bits;
using num::Mag;
using num::Mpfr;

struct FpParams {
  int d = 3;
  int p = 0;

  void validate() const {
    if (d < 3) throw std::invalid_argument("FpParams: d must be >= 3");
    if (p < 0) throw std::invalid_argument("FpParams: p must be >= 0");
  }
  /// True when the positivity theorems apply (p <= d - 1).
  bool in_proven_range() const { return p <= d - 1; }
  std::string label() const { return "d=" + std::to_string(d) + ",p=" + std::to_string(p); }
};

/// One term of the series: coefficient in front of e^{-a u}, a = num/den.
struct FpSeriesTerm {
  int k = 0;
  Ball coefficient;
  long exponent_num = 0;
  long exponent_den = 1;
};

/// Weight g(a) multiplying the k-th term: (-a)^deriv * ff(-a, k1) * ff(-a, k2),
/// where ff(x, n) = x (x-1) ... (x-n+1) is the falling factorial.
struct SeriesWeight {
  int deriv = 0;
  int k1 = 0;
  int k2 = 0;

  static SeriesWeight derivative(int m) { return {m, 0, 0}; }
  static SeriesWeight moment(int k, int l) { return {0, k, l}; }
  int degree() const { return deriv + k1 + k2; }

  Ball eval(const Ball& a) const {
    Ball g = Ball::exact(1L, a.prec());
    Ball ma = -a;
    if (deriv > 0) g = g * num::pow(ma, deriv);
    for (int i = 0; i < k1; ++i) g = g * (ma - Ball::exact(static_cast<long>(i), a.prec()));
    for (int i = 0; i < k2; ++i) g = g * (ma - Ball::exact(static_cast<long>(i), a.prec()));
    return g;
  }
  /// Upper bound of log|g(a)| for a > 0.
  double log_abs_upper(double a) const {
    double s = deriv * std::log(a);
    for (int i = 0; i < k1; ++i) s += std::log(a + i);
    for (int i = 0; i < k2; ++i) s += std::log(a + i);
    return s * (1 + 1e-12) + 1e-12;
  }
};

struct SeriesOutcome {
  std::vector<Ball> values;
  long terms = 0;
  int digits = 0;
  double log10_maxterm = 0.0;
};

/// The series argument: either t > 0 (q = t^{-2/d}) or u (q = e^{-u/d}).
struct SeriesArg {
  bool is_u = false;
  double value = 1.0;

  static SeriesArg from_t(double t) { return {false, t}; }
  static SeriesArg from_u(double u) { return {true, u}; }
  double log_q(int d) const { return is_u ? -value / d : -2.0 * std::log(value) / d; }
  Ball q_ball(int d, Bits bits) const {
    Ball v = Ball::exact(value, bits);
    Ball lq = is_u ? -(v / static_cast<long>(d)) : -(num::log(v) * 2L) / static_cast<long>(d);
    return num::exp(lq);
  }
};

class FpKernel {
 public:
  explicit FpKernel(FpParams params) : params_(params) { params_.validate(); }

  const FpParams& params() const { return params_; }

  /// Exact-zero flag: the coefficient vanishes when (k+p+1)/d is an integer.
  bool coefficient_is_zero(long k) const { return (k + params_.p + 1) % params_.d == 0; }

  /// Series terms k = 0..count-1 at the given precision.
  std::vector<FpSeriesTerm> terms(int count, int digits) const {
    auto coeffs = coefficients(num::bits_for_digits(digits), static_cast<std::size_t>(count));
    std::vector<FpSeriesTerm> out;
    for (int k = 0; k < count; ++k)
      out.push_back({k, (*coeffs)[static_cast<std::size_t>(k)], k + params_.p + 1, params_.d});
    return out;
  }

  /// Sums d^-2 sum_k c_k g_w(a_k) q^{k+p+1} for each weight at a fixed precision.
  SeriesOutcome weighted_sums(const SeriesArg& arg, const std::vector<SeriesWeight>& weights, double tol,
                              int digits) const {
    Plan plan = make_plan(arg, weights, tol);
    return evaluate(arg, weights, plan, digits);
  }

  /// As weighted_sums, raising precision until every value has radius <= tol.
  SeriesOutcome weighted_sums_adaptive(const SeriesArg& arg, const std::vector<SeriesWeight>& weights, double tol,
                                       const num::PrecisionPolicy& policy = {}) const {
    Plan plan = make_plan(arg, weights, tol);
    double need = plan.log10_maxterm - std::log10(tol) + 10.0;
    int digits = std::max(policy.start_digits, static_cast<int>(std::ceil(need)));
    if (digits > policy.cap_digits) digits = policy.cap_digits;
    for (;;) {
      SeriesOutcome out = evaluate(arg, weights, plan, digits);
      double worst = 0.0;
      for (const Ball& v : out.values) worst = std::max(worst, v.rad_double());
      if (worst <= tol) return out;
      if (digits >= policy.cap_digits) {
        throw num::NonConvergence("fp series: precision cap reached", out.values.front().mid_double(), worst,
                                  digits);
      }
      digits = std::min(policy.cap_digits, digits * 2);
    }
  }

 private:
  struct Plan {
    long K = 0;
    std::vector<Mag> tails;
    double log10_maxterm = 0.0;
  };

  Plan make_plan(const SeriesArg& arg, const std::vector<SeriesWeight>& weights, double tol) const {
    const int d = params_.d;
    const int p = params_.p;
    double lnq = arg.log_q(d);
    double lnq_up = lnq + 1e-12 * std::fabs(lnq) + 1e-15;
    double ln_tol = std::log(tol / 10.0);
    Plan plan;
    double max_log = -std::numeric_limits<double>::infinity();
    auto log_m = [&](long j, const SeriesWeight& w) {
      double a = static_cast<double>(j + p + 1) / d;
      return 2.0 * std::lgamma(a) - std::log(M_PI) - std::lgamma(static_cast<double>(j) + 1.0) +
             w.log_abs_upper(a) + static_cast<double>(j + p + 1) * lnq_up;
    };
    auto rho = [&](long j, const SeriesWeight& w) {
      double a = static_cast<double>(j + p + 1) / d;
      return std::exp((2.0 / d) * std::log(a) - std::log(static_cast<double>(j) + 1.0) +
                      w.degree() * std::log1p(1.0 / (d * a)) + lnq_up) *
             (1 + 1e-10);
    };
    long K = 0;
    for (const SeriesWeight& w : weights) {
      long j = 0;
      for (;; ++j) {
        double lm = log_m(j, w);
        max_log = std::max(max_log, lm);
        double r = rho(j, w);
        if (r < 1.0 && lm - std::log1p(-r) < ln_tol && j >= 1) break;
        if (j > 5000000) throw num::NonConvergence("fp series: too many terms", 0.0, 0.0, 0);
      }
      K = std::max(K, j);
    }
    plan.K = K;
    for (const SeriesWeight& w : weights) {
      double r = rho(K, w);
      double lt = log_m(K, w) - std::log1p(-r) + 1e-9;
      plan.tails.push_back(Mag::from_double(std::exp(lt) * 2.0));
    }
    plan.log10_maxterm = max_log / std::log(10.0);
    return plan;
  }

  SeriesOutcome evaluate(const SeriesArg& arg, const std::vector<SeriesWeight>& weights, const Plan& plan,
                         int digits) const {
    Bits bits = num::bits_for_digits(digits);
    auto coeffs = coefficients(bits, static_cast<std::size_t>(plan.K));
    const int d = params_.d;
    const int p = params_.p;
    Ball q = arg.q_ball(d, bits);
    Ball qpow = num::pow(q, p + 1);
    std::vector<Ball> sums(weights.size(), Ball(Mpfr(bits)));
    for (long j = 0; j < plan.K; ++j) {
      if (!coefficient_is_zero(j)) {
        Ball base = (*coeffs)[static_cast<std::size_t>(j)] * qpow;
        Ball a = Ball::rational(j + p + 1, d, bits);
        for (std::size_t w = 0; w < weights.size(); ++w) {
          const SeriesWeight& wt = weights[w];
          if (wt.degree() == 0) {
            sums[w] = sums[w] + base;
          } else {
            sums[w] = sums[w] + base * wt.eval(a);
          }
        }
      }
      qpow = qpow * q;
    }
    SeriesOutcome out;
    // The coefficients c_k below omit the factor 1/d^2 that the change of
    // variables w = z^d contributes; it is applied here.
    for (std::size_t w = 0; w < weights.size(); ++w) {
      sums[w].add_error(plan.tails[w]);
      sums[w] = sums[w] / static_cast<long>(d * d);
    }
    out.values = std::move(sums);
    out.terms = plan.K;
    out.digits = digits;
    out.log10_maxterm = plan.log10_maxterm;
    return out;
  }

  using CoeffVec = std::vector<Ball>;

  /// Coefficients c_0..c_{count-1} at the given precision (cached, grown lazily).
  std::shared_ptr<const CoeffVec> coefficients(Bits bits, std::size_t count) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = cache_[bits];
    if (slot && slot->size() >= count) return slot;
    auto grown = std::make_shared<CoeffVec>(slot ? *slot : CoeffVec{});
    extend(*grown, bits, std::max<std::size_t>(count, static_cast<std::size_t>(params_.d)));
    slot = grown;
    return slot;
  }

  void extend(CoeffVec& c, Bits bits, std::size_t count) const {
    const long d = params_.d;
    const long p = params_.p;
    while (c.size() < count) {
      long j = static_cast<long>(c.size());
      if (coefficient_is_zero(j)) {
        c.emplace_back(Mpfr(bits));
        continue;
      }
      if (j < d) {
        // c_j = (-1)^j Gamma(a) / (j! Gamma(1 - a))
        Ball a = Ball::rational(j + p + 1, d, bits);
        Ball one = Ball::exact(1L, bits);
        Ball v = num::gamma(a) * num::recip_gamma(one - a);
        for (long i = 2; i <= j; ++i) v = v / i;
        if (j % 2 == 1) v = -v;
        c.push_back(v.with_prec(bits));
        continue;
      }
      // c_{j} = c_{j-d} (-1)^{d+1} (j-d+p+1)^2 / (d^2 (j-d+1) ... j)
      long i = j - d;
      Ball v = c[static_cast<std::size_t>(i)];
      long n = i + p + 1;
      v = v * n;
      v = v * n;
      v = v / (d * d);
      for (long m = i + 1; m <= j; ++m) v = v / m;
      if (d % 2 == 0) v = -v;
      c.push_back(std::move(v));
    }
  }

  FpParams params_;
  mutable std::mutex mu_;
  mutable std::map<Bits, std::shared_ptr<const CoeffVec>> cache_;
};

struct FpValue {
  Ball value;
  int digits = 0;
  long terms = 0;
  std::string route;
};

/// F_p(t) from the Gamma series, with |error| <= tol.
inline FpValue fp_series(const FpKernel& kernel, double t, double tol, const num::PrecisionPolicy& policy = {}) {
  if (!(t > 0)) throw std::domain_error("fp_series: t must be > 0");
  auto out = kernel.weighted_sums_adaptive(SeriesArg::from_t(t), {SeriesWeight::derivative(0)}, tol, policy);
  return {out.values[0], out.digits, out.terms, "series"};
}

inline FpValue fp_series(const FpParams& params, double t, double tol, const num::PrecisionPolicy& policy = {}) {
  FpKernel k(params);
  return fp_series(k, t, tol, policy);
}

/// d^m/du^m F_p(e^{u/2}) for m = 0..m_max by term-wise differentiation.
inline std::vector<Ball> fp_u_derivatives(const FpKernel& kernel, double u, int m_max, double tol,
                                          const num::PrecisionPolicy& policy = {}) {
  if (m_max < 0 || m_max > 24) throw std::invalid_argument("fp_u_derivatives: m_max must be in [0, 24]");
  std::vector<SeriesWeight> w;
  for (int m = 0; m <= m_max; ++m) w.push_back(SeriesWeight::derivative(m));
  return kernel.weighted_sums_adaptive(SeriesArg::from_u(u), w, tol, policy).values;
}

/// Same, at a fixed working precision (used by precision-escalation loops).
inline SeriesOutcome fp_u_derivatives_at(const FpKernel& kernel, double u, int m_max, double tol, int digits) {
  std::vector<SeriesWeight> w;
  for (int m = 0; m <= m_max; ++m) w.push_back(SeriesWeight::derivative(m));
  return kernel.weighted_sums(SeriesArg::from_u(u), w, tol, digits);
}

}  // namespace lgpos::fp
