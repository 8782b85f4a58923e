#pragma once

// Quadrature rules: Gauss-Legendre (cached per order and precision), adaptive
// interval integration, double-exponential integration on (0, inf), and a
// double-precision Fourier integral on the line.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "lgpos/numerics/ball.hpp"
#include "lgpos/numerics/precision.hpp"

namespace lgpos::num {

struct QuadratureResult {
  Ball value;
  long evaluations = 0;
  bool converged = false;

  double err() const { return value.rad_double(); }
  double mid() const { return value.mid_double(); }
};

struct GaussLegendreRule {
  std::vector<Mpfr> nodes;  // on [-1, 1]
  std::vector<Mpfr> weights;
};

namespace detail {

inline GaussLegendreRule build_gauss_legendre(int n, Bits bits) {
  GaussLegendreRule rule;
  Bits wb = bits + 32;
  for (int i = 1; i <= n; ++i) {
    Mpfr x(std::cos(M_PI * (i - 0.25) / (n + 0.5)), wb);
    Mpfr dp(wb);
    int iters = 0;
    for (int it = 0; it < 200; ++it) {
      // Legendre recurrence for P_n and its derivative.
      Mpfr p0(1L, wb);
      Mpfr p1 = x;
      for (int k = 2; k <= n; ++k) {
        Mpfr p2 = (x * p1 * static_cast<double>(2 * k - 1) - p0 * static_cast<double>(k - 1)) / static_cast<double>(k);
        p0 = std::move(p1);
        p1 = std::move(p2);
      }
      Mpfr one(1L, wb);
      dp = (x * p1 - p0) * static_cast<double>(n) / (x * x - one);
      Mpfr dx = p1 / dp;
      x -= dx;
      if (dx.is_zero() || dx.exponent() < x.exponent() - static_cast<long>(wb) + 4) {
        if (++iters >= 2) break;
      }
    }
    Mpfr one(1L, wb);
    Mpfr w = Mpfr(2L, wb) / ((one - x * x) * dp * dp);
    Mpfr xr(bits);
    mpfr_set(xr.get(), x.get(), MPFR_RNDN);
    Mpfr wr(bits);
    mpfr_set(wr.get(), w.get(), MPFR_RNDN);
    rule.nodes.push_back(std::move(xr));
    rule.weights.push_back(std::move(wr));
  }
  return rule;
}

struct DoubleRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

}  // namespace detail

/// Gauss-Legendre rule with n points, nodes and weights correct to `bits`.
inline const GaussLegendreRule& gauss_legendre(int n, Bits bits) {
  static std::mutex mu;
  static std::map<std::pair<int, Bits>, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, bits);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  auto rule = std::make_unique<GaussLegendreRule>(detail::build_gauss_legendre(n, bits));
  const GaussLegendreRule& ref = *rule;
  cache.emplace(key, std::move(rule));
  return ref;
}

inline const detail::DoubleRule& gauss_legendre_double(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<detail::DoubleRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;
  GaussLegendreRule hp = detail::build_gauss_legendre(n, 80);
  auto rule = std::make_unique<detail::DoubleRule>();
  for (int i = 0; i < n; ++i) {
    rule->nodes.push_back(hp.nodes[i].to_double());
    rule->weights.push_back(hp.weights[i].to_double());
  }
  const detail::DoubleRule& ref = *rule;
  cache.emplace(n, std::move(rule));
  return ref;
}

/// Applies an n-point Gauss-Legendre rule to f on [a, b].
template <class F>
Mpfr gauss_legendre_apply(const F& f, const Mpfr& a, const Mpfr& b, int n, Bits bits, long& evals) {
  const GaussLegendreRule& rule = gauss_legendre(n, bits);
  Mpfr half = (b - a) / 2.0;
  Mpfr mid = (b + a) / 2.0;
  Mpfr sum(bits);
  for (int i = 0; i < n; ++i) {
    Mpfr x = mid + half * rule.nodes[i];
    sum += rule.weights[i] * f(x);
    ++evals;
  }
  return sum * half;
}

/// Adaptive Gauss-Legendre integration of a smooth f on [a, b]. The error
/// estimate on each panel is the difference between 16- and 24-point rules.
template <class F>
QuadratureResult integrate_interval(const F& f, const Mpfr& a, const Mpfr& b, double tol, Bits bits,
                                    int max_depth = 30) {
  QuadratureResult res;
  Mpfr total(bits);
  double err_total = 0.0;
  bool ok = true;
  struct Panel {
    Mpfr a, b;
    int depth;
    double tol;
  };
  std::vector<Panel> stack;
  stack.push_back({a, b, 0, tol});
  while (!stack.empty()) {
    Panel pnl = std::move(stack.back());
    stack.pop_back();
    Mpfr q1 = gauss_legendre_apply(f, pnl.a, pnl.b, 16, bits, res.evaluations);
    Mpfr q2 = gauss_legendre_apply(f, pnl.a, pnl.b, 24, bits, res.evaluations);
    double e = std::fabs((q2 - q1).to_double());
    if (e <= pnl.tol || pnl.depth >= max_depth) {
      if (e > pnl.tol) ok = false;
      total += q2;
      err_total += e;
      continue;
    }
    Mpfr m = (pnl.a + pnl.b) / 2.0;
    stack.push_back({m, pnl.b, pnl.depth + 1, pnl.tol / 2});
    stack.push_back({pnl.a, m, pnl.depth + 1, pnl.tol / 2});
  }
  // Rounding in the accumulated sum.
  double rounding = std::ldexp(std::fabs(total.to_double()) + 1.0, -static_cast<int>(bits) + 8) *
                    static_cast<double>(res.evaluations);
  res.value = Ball(total, Mag::from_double((err_total + rounding) * 1.0000001));
  res.converged = ok && res.err() <= tol;
  return res;
}

/// Integral of f over (0, inf) by the exp-sinh substitution r = exp(pi/2 sinh s)
/// with step halving. f should decay at least like a Gaussian (caller's hint)
/// and be bounded near 0.
template <class F>
QuadratureResult integrate_semiaxis(const F& f, double tol, int digits, int max_level = 12) {
  Bits bits = bits_for_digits(digits);
  QuadratureResult res;
  Mpfr half_pi = Mpfr::pi(bits) / 2.0;
  // Terms indexed by k with step h = 2^-level; reuse the odd nodes per level.
  auto term = [&](const Mpfr& s) -> Mpfr {
    Mpfr sh = sinh(s);
    Mpfr ch = cosh(s);
    Mpfr r = exp(half_pi * sh);
    if (!r.is_finite() || r.is_zero()) return Mpfr(bits);
    Mpfr v = f(r);
    ++res.evaluations;
    return v * r * half_pi * ch;
  };
  double negligible = tol * 1e-12;
  auto sweep = [&](double h, bool odd_only) -> Mpfr {
    Mpfr sum(bits);
    for (int dir = -1; dir <= 1; dir += 2) {
      int small_run = 0;
      for (long k = (dir > 0 ? (odd_only ? 1 : 0) : 1); k < 100000; k += (odd_only ? 2 : 1)) {
        if (odd_only && k % 2 == 0) continue;
        Mpfr s(static_cast<double>(dir) * static_cast<double>(k) * h, bits);
        Mpfr v = term(s);
        sum += v;
        double av = std::fabs(v.to_double());
        double sd = static_cast<double>(dir) * static_cast<double>(k) * h;
        if (av < negligible * h) {
          if (++small_run >= 3 && std::fabs(sd) > 1.0) break;
        } else {
          small_run = 0;
        }
        if (std::fabs(sd) > 7.0) break;
      }
    }
    return sum;
  };
  double h = 0.5;
  Mpfr sum = sweep(h, false);
  Mpfr prev = sum * h;
  double err = std::numeric_limits<double>::infinity();
  for (int level = 1; level <= max_level; ++level) {
    h /= 2;
    sum += sweep(h, true);
    Mpfr cur = sum * h;
    err = std::fabs((cur - prev).to_double());
    prev = cur;
    if (err <= tol / 10 && level >= 3) break;
  }
  double rounding = std::ldexp(std::fabs(prev.to_double()) + 1.0, -static_cast<int>(bits) + 8) *
                    static_cast<double>(res.evaluations);
  // Terms dropped by the early exit are below negligible * h each and decay
  // double-exponentially; 16 * negligible covers both directions.
  double tail = 16.0 * negligible;
  res.value = Ball(prev, Mag::from_double((err + rounding + tail) * 1.0000001));
  res.converged = res.err() <= tol;
  return res;
}

/// Adaptive double-precision Gauss-Legendre integration of a complex-valued f on [a, b].
template <class F>
std::complex<double> integrate_interval_d(const F& f, double a, double b, double tol, double& err, long& evals,
                                          int max_depth = 40) {
  const auto& r1 = gauss_legendre_double(20);
  const auto& r2 = gauss_legendre_double(30);
  auto apply = [&](const detail::DoubleRule& r, double lo, double hi) {
    std::complex<double> s = 0.0;
    double half = (hi - lo) / 2;
    double mid = (hi + lo) / 2;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      s += r.weights[i] * std::complex<double>(f(mid + half * r.nodes[i]));
      ++evals;
    }
    return s * half;
  };
  std::function<std::complex<double>(double, double, double, int)> rec = [&](double lo, double hi, double t,
                                                                             int depth) {
    auto q1 = apply(r1, lo, hi);
    auto q2 = apply(r2, lo, hi);
    double e = std::abs(q2 - q1);
    if (e <= t || depth >= max_depth) {
      err += e;
      return q2;
    }
    double m = (lo + hi) / 2;
    return rec(lo, m, t / 2, depth + 1) + rec(m, hi, t / 2, depth + 1);
  };
  return rec(a, b, tol, 0);
}

/// Domain and optional analytic tails for fourier_line: the integrand is
/// integrated numerically on [lower, upper]; the tails supply the integral of
/// e^{isx} f(x) over (-inf, lower] and [upper, inf) together with an error bound.
struct FourierHints {
  double lower = -40.0;
  double upper = 40.0;
  double panel = 0.5;
  std::function<std::pair<std::complex<double>, double>(double s)> left_tail;
  std::function<std::pair<std::complex<double>, double>(double s)> right_tail;
};

struct FourierResult {
  std::complex<double> value;
  double err = 0.0;
  long evaluations = 0;
  bool converged = false;

  CBall as_ball() const { return CBall(Mpfr(value.real(), 53), Mpfr(value.imag(), 53), Mag::from_double(err)); }
};

/// Integral over the real line of e^{isx} f(x) dx, without any 2*pi normalization.
template <class F>
FourierResult fourier_line(const F& f, double s, double tol, const FourierHints& hints = {}) {
  FourierResult res;
  double width = hints.panel;
  if (s != 0.0) width = std::min(width, M_PI / std::fabs(s));
  long panels = static_cast<long>(std::ceil((hints.upper - hints.lower) / width));
  double h = (hints.upper - hints.lower) / static_cast<double>(panels);
  double err = 0.0;
  std::complex<double> total = 0.0;
  auto g = [&](double x) { return std::complex<double>(std::cos(s * x), std::sin(s * x)) * f(x); };
  for (long i = 0; i < panels; ++i) {
    double a = hints.lower + h * static_cast<double>(i);
    double b = (i + 1 == panels) ? hints.upper : a + h;
    total += integrate_interval_d(g, a, b, tol / static_cast<double>(4 * panels), err, res.evaluations);
  }
  if (hints.left_tail) {
    auto [v, e] = hints.left_tail(s);
    total += v;
    err += e;
  }
  if (hints.right_tail) {
    auto [v, e] = hints.right_tail(s);
    total += v;
    err += e;
  }
  // Accumulated double rounding.
  err += 1e-15 * static_cast<double>(panels) * (std::abs(total) + 1e-300) + 1e-16;
  res.value = total;
  res.err = err;
  res.converged = err <= tol;
  return res;
}

}  // namespace lgpos::num
