#pragma once

// Fast double-precision evaluation of F_p for Monte Carlo and Fourier work.
// Chebyshev panels in u = 2 ln t are fitted to certified values; below the
// table the small-t asymptotic expansion in t^2 is used at optimal
// truncation, above it the large-t series is summed in double.

#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <map>
#include <utility>
#include <vector>

#include "lgpos/fp/kernel.hpp"

namespace lgpos::fp {

namespace detail {

struct ChebPanel {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> c;

  double eval(double x) const {
    double y = (2.0 * x - a - b) / (b - a);
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
      double t = 2.0 * y * b1 - b2 + c[k];
      b2 = b1;
      b1 = t;
    }
    return y * b1 - b2 + c[0];
  }
};

}  // namespace detail

class FpTable {
 public:
  static constexpr int kDegree = 24;
  static constexpr double kPanelWidth = 1.0;

  /// Builds the table; values at the nodes are certified to `tol`.
  explicit FpTable(const FpParams& params, double tol = 1e-16) : params_(params) {
    params_.validate();
    const int d = params_.d;
    const int p = params_.p;
    f0_ = std::tgamma(p + 1.0) / d;
    // Small-t expansion: the smallest term is about e^{-(d-2) k*} with
    // k* = (d^d t^2)^{-1/(d-2)}; take k* = 40/(d-2).
    double kstar = 40.0 / (d - 2);
    u_lo_ = std::floor(-(d - 2) * std::log(kstar) - d * std::log(static_cast<double>(d)));
    u_hi_ = 2.0 * std::log(64.0);
    long panels = static_cast<long>(std::ceil((u_hi_ - u_lo_) / kPanelWidth));
    u_hi_ = u_lo_ + panels * kPanelWidth;
    FpKernel kernel(params_);
    const int n = kDegree;
    for (long i = 0; i < panels; ++i) {
      detail::ChebPanel panel;
      panel.a = u_lo_ + i * kPanelWidth;
      panel.b = panel.a + kPanelWidth;
      std::vector<double> vals(n + 1);
      for (int k = 0; k <= n; ++k) {
        double y = std::cos(M_PI * (k + 0.5) / (n + 1));
        double u = 0.5 * (panel.a + panel.b) + 0.5 * (panel.b - panel.a) * y;
        FpValue v = fp_value(kernel, std::exp(u / 2.0), tol);
        vals[static_cast<std::size_t>(k)] = v.value.mid_double();
        node_err_ = std::max(node_err_, v.value.rad_double());
      }
      panel.c.assign(n + 1, 0.0);
      for (int j = 0; j <= n; ++j) {
        double s = 0.0;
        for (int k = 0; k <= n; ++k) s += vals[static_cast<std::size_t>(k)] * std::cos(M_PI * j * (k + 0.5) / (n + 1));
        panel.c[static_cast<std::size_t>(j)] = s * (j == 0 ? 1.0 : 2.0) / (n + 1);
      }
      cheb_err_ = std::max(cheb_err_, 2.0 * (std::fabs(panel.c[n - 1]) + std::fabs(panel.c[n])));
      panels_.push_back(std::move(panel));
    }
    // Double-precision series coefficients for u > u_hi.
    auto terms = kernel.terms(64, 30);
    for (const auto& t : terms) {
      large_.push_back({t.coefficient.mid_double() / (d * d),
                        static_cast<double>(t.exponent_num) / static_cast<double>(t.exponent_den)});
    }
  }

  const FpParams& params() const { return params_; }
  double u_lo() const { return u_lo_; }
  double u_hi() const { return u_hi_; }
  /// Bound on |table - F| over the whole table range (including node errors).
  double error_estimate() const { return cheb_err_ + node_err_ + 1e-15 * f0_; }

  /// F_p(e^{u/2}).
  double at_u(double u) const {
    if (u < u_lo_) return small_t(std::exp(u));
    if (u >= u_hi_) return large_t(u);
    auto i = static_cast<std::size_t>((u - u_lo_) / kPanelWidth);
    if (i >= panels_.size()) i = panels_.size() - 1;
    return panels_[i].eval(u);
  }

  /// F_p(t) for t >= 0.
  double at_t(double t) const {
    if (t <= 0.0) return f0_;
    return at_u(2.0 * std::log(t));
  }

  double at_zero() const { return f0_; }

  /// Exact tail of the series: integral over [U, inf) of e^{isu} F_p(e^{u/2}) du, for U >= u_hi.
  std::complex<double> right_tail_fourier(double U, double s) const {
    std::complex<double> acc = 0.0;
    std::complex<double> is(0.0, s);
    for (const auto& [c, a] : large_) {
      if (c == 0.0) continue;
      acc += c * std::exp((is - a) * U) / (a - is);
    }
    return acc;
  }

 private:
  /// (1/d) sum_k (-1)^k Gamma(p+1+dk) / (k!)^2 x^k at the smallest term, x = t^2.
  double small_t(double x) const {
    const int d = params_.d;
    const int p = params_.p;
    double sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    double lx = std::log(x);
    for (int k = 0; k < 400; ++k) {
      double lt = std::lgamma(p + 1.0 + d * k) - 2.0 * std::lgamma(k + 1.0) + k * lx;
      double term = std::exp(lt);
      if (term > prev) break;
      sum += (k % 2 ? -term : term);
      prev = term;
      if (term < 1e-18 * f0_) break;
    }
    return sum / d;
  }

  double large_t(double u) const {
    double acc = 0.0;
    for (const auto& [c, a] : large_) acc += c * std::exp(-a * u);
    return acc;
  }

  FpParams params_;
  double f0_ = 0.0;
  double u_lo_ = 0.0;
  double u_hi_ = 0.0;
  double cheb_err_ = 0.0;
  double node_err_ = 0.0;
  std::vector<detail::ChebPanel> panels_;
  std::vector<std::pair<double, double>> large_;
};

/// Process-wide cache of tables keyed by (d, p).
inline std::shared_ptr<const FpTable> shared_fp_table(const FpParams& params) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const FpTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{params.d, params.p}];
  if (!slot) slot = std::make_shared<const FpTable>(params);
  return slot;
}

}  // namespace lgpos::fp
