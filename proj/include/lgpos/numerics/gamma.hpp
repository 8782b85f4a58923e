#pragma once

// Gamma function in ball arithmetic: shifted Stirling series with a rigorous
// remainder bound, exact Bernoulli numbers from tangent numbers, and the
// reflection formula for the left half line.

#include <gmpxx.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <vector>

#include "lgpos/numerics/ball.hpp"
#include "lgpos/numerics/precision.hpp"

namespace lgpos::num {

/// Test hook: a nonzero value is added to every log-gamma result. Used only by
/// the deliberate-fault harness of the suite command.
inline std::atomic<double>& gamma_fault_scale() {
  static std::atomic<double> scale{0.0};
  return scale;
}

namespace detail {

/// Tangent numbers T_1..T_n (Brent-Harvey in-place recurrence).
inline std::vector<mpz_class> tangent_numbers(int n) {
  std::vector<mpz_class> t(static_cast<std::size_t>(n) + 1);
  if (n < 1) return t;
  t[1] = 1;
  for (int k = 2; k <= n; ++k) t[k] = (k - 1) * t[k - 1];
  for (int k = 2; k <= n; ++k)
    for (int j = k; j <= n; ++j) t[j] = (j - k) * t[j - 1] + (j - k + 2) * t[j];
  return t;
}

class BernoulliTable {
 public:
  static BernoulliTable& instance() {
    static BernoulliTable table;
    return table;
  }
  /// B_{2k} exactly, k >= 1.
  mpq_class b2k(int k) {
    std::lock_guard<std::mutex> lock(mu_);
    if (k >= static_cast<int>(b_.size())) grow(std::max(2 * k, 64));
    return b_[static_cast<std::size_t>(k)];
  }

 private:
  void grow(int n) {
    std::vector<mpz_class> t = tangent_numbers(n);
    b_.assign(static_cast<std::size_t>(n) + 1, mpq_class(0));
    for (int k = 1; k <= n; ++k) {
      mpz_class pow4 = mpz_class(1) << (2 * k);
      mpz_class num = 2 * k * t[k];
      if (k % 2 == 0) num = -num;
      mpq_class q(num, pow4 * (pow4 - 1));
      q.canonicalize();
      b_[k] = q;
    }
  }
  std::mutex mu_;
  std::vector<mpq_class> b_;
};

inline Ball ball_from_q(const mpq_class& q, Bits prec) {
  Mpfr m(prec);
  int inexact = mpfr_set_q(m.get(), q.get_mpq_t(), MPFR_RNDN);
  Mag r = inexact ? rounding_error(m) : Mag();
  return Ball(std::move(m), r);
}

inline double log2_abs_q(const mpq_class& q) {
  Mpfr m(static_cast<Bits>(64));
  mpfr_set_q(m.get(), q.get_mpq_t(), MPFR_RNDA);
  mpfr_abs(m.get(), m.get(), MPFR_RNDN);
  mpfr_log2(m.get(), m.get(), MPFR_RNDU);
  return m.to_double(MPFR_RNDU);
}

/// Shift threshold: Re(w) at which the Stirling series reaches 2^-prec accuracy.
inline double stirling_shift_threshold(Bits prec) { return 0.165 * static_cast<double>(prec + 10) + 2.0; }

inline Ball half_log_2pi(Bits prec) {
  Mpfr two_pi = Mpfr::pi(prec) * 2.0;
  Mpfr l = log(two_pi) / 2.0;
  return Ball(l, rounding_error(l) * 8.0);
}

/// Chooses the number of Stirling terms K (terms k < K are summed) and
/// returns the remainder bound given a lower bound on |w| and log2 of
/// sec^2(arg(w)/2).
inline int stirling_terms(double log2_abs_w, double log2_sec2, Bits target_bits, Mag& remainder) {
  auto& table = BernoulliTable::instance();
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 100000; ++k) {
    double lb = log2_abs_q(table.b2k(k)) - std::log2(2.0 * k * (2.0 * k - 1.0)) -
                (2.0 * k - 1.0) * log2_abs_w + k * log2_sec2;
    if (lb < -static_cast<double>(target_bits)) {
      // Doubled, and rounded up to a power of two.
      remainder = Mag::pow2(static_cast<std::int64_t>(std::ceil(lb)) + 1);
      return k;
    }
    if (lb > prev + 1e-9) break;
    prev = lb;
  }
  throw NonConvergence("Stirling series: shift too small for the requested precision", 0.0, 0.0, 0);
}

inline Ball lift_like(const Ball&, const Ball& c) { return c; }
inline CBall lift_like(const CBall&, const Ball& c) { return CBall(c); }

inline Ball stirling_coefficient(int k, Bits prec) {
  mpq_class q = BernoulliTable::instance().b2k(k) / mpq_class(2 * k * (2 * k - 1));
  return ball_from_q(q, prec);
}

/// Sum_{k<K} c_k / w^(2k-1) by Horner in 1/w^2, with c_k = B_{2k}/(2k(2k-1)).
template <class B>
B stirling_sum(const B& w, int K, Bits prec) {
  if (K <= 1) return lift_like(w, Ball::exact(0L, prec));
  B inv_w = inverse(w);
  B v = inv_w * inv_w;
  B acc = lift_like(w, stirling_coefficient(K - 1, prec));
  for (int k = K - 2; k >= 1; --k) acc = acc * v + stirling_coefficient(k, prec);
  return acc * inv_w;
}

/// ln Gamma(w) for a real ball w with w >= threshold.
inline Ball ln_gamma_stirling_real(const Ball& w, Bits prec) {
  std::int64_t e = 0;
  double l = Mag::lower_abs_mantissa_exp(w.mig(), e);
  double log2w = std::log2(l) + static_cast<double>(e);
  Mag rem;
  int K = stirling_terms(log2w, 0.0, prec + 4, rem);
  Ball lw = log(w);
  Ball half = Ball::rational(1, 2, prec);
  Ball r = (w - half) * lw - w + half_log_2pi(prec) + stirling_sum(w, K, prec);
  return r.add_error(rem);
}

inline CBall ln_gamma_stirling_complex(const CBall& w, Bits prec) {
  std::int64_t e = 0;
  double l = Mag::lower_abs_mantissa_exp(w.mig(), e);
  double log2w = std::log2(l) + static_cast<double>(e);
  double r = w.rad().to_double();
  double re = w.re().to_double() - r;
  double im = std::fabs(w.im().to_double()) + r;
  double theta = std::atan2(im, re) * (1 + 1e-12) + 1e-300;
  double log2_sec2 = -2.0 * std::log2(std::cos(theta / 2.0)) * (1 + 1e-12);
  Mag rem;
  int K = stirling_terms(log2w, log2_sec2, prec + 4, rem);
  CBall lw = log(w);
  Ball half = Ball::rational(1, 2, prec);
  CBall res = (w - half) * lw - w + half_log_2pi(prec) + stirling_sum(w, K, prec);
  return res.add_error(rem);
}

inline Bits work_bits(Bits prec) { return prec + 24; }

inline void apply_fault(Ball& v) {
  double f = gamma_fault_scale().load(std::memory_order_relaxed);
  if (f != 0.0) v = v + Ball::exact(f, v.prec());
}
inline void apply_fault(CBall& v) {
  double f = gamma_fault_scale().load(std::memory_order_relaxed);
  if (f != 0.0) v = v + Ball::exact(f, v.prec());
}

/// ln Gamma(x) for a strictly positive real ball.
inline Ball ln_gamma_positive(const Ball& x) {
  Bits prec = work_bits(x.prec());
  Ball xx = x.with_prec(prec);
  double thr = stirling_shift_threshold(prec);
  double xlo = xx.mig().to_double(MPFR_RNDD);
  long n = xlo >= thr ? 0 : static_cast<long>(std::ceil(thr - xlo));
  if (n == 0) return ln_gamma_stirling_real(xx, prec);
  Ball prod = xx;
  for (long k = 1; k < n; ++k) prod = prod * (xx + Ball::exact(k, prec));
  Ball w = xx + Ball::exact(n, prec);
  return ln_gamma_stirling_real(w, prec) - log(prod);
}

}  // namespace detail

/// ln|Gamma(x)| for a real ball. The sign of Gamma(x) is stored in *sign when
/// given. Throws PoleError if the ball contains a nonpositive integer.
inline Ball ln_gamma(const Ball& x, int* sign = nullptr) {
  if (!x.is_finite()) throw std::domain_error("ln_gamma: non-finite argument");
  Ball res;
  if (x.sign() == Sign::Positive) {
    res = detail::ln_gamma_positive(x);
    if (sign) *sign = 1;
  } else {
    if (x.is_exact() && x.mid().is_integer()) throw PoleError("ln_gamma: pole at a nonpositive integer");
    // Reflection: |Gamma(x)| = pi / (|sin(pi x)| Gamma(1 - x)).
    Bits prec = detail::work_bits(x.prec());
    Ball xx = x.with_prec(prec);
    Ball s = sin_pi(xx);
    if (s.sign() == Sign::Indeterminate) throw PoleError("ln_gamma: argument ball contains a pole");
    Ball one = Ball::exact(1L, prec);
    res = log(Ball::pi(prec)) - log(abs(s)) - detail::ln_gamma_positive(one - xx);
    if (sign) {
      // sign Gamma(x) = sign sin(pi x) for x < 1 since Gamma(1-x) > 0.
      *sign = s.sign() == Sign::Positive ? 1 : -1;
    }
  }
  detail::apply_fault(res);
  return res;
}

/// Principal branch of ln Gamma(z), analytic off the closed negative real axis.
inline CBall ln_gamma(const CBall& z) {
  if (!z.is_finite()) throw std::domain_error("ln_gamma: non-finite argument");
  Bits prec = detail::work_bits(z.prec());
  if (z.im().is_zero() && z.rad().is_zero()) {
    Ball xr(z.re());
    if (xr.sign() == Sign::Positive) return CBall(ln_gamma(xr));
    if (z.re().is_integer()) throw PoleError("ln_gamma: pole at a nonpositive integer");
    throw std::domain_error("ln_gamma: principal branch undefined on the negative real axis");
  }
  CBall zz(z.re(), z.im(), z.rad());
  zz = zz + CBall::exact(0.0, 0.0, prec);
  double thr = detail::stirling_shift_threshold(prec);
  double need = std::max(thr, std::fabs(z.im().to_double()) + z.rad().to_double());
  double rlo = z.re().to_double() - z.rad().to_double();
  long n = rlo >= need ? 0 : static_cast<long>(std::ceil(need - rlo));
  CBall acc(prec);
  for (long k = 0; k < n; ++k) acc = acc + log(zz + Ball::exact(k, prec));
  CBall w = zz + Ball::exact(n, prec);
  CBall res = detail::ln_gamma_stirling_complex(w, prec) - acc;
  detail::apply_fault(res);
  return res;
}

inline Ball ln_gamma(double x, int digits) { return ln_gamma(Ball::exact(x, bits_for_digits(digits))); }

/// Gamma(x) for a real ball.
inline Ball gamma(const Ball& x) {
  int s = 1;
  Ball l = ln_gamma(x, &s);
  Ball v = exp(l);
  return s > 0 ? v : -v;
}

inline CBall gamma(const CBall& z) { return exp(ln_gamma(z)); }

/// 1/Gamma(x), entire. Exactly zero at exact nonpositive integers.
inline Ball recip_gamma(const Ball& x) {
  if (!x.is_finite()) throw std::domain_error("recip_gamma: non-finite argument");
  if (x.is_exact() && x.mid().is_integer() && x.mid().sign() <= 0) return Ball(Mpfr(x.prec()));
  Bits prec = detail::work_bits(x.prec());
  Ball xx = x.with_prec(prec);
  Ball half = Ball::rational(1, 2, prec);
  if ((xx - half).sign() == Sign::Positive) return exp(-ln_gamma(xx));
  // 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi
  Ball one = Ball::exact(1L, prec);
  Ball g = exp(ln_gamma(one - xx));
  return sin_pi(xx) * g / Ball::pi(prec);
}

inline Ball recip_gamma(double x, int digits) { return recip_gamma(Ball::exact(x, bits_for_digits(digits))); }

}  // namespace lgpos::num
