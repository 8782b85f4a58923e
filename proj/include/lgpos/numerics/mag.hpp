#pragma once

// Mag: a non-negative upper bound m * 2^e with a double mantissa and a wide
// exponent. Every operation rounds upward, so a Mag produced from true
// quantities always bounds them from above.

#include <cmath>
#include <cstdint>
#include <limits>

#include "lgpos/numerics/mpfr.hpp"

namespace lgpos::num {

class Mag {
 public:
  Mag() = default;
  /// Upper bound of a non-negative double (negative inputs are clamped to 0).
  static Mag from_double(double x) {
    Mag m;
    if (!(x > 0)) {
      if (std::isnan(x)) return infinity();
      return m;
    }
    if (std::isinf(x)) return infinity();
    int e = 0;
    m.man_ = std::frexp(x, &e);
    m.exp_ = e;
    return m;
  }
  static Mag infinity() {
    Mag m;
    m.man_ = std::numeric_limits<double>::infinity();
    return m;
  }
  /// 2^e exactly.
  static Mag pow2(std::int64_t e) {
    Mag m;
    m.man_ = 0.5;
    m.exp_ = e + 1;
    return m;
  }
  /// Upper bound of |x|.
  static Mag abs_of(const Mpfr& x) {
    if (x.is_zero()) return Mag();
    if (!x.is_finite()) return infinity();
    long e = 0;
    double d = mpfr_get_d_2exp(&e, x.get(), MPFR_RNDA);  // |d| in [0.5,1), rounded away from zero
    Mag m;
    m.man_ = std::fabs(d);
    m.exp_ = e;
    m.normalize();
    return m;
  }
  /// Lower bound of |x| (zero when x is zero).
  static double lower_abs_mantissa_exp(const Mpfr& x, std::int64_t& e_out) {
    if (x.is_zero()) {
      e_out = 0;
      return 0.0;
    }
    long e = 0;
    double d = mpfr_get_d_2exp(&e, x.get(), MPFR_RNDZ);
    e_out = e;
    return std::fabs(d);
  }

  bool is_zero() const { return man_ == 0.0; }
  bool is_finite() const { return std::isfinite(man_); }
  double mantissa() const { return man_; }
  std::int64_t exponent() const { return exp_; }

  /// Upper bound as a double (inf on overflow).
  double to_double() const {
    if (man_ == 0.0) return 0.0;
    if (!is_finite()) return man_;
    if (exp_ > 1100) return std::numeric_limits<double>::infinity();
    if (exp_ < -1100) return std::numeric_limits<double>::denorm_min();
    double r = std::ldexp(man_, static_cast<int>(exp_));
    if (r == 0.0) return std::numeric_limits<double>::denorm_min();
    return r;
  }
  /// log2 upper estimate (approximate, for precision planning only).
  double log2() const {
    if (man_ == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log2(man_) + static_cast<double>(exp_);
  }
  /// Exact conversion to an Mpfr with at least 64 bits.
  Mpfr to_mpfr(Bits prec) const {
    Mpfr r(prec < 64 ? 64 : prec);
    if (man_ == 0.0) return r;
    if (!is_finite()) {
      mpfr_set_inf(r.get(), 1);
      return r;
    }
    mpfr_set_d(r.get(), man_, MPFR_RNDU);
    mpfr_mul_2si(r.get(), r.get(), static_cast<long>(exp_), MPFR_RNDU);
    return r;
  }

  friend Mag operator+(const Mag& a, const Mag& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (!a.is_finite() || !b.is_finite()) return infinity();
    const Mag& hi = a.exp_ >= b.exp_ ? a : b;
    const Mag& lo = a.exp_ >= b.exp_ ? b : a;
    std::int64_t shift = hi.exp_ - lo.exp_;
    double low = shift > 1000 ? 0.0 : std::ldexp(lo.man_, -static_cast<int>(shift));
    Mag r;
    r.man_ = std::nextafter(hi.man_ + low, std::numeric_limits<double>::infinity());
    r.exp_ = hi.exp_;
    r.normalize();
    return r;
  }
  friend Mag operator*(const Mag& a, const Mag& b) {
    if (a.is_zero() || b.is_zero()) {
      if ((!a.is_finite()) || (!b.is_finite())) return infinity();
      return Mag();
    }
    if (!a.is_finite() || !b.is_finite()) return infinity();
    Mag r;
    r.man_ = std::nextafter(a.man_ * b.man_, std::numeric_limits<double>::infinity());
    r.exp_ = a.exp_ + b.exp_;
    r.normalize();
    return r;
  }
  /// Upper bound of a/b given b is a lower bound of the true denominator.
  static Mag div_lower(const Mag& a, double b_man, std::int64_t b_exp) {
    if (a.is_zero()) return Mag();
    if (!(b_man > 0)) return infinity();
    Mag r;
    r.man_ = std::nextafter(a.man_ / b_man, std::numeric_limits<double>::infinity());
    r.exp_ = a.exp_ - b_exp;
    r.normalize();
    return r;
  }
  friend Mag operator*(const Mag& a, double k) { return a * Mag::from_double(k); }

  friend bool operator<(const Mag& a, const Mag& b) { return a.compare(b) < 0; }
  friend bool operator<=(const Mag& a, const Mag& b) { return a.compare(b) <= 0; }
  friend bool operator>(const Mag& a, const Mag& b) { return a.compare(b) > 0; }

  int compare(const Mag& b) const {
    if (man_ == b.man_ && exp_ == b.exp_) return 0;
    if (is_zero()) return b.is_zero() ? 0 : -1;
    if (b.is_zero()) return 1;
    if (!is_finite()) return b.is_finite() ? 1 : 0;
    if (!b.is_finite()) return -1;
    if (exp_ != b.exp_) return exp_ < b.exp_ ? -1 : 1;
    return man_ < b.man_ ? -1 : (man_ > b.man_ ? 1 : 0);
  }

  static Mag max(const Mag& a, const Mag& b) { return a < b ? b : a; }

 private:
  void normalize() {
    if (man_ == 0.0 || !is_finite()) return;
    int e = 0;
    double m = std::frexp(man_, &e);
    man_ = m;
    exp_ += e;
  }

  double man_ = 0.0;
  std::int64_t exp_ = 0;
};

/// Upper bound of e^r - 1 for r >= 0.
inline Mag expm1_up(const Mag& r) {
  if (r.is_zero()) return Mag();
  if (!r.is_finite()) return Mag::infinity();
  double x = r.to_double();
  if (x > 700) return Mag::infinity();
  if (x < 1e-300) return r * 1.0000001;
  return Mag::from_double(std::expm1(x) * (1 + 1e-14));
}

}  // namespace lgpos::num
