#pragma once

// Midpoint-radius ("ball") arithmetic over Mpfr midpoints. A Ball [m +- r]
// is a rigorous enclosure: every operation returns a ball containing all
// results obtainable from points of the input balls, including the rounding
// error of the midpoint computation.

#include <complex>
#include <stdexcept>
#include <string>

#include "lgpos/numerics/mag.hpp"
#include "lgpos/numerics/mpfr.hpp"

namespace lgpos::num {

enum class Sign { Positive, Negative, Indeterminate };

inline const char* to_string(Sign s) {
  switch (s) {
    case Sign::Positive: return "Positive";
    case Sign::Negative: return "Negative";
    default: return "Indeterminate";
  }
}

namespace detail {
/// Upper bound on the round-to-nearest error of a result with midpoint x.
inline Mag rounding_error(const Mpfr& x) {
  if (x.is_zero()) return Mag();
  return Mag::abs_of(x) * Mag::pow2(-static_cast<std::int64_t>(x.prec()));
}
}  // namespace detail

class Ball {
 public:
  Ball() : mid_(static_cast<Bits>(64)) {}
  explicit Ball(Bits prec) : mid_(prec) {}
  Ball(Mpfr mid, Mag rad) : mid_(std::move(mid)), rad_(rad) {}
  explicit Ball(Mpfr mid) : mid_(std::move(mid)) {}
  /// Exact ball of an integer.
  static Ball exact(long v, Bits prec) { return Ball(Mpfr(v, prec)); }
  /// Exact ball of a double (every double is representable at >= 53 bits).
  static Ball exact(double v, Bits prec) { return Ball(Mpfr(v, prec)); }
  /// Ball enclosing p/q.
  static Ball rational(long p, long q, Bits prec) {
    Mpfr m(p, prec);
    Mpfr r(prec);
    int inexact = mpfr_div_si(r.get(), m.get(), q, MPFR_RNDN);
    Mag rad = inexact ? detail::rounding_error(r) : Mag();
    return Ball(std::move(r), rad);
  }
  static Ball pi(Bits prec) {
    Mpfr p = Mpfr::pi(prec);
    Mag r = detail::rounding_error(p);
    return Ball(std::move(p), r);
  }
  static Ball euler_gamma(Bits prec) {
    Mpfr g = Mpfr::euler_gamma(prec);
    Mag r = detail::rounding_error(g);
    return Ball(std::move(g), r);
  }
  /// Ball with midpoint 0 and the given radius.
  static Ball zero_with_radius(Mag rad, Bits prec) { return Ball(Mpfr(prec), rad); }

  const Mpfr& mid() const { return mid_; }
  const Mag& rad() const { return rad_; }
  Bits prec() const { return mid_.prec(); }
  bool is_exact() const { return rad_.is_zero(); }
  bool is_finite() const { return mid_.is_finite() && rad_.is_finite(); }
  bool is_exact_zero() const { return rad_.is_zero() && mid_.is_zero(); }

  double mid_double() const { return mid_.to_double(); }
  double rad_double() const { return rad_.to_double(); }
  /// Upper bound of |x| over the ball.
  Mag mag() const { return Mag::abs_of(mid_) + rad_; }
  /// Lower bound of |x| over the ball (0 if the ball contains 0).
  Mpfr mig() const {
    Mpfr r = abs(mid_);
    mpfr_sub(r.get(), r.get(), rad_.to_mpfr(prec()).get(), MPFR_RNDD);
    if (r.sign() < 0) return Mpfr(prec());
    return r;
  }
  bool contains_zero() const { return mig().is_zero(); }
  bool contains(const Mpfr& x) const {
    Mpfr d = abs(x - mid_);
    // |x - mid| computed with rounding; widen by one rounding error.
    Mag bound = rad_ + detail::rounding_error(d);
    return d <= bound.to_mpfr(d.prec() + 64);
  }
  Sign sign() const {
    if (!is_finite()) return Sign::Indeterminate;
    Mpfr lo = mid_;
    mpfr_sub(lo.get(), mid_.get(), rad_.to_mpfr(prec()).get(), MPFR_RNDD);
    if (lo.sign() > 0) return Sign::Positive;
    Mpfr hi = mid_;
    mpfr_add(hi.get(), mid_.get(), rad_.to_mpfr(prec()).get(), MPFR_RNDU);
    if (hi.sign() < 0) return Sign::Negative;
    return Sign::Indeterminate;
  }

  Ball& add_error(const Mag& e) {
    rad_ = rad_ + e;
    return *this;
  }
  /// Re-round the midpoint to a different precision (radius widened accordingly).
  Ball with_prec(Bits prec) const {
    Mpfr m(prec);
    int inexact = mpfr_set(m.get(), mid_.get(), MPFR_RNDN);
    Mag r = rad_;
    if (inexact) r = r + detail::rounding_error(m);
    return Ball(std::move(m), r);
  }

  std::string to_string(int digits = 20) const {
    return mid_.to_string(digits) + " +/- " + std::to_string(rad_.to_double());
  }

  Ball operator-() const { return Ball(-mid_, rad_); }

 private:
  Mpfr mid_;
  Mag rad_;
};

namespace detail {
inline Mag inexact_error(const Mpfr& m, int ternary) { return ternary ? rounding_error(m) : Mag(); }
}  // namespace detail

inline Ball operator+(const Ball& a, const Ball& b) {
  Mpfr m(detail::max_prec(a.mid(), b.mid()));
  int t = mpfr_add(m.get(), a.mid().get(), b.mid().get(), MPFR_RNDN);
  Mag r = a.rad() + b.rad() + detail::inexact_error(m, t);
  return Ball(std::move(m), r);
}
inline Ball operator-(const Ball& a, const Ball& b) {
  Mpfr m(detail::max_prec(a.mid(), b.mid()));
  int t = mpfr_sub(m.get(), a.mid().get(), b.mid().get(), MPFR_RNDN);
  Mag r = a.rad() + b.rad() + detail::inexact_error(m, t);
  return Ball(std::move(m), r);
}
inline Ball operator*(const Ball& a, const Ball& b) {
  Mpfr m(detail::max_prec(a.mid(), b.mid()));
  int t = mpfr_mul(m.get(), a.mid().get(), b.mid().get(), MPFR_RNDN);
  Mag r = Mag::abs_of(a.mid()) * b.rad() + Mag::abs_of(b.mid()) * a.rad() + a.rad() * b.rad() +
          detail::inexact_error(m, t);
  return Ball(std::move(m), r);
}
inline Ball operator*(const Ball& a, long k) {
  Mpfr m(a.prec());
  int t = mpfr_mul_si(m.get(), a.mid().get(), k, MPFR_RNDN);
  Mag r = a.rad() * Mag::from_double(static_cast<double>(k < 0 ? -k : k)) + detail::inexact_error(m, t);
  return Ball(std::move(m), r);
}
inline Ball operator*(long k, const Ball& a) { return a * k; }
inline Ball operator/(const Ball& a, long k) {
  Mpfr m(a.prec());
  int t = mpfr_div_si(m.get(), a.mid().get(), k, MPFR_RNDN);
  long ak = k < 0 ? -k : k;
  Mag r = Mag::div_lower(a.rad(), static_cast<double>(ak), 0) + detail::inexact_error(m, t);
  return Ball(std::move(m), r);
}

/// 1/b. Throws std::domain_error when b contains zero.
inline Ball inverse(const Ball& b) {
  Mpfr lo = b.mig();
  if (lo.is_zero()) throw std::domain_error("inverse of a ball containing zero");
  Mpfr m(b.prec());
  int t = mpfr_d_div(m.get(), 1.0, b.mid().get(), MPFR_RNDN);
  if (b.rad().is_zero()) return Ball(std::move(m), detail::inexact_error(m, t));
  // |1/x - 1/mid| <= r / (|mid| * (|mid|-r))
  std::int64_t e1 = 0;
  std::int64_t e2 = 0;
  double l1 = Mag::lower_abs_mantissa_exp(b.mid(), e1);
  double l2 = Mag::lower_abs_mantissa_exp(lo, e2);
  Mag r = Mag::div_lower(b.rad(), l1 * l2, e1 + e2) + detail::inexact_error(m, t);
  return Ball(std::move(m), r);
}
inline Ball operator/(const Ball& a, const Ball& b) { return a * inverse(b); }

inline Ball& operator+=(Ball& a, const Ball& b) { return a = a + b; }
inline Ball& operator-=(Ball& a, const Ball& b) { return a = a - b; }
inline Ball& operator*=(Ball& a, const Ball& b) { return a = a * b; }

inline Ball abs(const Ball& a) { return Ball(abs(a.mid()), a.rad()); }

inline Ball exp(const Ball& a) {
  Mpfr m = exp(a.mid());
  // |e^x - e^mid| <= e^mid (e^r - 1); e^mid <= |m| (1 + 2^(1-p))
  Mag em = Mag::abs_of(m) * (Mag::pow2(0) + Mag::pow2(1 - static_cast<std::int64_t>(m.prec())));
  Mag r = em * expm1_up(a.rad()) + detail::rounding_error(m);
  return Ball(std::move(m), r);
}

/// Natural log. Throws std::domain_error unless the ball is strictly positive.
inline Ball log(const Ball& a) {
  if (a.sign() != Sign::Positive) throw std::domain_error("log of a ball not strictly positive");
  Mpfr m = log(a.mid());
  std::int64_t e = 0;
  double l = Mag::lower_abs_mantissa_exp(a.mig(), e);
  // |log x - log mid| <= r / (mid - r); the rounded lower bound keeps this an upper bound.
  Mag r = Mag::div_lower(a.rad(), l, e) + detail::rounding_error(m);
  return Ball(std::move(m), r);
}

inline Ball sqrt(const Ball& a) {
  if (a.sign() == Sign::Negative) throw std::domain_error("sqrt of a negative ball");
  Mpfr m = sqrt(a.mid().sign() < 0 ? Mpfr(a.prec()) : a.mid());
  Mpfr lo = a.mig();
  Mag r;
  if (a.rad().is_zero()) {
    r = Mag();
  } else if (lo.is_zero() || a.mid().sign() <= 0) {
    // |sqrt(x) - sqrt(y)| <= sqrt(|x - y|)
    r = Mag::from_double(std::sqrt(a.rad().to_double()) * (1 + 1e-15)) + Mag::abs_of(m);
  } else {
    Mpfr s = sqrt(lo);
    std::int64_t e = 0;
    double l = Mag::lower_abs_mantissa_exp(s, e);
    r = Mag::div_lower(a.rad(), l, e);
  }
  r = r + detail::rounding_error(m);
  return Ball(std::move(m), r);
}

inline Ball sin(const Ball& a) {
  Mpfr m = sin(a.mid());
  return Ball(std::move(m), a.rad() + detail::rounding_error(sin(a.mid())));
}
inline Ball cos(const Ball& a) {
  Mpfr m = cos(a.mid());
  Mag err = detail::rounding_error(m);
  return Ball(std::move(m), a.rad() + err);
}
/// sin(pi x), exact zero for exact integers.
inline Ball sin_pi(const Ball& x) {
  if (x.is_exact() && x.mid().is_integer()) return Ball(Mpfr(x.prec()));
  Ball px = Ball::pi(x.prec()) * x;
  return sin(px);
}

inline Ball pow(const Ball& a, long n) {
  if (n == 0) return Ball::exact(1L, a.prec());
  if (n < 0) return inverse(pow(a, -n));
  Ball result = Ball::exact(1L, a.prec());
  Ball base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

/// Complex ball: rectangular midpoint with a single disk radius.
class CBall {
 public:
  CBall() : re_(static_cast<Bits>(64)), im_(static_cast<Bits>(64)) {}
  explicit CBall(Bits prec) : re_(prec), im_(prec) {}
  CBall(Mpfr re, Mpfr im, Mag rad) : re_(std::move(re)), im_(std::move(im)), rad_(rad) {}
  explicit CBall(const Ball& real) : re_(real.mid()), im_(real.prec()), rad_(real.rad()) {}
  CBall(const Ball& re, const Ball& im) : re_(re.mid()), im_(im.mid()), rad_(re.rad() + im.rad()) {}
  static CBall exact(double re, double im, Bits prec) {
    return CBall(Mpfr(re, prec), Mpfr(im, prec), Mag());
  }
  static CBall i(Bits prec) { return exact(0.0, 1.0, prec); }

  const Mpfr& re() const { return re_; }
  const Mpfr& im() const { return im_; }
  const Mag& rad() const { return rad_; }
  Bits prec() const { return re_.prec() > im_.prec() ? re_.prec() : im_.prec(); }
  bool is_exact() const { return rad_.is_zero(); }
  bool is_finite() const { return re_.is_finite() && im_.is_finite() && rad_.is_finite(); }

  Ball real() const { return Ball(re_, rad_); }
  Ball imag() const { return Ball(im_, rad_); }
  CBall conj() const { return CBall(re_, -im_, rad_); }
  std::complex<double> mid_double() const { return {re_.to_double(), im_.to_double()}; }
  double rad_double() const { return rad_.to_double(); }
  Mag mag() const { return abs_mid_up() + rad_; }
  Mag abs_mid_up() const {
    Mpfr h(prec());
    mpfr_hypot(h.get(), re_.get(), im_.get(), MPFR_RNDU);
    return Mag::abs_of(h);
  }
  /// Lower bound of |z| over the disk.
  Mpfr mig() const {
    Mpfr h(prec());
    mpfr_hypot(h.get(), re_.get(), im_.get(), MPFR_RNDD);
    mpfr_sub(h.get(), h.get(), rad_.to_mpfr(prec()).get(), MPFR_RNDD);
    if (h.sign() < 0) return Mpfr(prec());
    return h;
  }
  bool contains_zero() const { return mig().is_zero(); }

  CBall& add_error(const Mag& e) {
    rad_ = rad_ + e;
    return *this;
  }
  CBall operator-() const { return CBall(-re_, -im_, rad_); }

  std::string to_string(int digits = 20) const {
    return "(" + re_.to_string(digits) + ", " + im_.to_string(digits) + ") +/- " +
           std::to_string(rad_.to_double());
  }

 private:
  Mpfr re_;
  Mpfr im_;
  Mag rad_;
};

namespace detail {
inline Mag complex_rounding(const Mpfr& re, const Mpfr& im) {
  return rounding_error(re) + rounding_error(im);
}
}  // namespace detail

inline CBall operator+(const CBall& a, const CBall& b) {
  Bits p = a.prec() > b.prec() ? a.prec() : b.prec();
  Mpfr re(p);
  Mpfr im(p);
  int t1 = mpfr_add(re.get(), a.re().get(), b.re().get(), MPFR_RNDN);
  int t2 = mpfr_add(im.get(), a.im().get(), b.im().get(), MPFR_RNDN);
  Mag r = a.rad() + b.rad() + detail::inexact_error(re, t1) + detail::inexact_error(im, t2);
  return CBall(std::move(re), std::move(im), r);
}
inline CBall operator-(const CBall& a, const CBall& b) {
  Bits p = a.prec() > b.prec() ? a.prec() : b.prec();
  Mpfr re(p);
  Mpfr im(p);
  int t1 = mpfr_sub(re.get(), a.re().get(), b.re().get(), MPFR_RNDN);
  int t2 = mpfr_sub(im.get(), a.im().get(), b.im().get(), MPFR_RNDN);
  Mag r = a.rad() + b.rad() + detail::inexact_error(re, t1) + detail::inexact_error(im, t2);
  return CBall(std::move(re), std::move(im), r);
}
inline CBall operator*(const CBall& a, const CBall& b) {
  Bits p = a.prec() > b.prec() ? a.prec() : b.prec();
  Mpfr re(p);
  Mpfr im(p);
  // fmms/fmma are correctly rounded: one rounding per component.
  int t1 = mpfr_fmms(re.get(), a.re().get(), b.re().get(), a.im().get(), b.im().get(), MPFR_RNDN);
  int t2 = mpfr_fmma(im.get(), a.re().get(), b.im().get(), a.im().get(), b.re().get(), MPFR_RNDN);
  Mag r = a.abs_mid_up() * b.rad() + b.abs_mid_up() * a.rad() + a.rad() * b.rad() +
          detail::inexact_error(re, t1) + detail::inexact_error(im, t2);
  return CBall(std::move(re), std::move(im), r);
}
inline CBall operator*(const CBall& a, const Ball& b) {
  Mpfr re = a.re() * b.mid();
  Mpfr im = a.im() * b.mid();
  Mag r = a.abs_mid_up() * b.rad() + Mag::abs_of(b.mid()) * a.rad() + a.rad() * b.rad() +
          detail::complex_rounding(re, im);
  return CBall(std::move(re), std::move(im), r);
}
inline CBall operator*(const Ball& b, const CBall& a) { return a * b; }
inline CBall operator+(const CBall& a, const Ball& b) { return a + CBall(b); }
inline CBall operator-(const CBall& a, const Ball& b) { return a - CBall(b); }

inline CBall inverse(const CBall& b) {
  Mpfr lo = b.mig();
  if (lo.is_zero()) throw std::domain_error("inverse of a complex ball containing zero");
  Bits p = b.prec();
  Mpfr n2(p);
  mpfr_fmma(n2.get(), b.re().get(), b.re().get(), b.im().get(), b.im().get(), MPFR_RNDN);
  Mpfr re = b.re() / n2;
  Mpfr im = -(b.im() / n2);
  // Midpoint error: three roundings of relative size 2^-p on a value of size 1/|b|.
  Mpfr h = hypot(b.re(), b.im());
  std::int64_t eh = 0;
  double lh = Mag::lower_abs_mantissa_exp(h, eh);
  Mag inv_mid = Mag::div_lower(Mag::pow2(0), lh * (1 - 1e-15), eh);
  Mag rounding = inv_mid * Mag::pow2(2 - static_cast<std::int64_t>(p));
  std::int64_t el = 0;
  double ll = Mag::lower_abs_mantissa_exp(lo, el);
  Mag prop = Mag::div_lower(b.rad(), lh * ll * (1 - 1e-15), eh + el);
  return CBall(std::move(re), std::move(im), prop + rounding);
}
inline CBall operator/(const CBall& a, const CBall& b) { return a * inverse(b); }
inline CBall operator/(const CBall& a, const Ball& b) { return a * inverse(b); }

inline CBall& operator+=(CBall& a, const CBall& b) { return a = a + b; }
inline CBall& operator-=(CBall& a, const CBall& b) { return a = a - b; }
inline CBall& operator*=(CBall& a, const CBall& b) { return a = a * b; }

inline CBall exp(const CBall& z) {
  Bits p = z.prec();
  Mpfr ea = exp(z.re());
  Mpfr c = cos(z.im());
  Mpfr s = sin(z.im());
  Mpfr re = ea * c;
  Mpfr im = ea * s;
  // Each component carries <= 2 roundings of relative size 2^-p on |e^a|.
  Mag ea_up = Mag::abs_of(ea) * (Mag::pow2(0) + Mag::pow2(1 - static_cast<std::int64_t>(p)));
  Mag rounding = ea_up * Mag::pow2(3 - static_cast<std::int64_t>(p));
  Mag prop = ea_up * expm1_up(z.rad());
  return CBall(std::move(re), std::move(im), rounding + prop);
}

/// Principal logarithm. Throws if the disk meets the branch cut or zero.
inline CBall log(const CBall& z) {
  Mpfr lo = z.mig();
  if (lo.is_zero()) throw std::domain_error("log of a complex ball containing zero");
  // Reject disks that touch the closed negative real axis.
  if (z.re().sign() <= 0) {
    Mpfr aim = abs(z.im());
    if (aim <= z.rad().to_mpfr(z.prec())) throw std::domain_error("complex log across the branch cut");
  }
  Bits p = z.prec();
  Mpfr h = hypot(z.re(), z.im());
  Mpfr re = log(h);
  Mpfr im = atan2(z.im(), z.re());
  // log(h (1+d)) with |d| <= 2^-p: absolute error <= 2^(1-p); plus result roundings.
  Mag rounding = Mag::pow2(1 - static_cast<std::int64_t>(p)) + detail::complex_rounding(re, im);
  // |log(z + w) - log z| <= -log(1 - r/|z|) <= r / (|z| - r)
  std::int64_t e = 0;
  double l = Mag::lower_abs_mantissa_exp(lo, e);
  Mag prop = Mag::div_lower(z.rad(), l, e);
  return CBall(std::move(re), std::move(im), rounding + prop);
}

inline CBall pow(const CBall& a, long n) {
  if (n == 0) return CBall::exact(1.0, 0.0, a.prec());
  if (n < 0) return inverse(pow(a, -n));
  CBall result = CBall::exact(1.0, 0.0, a.prec());
  CBall base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

/// A precision-tagged real or complex value with a rigorous absolute error bound.
using PrecisionValue = Ball;
using ComplexPrecisionValue = CBall;

}  // namespace lgpos::num
