#pragma once

// Thin value-semantic wrapper over mpfr_t. Every object carries its own
// precision; binary operations produce a result at the larger of the two
// operand precisions and round to nearest.

#include <mpfr.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

namespace lgpos::num {

using Bits = mpfr_prec_t;

class Mpfr {
 public:
  Mpfr() : Mpfr(static_cast<Bits>(64)) {}
  explicit Mpfr(Bits prec) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Mpfr(double x, Bits prec) {
    mpfr_init2(v_, prec < 53 ? 53 : prec);
    mpfr_set_d(v_, x, MPFR_RNDN);
  }
  Mpfr(long x, Bits prec) {
    mpfr_init2(v_, prec < 64 ? 64 : prec);
    mpfr_set_si(v_, x, MPFR_RNDN);
  }
  Mpfr(int x, Bits prec) : Mpfr(static_cast<long>(x), prec) {}

  Mpfr(const Mpfr& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Mpfr(Mpfr&& o) noexcept {
    *v_ = *o.v_;
    o.v_->_mpfr_d = nullptr;
  }
  Mpfr& operator=(const Mpfr& o) {
    if (this != &o) {
      if (v_->_mpfr_d == nullptr) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
      } else if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_)) {
        mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      }
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Mpfr& operator=(Mpfr&& o) noexcept {
    std::swap(*v_, *o.v_);
    return *this;
  }
  ~Mpfr() {
    if (v_->_mpfr_d != nullptr) mpfr_clear(v_);
  }

  static Mpfr from_string(const std::string& s, Bits prec) {
    Mpfr r(prec);
    mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN);
    return r;
  }
  static Mpfr pi(Bits prec) {
    Mpfr r(prec);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }
  static Mpfr euler_gamma(Bits prec) {
    Mpfr r(prec);
    mpfr_const_euler(r.v_, MPFR_RNDN);
    return r;
  }

  Bits prec() const { return mpfr_get_prec(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

  double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }
  long double to_long_double() const { return mpfr_get_ld(v_, MPFR_RNDN); }
  std::string to_string(int digits = 20) const;

  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  bool is_integer() const { return mpfr_integer_p(v_) != 0; }
  long exponent() const { return is_zero() ? 0 : mpfr_get_exp(v_); }

  Mpfr& operator+=(const Mpfr& o) { return apply(o, mpfr_add); }
  Mpfr& operator-=(const Mpfr& o) { return apply(o, mpfr_sub); }
  Mpfr& operator*=(const Mpfr& o) { return apply(o, mpfr_mul); }
  Mpfr& operator/=(const Mpfr& o) { return apply(o, mpfr_div); }
  Mpfr& operator*=(long k) {
    mpfr_mul_si(v_, v_, k, MPFR_RNDN);
    return *this;
  }
  Mpfr& operator/=(long k) {
    mpfr_div_si(v_, v_, k, MPFR_RNDN);
    return *this;
  }

  Mpfr operator-() const {
    Mpfr r(*this);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
  }

 private:
  using BinOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
  Mpfr& apply(const Mpfr& o, BinOp op) {
    if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
    op(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }

  mpfr_t v_;
};

namespace detail {
inline Bits max_prec(const Mpfr& a, const Mpfr& b) { return a.prec() > b.prec() ? a.prec() : b.prec(); }

template <class Op>
Mpfr binary(const Mpfr& a, const Mpfr& b, Op op) {
  Mpfr r(max_prec(a, b));
  op(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

template <class Op>
Mpfr unary(const Mpfr& a, Op op) {
  Mpfr r(a.prec());
  op(r.get(), a.get(), MPFR_RNDN);
  return r;
}
}  // namespace detail

inline Mpfr operator+(const Mpfr& a, const Mpfr& b) { return detail::binary(a, b, mpfr_add); }
inline Mpfr operator-(const Mpfr& a, const Mpfr& b) { return detail::binary(a, b, mpfr_sub); }
inline Mpfr operator*(const Mpfr& a, const Mpfr& b) { return detail::binary(a, b, mpfr_mul); }
inline Mpfr operator/(const Mpfr& a, const Mpfr& b) { return detail::binary(a, b, mpfr_div); }

inline Mpfr operator+(const Mpfr& a, double b) {
  Mpfr r(a.prec());
  mpfr_add_d(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}
inline Mpfr operator+(double b, const Mpfr& a) { return a + b; }
inline Mpfr operator-(const Mpfr& a, double b) {
  Mpfr r(a.prec());
  mpfr_sub_d(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}
inline Mpfr operator-(double b, const Mpfr& a) {
  Mpfr r(a.prec());
  mpfr_d_sub(r.get(), b, a.get(), MPFR_RNDN);
  return r;
}
inline Mpfr operator*(const Mpfr& a, double b) {
  Mpfr r(a.prec());
  mpfr_mul_d(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}
inline Mpfr operator*(double b, const Mpfr& a) { return a * b; }
inline Mpfr operator/(const Mpfr& a, double b) {
  Mpfr r(a.prec());
  mpfr_div_d(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}
inline Mpfr operator/(double b, const Mpfr& a) {
  Mpfr r(a.prec());
  mpfr_d_div(r.get(), b, a.get(), MPFR_RNDN);
  return r;
}

inline int cmp(const Mpfr& a, const Mpfr& b) { return mpfr_cmp(a.get(), b.get()); }
inline bool operator<(const Mpfr& a, const Mpfr& b) { return cmp(a, b) < 0; }
inline bool operator>(const Mpfr& a, const Mpfr& b) { return cmp(a, b) > 0; }
inline bool operator<=(const Mpfr& a, const Mpfr& b) { return cmp(a, b) <= 0; }
inline bool operator>=(const Mpfr& a, const Mpfr& b) { return cmp(a, b) >= 0; }
inline bool operator==(const Mpfr& a, const Mpfr& b) { return cmp(a, b) == 0; }
inline bool operator<(const Mpfr& a, double b) { return mpfr_cmp_d(a.get(), b) < 0; }
inline bool operator>(const Mpfr& a, double b) { return mpfr_cmp_d(a.get(), b) > 0; }

inline Mpfr abs(const Mpfr& a) { return detail::unary(a, mpfr_abs); }
inline Mpfr sqrt(const Mpfr& a) { return detail::unary(a, mpfr_sqrt); }
inline Mpfr exp(const Mpfr& a) { return detail::unary(a, mpfr_exp); }
inline Mpfr expm1(const Mpfr& a) { return detail::unary(a, mpfr_expm1); }
inline Mpfr log(const Mpfr& a) { return detail::unary(a, mpfr_log); }
inline Mpfr log1p(const Mpfr& a) { return detail::unary(a, mpfr_log1p); }
inline Mpfr sin(const Mpfr& a) { return detail::unary(a, mpfr_sin); }
inline Mpfr cos(const Mpfr& a) { return detail::unary(a, mpfr_cos); }
inline Mpfr sinh(const Mpfr& a) { return detail::unary(a, mpfr_sinh); }
inline Mpfr cosh(const Mpfr& a) { return detail::unary(a, mpfr_cosh); }
inline Mpfr tanh(const Mpfr& a) { return detail::unary(a, mpfr_tanh); }
inline Mpfr atan2(const Mpfr& y, const Mpfr& x) { return detail::binary(y, x, mpfr_atan2); }
inline Mpfr hypot(const Mpfr& x, const Mpfr& y) { return detail::binary(x, y, mpfr_hypot); }
inline Mpfr pow(const Mpfr& a, const Mpfr& b) { return detail::binary(a, b, mpfr_pow); }
inline Mpfr pow(const Mpfr& a, long n) {
  Mpfr r(a.prec());
  mpfr_pow_si(r.get(), a.get(), n, MPFR_RNDN);
  return r;
}
inline Mpfr floor(const Mpfr& a) {
  Mpfr r(a.prec());
  mpfr_floor(r.get(), a.get());
  return r;
}
inline Mpfr round(const Mpfr& a) {
  Mpfr r(a.prec());
  mpfr_round(r.get(), a.get());
  return r;
}
/// Correctly rounded J_n(x).
inline Mpfr bessel_jn(long n, const Mpfr& x) {
  Mpfr r(x.prec());
  mpfr_jn(r.get(), n, x.get(), MPFR_RNDN);
  return r;
}
/// Correctly rounded ln|Gamma(x)|; used only as an independent reference.
inline Mpfr mpfr_reference_lngamma(const Mpfr& x) {
  Mpfr r(x.prec());
  int sgn = 0;
  mpfr_lgamma(r.get(), &sgn, x.get(), MPFR_RNDN);
  return r;
}

inline std::string Mpfr::to_string(int digits) const {
  if (!is_finite()) return is_zero() ? "0" : (mpfr_nan_p(v_) ? "nan" : (sign() > 0 ? "inf" : "-inf"));
  std::string fmt = "%." + std::to_string(digits) + "Rg";
  char* buf = nullptr;
  mpfr_asprintf(&buf, fmt.c_str(), v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

/// Bits needed to carry `digits` significant decimal digits plus a guard.
inline Bits bits_for_digits(int digits) {
  return static_cast<Bits>(std::ceil(digits * 3.3219280948873623)) + 16;
}
inline int digits_for_bits(Bits bits) { return static_cast<int>((bits - 16) / 3.3219280948873623); }

}  // namespace lgpos::num
