#pragma once

// Plain multiple-precision complex numbers (no error tracking), used inside
// quadrature rules whose error is estimated separately.

#include "lgpos/numerics/mpfr.hpp"

namespace lgpos::num {

struct Cplx {
  Mpfr re;
  Mpfr im;

  explicit Cplx(Bits prec) : re(prec), im(prec) {}
  Cplx(Mpfr r, Mpfr i) : re(std::move(r)), im(std::move(i)) {}
  Cplx(double r, double i, Bits prec) : re(r, prec), im(i, prec) {}

  Bits prec() const { return re.prec() > im.prec() ? re.prec() : im.prec(); }
  Cplx conj() const { return Cplx(re, -im); }
  Mpfr abs() const { return hypot(re, im); }
  Mpfr arg() const { return atan2(im, re); }
};

inline Cplx operator+(const Cplx& a, const Cplx& b) { return Cplx(a.re + b.re, a.im + b.im); }
inline Cplx operator-(const Cplx& a, const Cplx& b) { return Cplx(a.re - b.re, a.im - b.im); }
inline Cplx operator-(const Cplx& a) { return Cplx(-a.re, -a.im); }
inline Cplx operator*(const Cplx& a, const Cplx& b) {
  Bits p = a.prec() > b.prec() ? a.prec() : b.prec();
  Cplx r(p);
  mpfr_fmms(r.re.get(), a.re.get(), b.re.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_fmma(r.im.get(), a.re.get(), b.im.get(), a.im.get(), b.re.get(), MPFR_RNDN);
  return r;
}
inline Cplx operator*(const Cplx& a, const Mpfr& b) { return Cplx(a.re * b, a.im * b); }
inline Cplx operator*(const Mpfr& b, const Cplx& a) { return a * b; }
inline Cplx operator*(const Cplx& a, double b) { return Cplx(a.re * b, a.im * b); }
inline Cplx operator+(const Cplx& a, const Mpfr& b) { return Cplx(a.re + b, a.im); }
inline Cplx operator/(const Cplx& a, const Cplx& b) {
  Bits p = a.prec() > b.prec() ? a.prec() : b.prec();
  Mpfr n2(p);
  mpfr_fmma(n2.get(), b.re.get(), b.re.get(), b.im.get(), b.im.get(), MPFR_RNDN);
  return a * Cplx(b.re / n2, -(b.im / n2));
}

inline Cplx exp(const Cplx& z) {
  Mpfr e = exp(z.re);
  Mpfr s(z.im.prec());
  Mpfr c(z.im.prec());
  mpfr_sin_cos(s.get(), c.get(), z.im.get(), MPFR_RNDN);
  return Cplx(e * c, e * s);
}
/// Principal logarithm.
inline Cplx log(const Cplx& z) { return Cplx(log(z.abs()), z.arg()); }
/// Principal square root.
inline Cplx sqrt(const Cplx& z) {
  Mpfr r = z.abs();
  Mpfr a = sqrt((r + z.re) / 2.0);
  Mpfr b = sqrt((r - z.re) / 2.0);
  if (z.im.sign() < 0) b = -b;
  return Cplx(std::move(a), std::move(b));
}
inline Cplx pow(const Cplx& z, long n) {
  Bits p = z.prec();
  if (n == 0) return Cplx(1.0, 0.0, p);
  if (n < 0) return Cplx(1.0, 0.0, p) / pow(z, -n);
  Cplx result(1.0, 0.0, p);
  Cplx base = z;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

}  // namespace lgpos::num
