#pragma once

// Test-side reference values. These use Boost.Multiprecision / Boost.Math and
// raw MPFR calls, never the library's own special-function code.

#include <mpfr.h>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <string>

#include "lgpos/numerics/ball.hpp"

namespace oracle {

using hp = boost::multiprecision::cpp_bin_float_50;

inline hp to_hp(const lgpos::num::Ball& b) { return hp(b.mid().to_string(60)); }

/// |mid - x| <= rad, with slack for the oracle's own 50-digit rounding.
inline bool encloses(const lgpos::num::Ball& b, const hp& x) {
  hp diff = boost::multiprecision::abs(to_hp(b) - x);
  hp slack = hp("1e-45") * (boost::multiprecision::abs(x) + 1);
  return diff <= hp(b.rad_double()) + slack;
}

inline hp pi() { return boost::math::constants::pi<hp>(); }

/// ln Gamma(x) for x > 0 straight from MPFR at 300 bits.
inline hp mpfr_lngamma(double x) {
  mpfr_t v;
  mpfr_init2(v, 300);
  mpfr_set_d(v, x, MPFR_RNDN);
  mpfr_lngamma(v, v, MPFR_RNDN);
  char* s = nullptr;
  mpfr_asprintf(&s, "%.60Re", v);
  hp out(s);
  mpfr_free_str(s);
  mpfr_clear(v);
  return out;
}

/// J_m(x) by its power series in 50-digit arithmetic.
inline hp bessel_series(int m, const hp& x) {
  hp term = 1;
  for (int i = 1; i <= m; ++i) term *= x / (2 * i);
  hp sum = term;
  hp q = -(x * x) / 4;
  for (int k = 1; k < 400; ++k) {
    term *= q / (hp(k) * (k + m));
    sum += term;
    if (boost::multiprecision::abs(term) < hp("1e-60")) break;
  }
  return sum;
}

using hp100 = boost::multiprecision::cpp_bin_float_100;

// Large-t expansion of (2/d) int r^{2p+1} e^{-r^2} J_0(2 t r^d) dr, term-wise
// from the Mellin transform of J_0:
//   d^-2 sum_j (-1)^j / j! Gamma(a_j) / Gamma(1 - a_j) t^{-2 a_j},  a_j = (p+1+j)/d.
// It converges for every t > 0 when d >= 3.
inline hp100 mellin_series(int d, int p, double t, int terms = 600) {
  hp100 sum = 0;
  hp100 logt = boost::multiprecision::log(hp100(t));
  hp100 jfact = 1;
  for (int j = 0; j < terms; ++j) {
    if (j > 0) jfact *= j;
    int num = p + 1 + j;
    if (num % d == 0) continue;  // 1/Gamma(1 - a) vanishes
    hp100 a = hp100(num) / d;
    hp100 term = boost::math::tgamma(a) / boost::math::tgamma(1 - a) / jfact *
                 boost::multiprecision::exp(-2 * a * logt);
    sum += (j % 2 ? -term : term);
  }
  return sum / (d * d);
}

inline bool encloses100(const lgpos::num::Ball& b, const hp100& x) {
  hp100 mid(b.mid().to_string(80));
  return boost::multiprecision::abs(mid - x) <= hp100(b.rad_double()) + hp100("1e-60");
}

}  // namespace oracle
