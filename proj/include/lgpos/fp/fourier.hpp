#pragma once

// Fourier side of F_p(e^{u/2}): the Gamma-function formula G_p(s), the
// Hadamard-type product H_p(s) = G_p(s) / Gamma(is), and a numerical
// Fourier integral of the kernel to compare them against.

#include <cmath>
#include <complex>
#include <utility>

#include "lgpos/fp/table.hpp"
#include "lgpos/numerics/quadrature.hpp"

namespace lgpos::fp {

using num::CBall;

/// G_p(s) = int e^{isu} F_p(e^{u/2}) du = (1/d) Gamma(is) Gamma(p+1-ids) / Gamma(1-is).
inline CBall gp_eval(const FpParams& params, double s, int digits = 30) {
  params.validate();
  if (s == 0.0) throw num::PoleError("gp_eval: pole at s = 0");
  Bits bits = num::bits_for_digits(digits);
  CBall is = CBall::exact(0.0, s, bits);
  CBall one = CBall::exact(1.0, 0.0, bits);
  CBall pp1 = CBall::exact(params.p + 1.0, 0.0, bits);
  CBall ids = is * Ball::exact(static_cast<long>(params.d), bits);
  CBall l = num::ln_gamma(is) + num::ln_gamma(pp1 - ids) - num::ln_gamma(one - is);
  return num::exp(l) / Ball::exact(static_cast<long>(params.d), bits);
}

/// H_p(s) = (p!/d) e^{i gamma (d-1) s - i d s h_p} prod' (1 - ids/m)^{-1} e^{-ids/m}.
/// The product runs over m > p not divisible by d (and over multiples of d
/// that are <= p, with the inverse factor) and is truncated at m <= M; the
/// quadratic part of the tail is added back in closed form and the rest is
/// bounded.
inline CBall hp_partial(const FpParams& params, double s, long M = 100000) {
  params.validate();
  const int d = params.d;
  const int p = params.p;
  if (M <= p) throw std::invalid_argument("hp_partial: M must exceed p");
  const double x = d * s;
  double re = std::lgamma(p + 1.0) - std::log(static_cast<double>(d));
  double harmonic = 0.0;
  for (int m = 1; m <= p; ++m) harmonic += 1.0 / m;
  double im = 0.5772156649015329 * (d - 1) * s - x * harmonic;
  // Kahan-compensated accumulation of the partial product's logarithm.
  double sre = 0.0, cre = 0.0, sim = 0.0, cim = 0.0;
  auto add = [](double& sum, double& comp, double v) {
    double y = v - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  };
  for (int m = d; m <= p; m += d) {
    double y = x / m;
    add(sre, cre, 0.5 * std::log1p(y * y));
    add(sim, cim, -(std::atan(y) - y));
  }
  for (long m = p + 1; m <= M; ++m) {
    if (m % d == 0) continue;
    double y = x / static_cast<double>(m);
    add(sre, cre, -0.5 * std::log1p(y * y));
    add(sim, cim, std::atan(y) - y);
  }
  double Md = static_cast<double>(M);
  re += sre - x * x * (1.0 - 1.0 / d) / (2.0 * Md);
  im += sim;
  double tail = x * x * (d + 1.0) / (2.0 * Md * Md) + std::fabs(x * x * x) / (3.0 * Md * Md) +
                x * x * x * x / (4.0 * Md * Md * Md);
  double rounding = 4e-16 * static_cast<double>(M) * (1.0 + std::fabs(x)) + 1e-15 * (std::fabs(re) + std::fabs(im));
  std::complex<double> h = std::exp(std::complex<double>(re, im));
  double err = std::abs(h) * std::expm1(tail + rounding);
  return CBall(Mpfr(h.real(), 53), Mpfr(h.imag(), 53), num::Mag::from_double(err * 1.01 + 1e-300));
}

struct FourierCheck {
  double s = 0.0;
  std::complex<double> numeric;
  double numeric_err = 0.0;
  std::complex<double> formula;
  double formula_err = 0.0;
  double discrepancy = 0.0;
};

/// Numerical G_p(s). F_p(e^{u/2}) tends to F_p(0) as u -> -inf, so the
/// integral is taken in the sense of analytic continuation from Im s < 0:
/// F_p(0)/(1 + e^u) is subtracted and its transform pi / (i sinh(pi s)) added back.
inline FourierCheck fp_fourier_check(const FpTable& table, double s, double tol = 1e-9) {
  FourierCheck out;
  out.s = s;
  const double f0 = table.at_zero();
  const FpParams& prm = table.params();
  num::FourierHints hints;
  hints.lower = -40.0;
  hints.upper = std::max(30.0, table.u_hi());
  hints.panel = 0.5;
  // Right tail: the series for F and the geometric series for 1/(1+e^u).
  hints.right_tail = [&](double sv) {
    const double U = hints.upper;
    std::complex<double> is(0.0, sv);
    std::complex<double> v = table.right_tail_fourier(U, sv);
    for (int n = 1; n <= 6; ++n) v -= f0 * (n % 2 ? 1.0 : -1.0) * std::exp((is - static_cast<double>(n)) * U) / (static_cast<double>(n) - is);
    return std::pair<std::complex<double>, double>(v, 1e-16 + f0 * std::exp(-7.0 * U));
  };
  // Left tail: the difference behaves like (F(0) - Gamma(p+d+1)/d) e^u.
  hints.left_tail = [&](double) {
    double c = f0 + std::tgamma(prm.p + prm.d + 1.0) / prm.d;
    return std::pair<std::complex<double>, double>(0.0, 2.0 * c * std::exp(hints.lower));
  };
  auto f = [&](double u) { return table.at_u(u) - f0 / (1.0 + std::exp(u)); };
  num::FourierResult fr = num::fourier_line(f, s, tol, hints);
  std::complex<double> pole = f0 * M_PI / (std::complex<double>(0.0, 1.0) * std::sinh(M_PI * s));
  out.numeric = fr.value + pole;
  out.numeric_err = fr.err + table.error_estimate() * (hints.upper - hints.lower);
  CBall g = gp_eval(prm, s);
  out.formula = g.mid_double();
  out.formula_err = g.rad_double();
  out.discrepancy = std::abs(out.numeric - out.formula);
  return out;
}

}  // namespace lgpos::fp
