#pragma once

// Radial Bessel integrals K(a, m, c) = int_0^inf r^a e^{-r^2} J_m(c r^d) dr
// in multiple precision. The finite part uses Gauss-Legendre panels no wider
// than half an oscillation; far out, where c r^d is large, the Bessel function
// is replaced by Re H^(1)_m and the contour is rotated into the upper half
// plane, with the Hankel asymptotic expansion and its remainder bound.

#include <algorithm>
#include <cmath>
#include <vector>

#include "lgpos/fp/series.hpp"
#include "lgpos/numerics/bessel.hpp"
#include "lgpos/numerics/complex.hpp"
#include "lgpos/numerics/quadrature.hpp"

namespace lgpos::fp {

using num::Cplx;
using num::QuadratureResult;

namespace detail {

/// max_r r^a e^{-r^2}
inline double gaussian_moment_peak(long a) {
  if (a <= 0) return 1.0;
  double h = a / 2.0;
  return std::exp(h * std::log(h) - h);
}

/// Upper bound of int_R^inf r^a e^{-r^2} dr, valid for 2R^2 > a.
inline double gaussian_tail_bound(long a, double R) {
  return std::exp(a * std::log(R) - R * R) / (2 * R - a / R);
}

inline double gaussian_cutoff(long a, double tol) {
  double R = std::sqrt(a / 2.0) + 1.0;
  while (gaussian_tail_bound(a, R) > tol) R += 0.25;
  return R;
}

/// Integral over (0, inf) of a complex integrand by the exp-sinh rule.
template <class F>
Cplx exp_sinh_complex(const F& f, Bits bits, double tol, double& err, long& evals) {
  Mpfr half_pi = Mpfr::pi(bits) / 2.0;
  auto term = [&](double s) -> Cplx {
    Mpfr sm(s, bits);
    Mpfr r = exp(half_pi * sinh(sm));
    if (r.is_zero() || !r.is_finite()) return Cplx(bits);
    Cplx v = f(r);
    ++evals;
    return v * (r * half_pi * cosh(sm));
  };
  const double negligible = tol * 1e-12;
  auto sweep = [&](double h, bool odd_only) {
    Cplx sum(bits);
    for (int dir = -1; dir <= 1; dir += 2) {
      int small = 0;
      long start = dir > 0 ? (odd_only ? 1 : 0) : 1;
      for (long k = start;; k += odd_only ? 2 : 1) {
        double s = dir * static_cast<double>(k) * h;
        Cplx v = term(s);
        sum = sum + v;
        double av = std::fabs(v.re.to_double()) + std::fabs(v.im.to_double());
        if (av < negligible * h) {
          if (++small >= 3 && std::fabs(s) > 1.0) break;
        } else {
          small = 0;
        }
        if (std::fabs(s) > 7.0) break;
      }
    }
    return sum;
  };
  double h = 0.5;
  Cplx sum = sweep(h, false);
  Cplx prev = sum * h;
  err = std::numeric_limits<double>::infinity();
  for (int level = 1; level <= 12; ++level) {
    h /= 2;
    sum = sum + sweep(h, true);
    Cplx cur = sum * h;
    Cplx diff = cur - prev;
    err = std::fabs(diff.re.to_double()) + std::fabs(diff.im.to_double());
    prev = cur;
    if (err <= tol / 10 && level >= 3) break;
  }
  // Allowance for the terms skipped by the early exit.
  err += 16.0 * negligible;
  return prev;
}

}  // namespace detail

/// K(a, m, c) = int_0^inf r^a e^{-r^2} J_m(c r^d) dr, absolute error <= tol.
inline QuadratureResult radial_bessel_integral(long a, long m, int d, double c, double tol) {
  QuadratureResult res;
  double scale = detail::gaussian_moment_peak(a);
  double tol_rel = tol / scale;
  Bits bits = static_cast<Bits>(std::ceil(std::log2(1.0 / std::min(tol_rel, 1e-10)))) + 48;
  if (bits < 80) bits = 80;
  double R_gauss = detail::gaussian_cutoff(a, tol * 1e-3);
  double X0 = std::max(30.0, 0.6 * std::log(1.0 / tol_rel) + 10.0);
  bool hankel_tail = false;
  double R_end = R_gauss;
  if (c > 0) {
    double R_tail = std::pow(X0 / c, 1.0 / d);
    if (R_tail < R_gauss) {
      R_end = R_tail;
      hankel_tail = true;
    }
  }
  // Panel breakpoints.
  std::vector<double> br{0.0};
  while (br.back() < R_end) {
    double r = br.back();
    double h = 0.5;
    if (c > 0) {
      h = std::min(h, M_PI / (c * d * std::pow(std::max(r, 1e-3), d - 1)));
      h = std::min(h, M_PI / (c * d * std::pow(r + h, d - 1)));
    }
    br.push_back(std::min(R_end, r + h));
  }
  Mpfr cm(c, bits);
  auto integrand = [&](const Mpfr& r) -> Mpfr {
    Mpfr v = num::pow(r, a) * num::exp(-(r * r));
    if (c == 0) return m == 0 ? v : Mpfr(bits);
    return v * num::bessel_jn(m, cm * num::pow(r, static_cast<long>(d)));
  };
  std::size_t npanels = br.size() - 1;
  double panel_tol = tol / (4.0 * static_cast<double>(npanels));
  Mpfr total(bits);
  double err = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < npanels; ++i) {
    QuadratureResult q =
        num::integrate_interval(integrand, Mpfr(br[i], bits), Mpfr(br[i + 1], bits), panel_tol, bits);
    total += q.value.mid();
    err += q.err();
    res.evaluations += q.evaluations;
    ok = ok && q.converged;
  }
  if (!hankel_tail) {
    err += detail::gaussian_tail_bound(a, R_end);
  } else {
    const double R = R_end;
    const double phi = M_PI / (2.0 * d);
    Mpfr pi = Mpfr::pi(bits);
    Mpfr ph = pi / static_cast<double>(2 * d);
    Cplx dir(num::cos(ph), num::sin(ph));
    // Hankel coefficients a_k(m) and the truncation order L.
    double mu = 4.0 * static_cast<double>(m * m);
    std::vector<Mpfr> ak{Mpfr(1L, bits)};
    double ak_abs = 1.0;
    double best = 1.0;
    long L = 1;
    double remainder = 0.0;
    const double expo = std::exp(std::fabs(m * m - 0.25) / X0);
    for (long k = 1; k < static_cast<long>(2 * X0); ++k) {
      double f = (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k);
      // f only feeds the bound; the coefficients themselves are exact in MPFR.
      Mpfr next = ak.back() * Mpfr(static_cast<long>(4 * m * m - (2 * k - 1) * (2 * k - 1)), bits) /
                  static_cast<long>(8 * k);
      ak.push_back(next);
      ak_abs *= std::fabs(f);
      // Olver's bound off the real axis carries chi(k) = sqrt(pi) G(k/2+1)/G(k/2+1/2) <= sqrt(pi (k/2+1)).
      double chi = std::sqrt(M_PI * (0.5 * k + 1.0));
      double bound = 2.0 * chi * ak_abs * std::pow(X0, -static_cast<double>(k)) * expo;
      if (k >= m && (bound < best || best == 1.0)) {
        best = bound;
        L = k;
        remainder = bound;
      }
      if (k >= m && bound < tol_rel * 1e-6) break;
      if (ak_abs == 0.0) {
        L = k;
        remainder = 0.0;
        break;
      }
    }
    ak.resize(static_cast<std::size_t>(L));
    Mpfr sqrt_two_over_pi = num::sqrt(Mpfr(2L, bits) / pi);
    Mpfr phase0 = pi * (static_cast<double>(m) / 2.0 + 0.25);
    Mpfr Rm(R, bits);
    auto tail_integrand = [&](const Mpfr& rho) -> Cplx {
      Cplx r = Cplx(Rm, Mpfr(bits)) + Cplx(dir.re * rho, dir.im * rho);
      Cplx x = num::pow(r, static_cast<long>(d)) * cm;
      Cplx iy = Cplx(Mpfr(bits), Mpfr(1L, bits)) / x;
      Cplx s = Cplx(ak.back(), Mpfr(bits));
      for (long k = static_cast<long>(ak.size()) - 2; k >= 0; --k) s = s * iy + Cplx(ak[k], Mpfr(bits));
      Cplx expo_arg = Cplx(-(r * r).re, -(r * r).im) + Cplx(-x.im, x.re - phase0);
      Cplx pre = num::pow(r, a) * num::exp(expo_arg);
      Cplx root = num::sqrt(x);
      return (pre * s) * dir * sqrt_two_over_pi / root;
    };
    double de_err = 0.0;
    Cplx tail = detail::exp_sinh_complex(tail_integrand, bits, tol / 4, de_err, res.evaluations);
    total += tail.re;
    // Remainder of the asymptotic expansion, integrated against an upper bound of |integrand|.
    double cos2 = std::cos(2 * phi);
    double G = 0.0;
    double step = 0.01;
    for (double rho = 0.0; rho < 60.0; rho += step) {
      double v = std::exp(a * std::log(R + rho + step) - R * R - rho * rho * cos2);
      G += v * step;
      if (rho > 2.0 && v < 1e-300) break;
    }
    err += de_err + remainder * std::sqrt(2.0 / (M_PI * X0)) * G * 2.0;
  }
  double rounding = std::ldexp(scale * static_cast<double>(res.evaluations + 16), -static_cast<int>(bits) + 8);
  res.value = Ball(total, Mag::from_double((err + rounding) * 1.000001));
  res.converged = ok && res.err() <= tol;
  return res;
}

/// F_p(t) = (2/d) int_0^inf r^{2p+1} e^{-r^2} J_0(2 t r^d) dr.
inline FpValue fp_quadrature(const FpParams& params, double t, double tol) {
  params.validate();
  if (!(t >= 0)) throw std::domain_error("fp_quadrature: t must be >= 0");
  const int d = params.d;
  QuadratureResult q = radial_bessel_integral(2L * params.p + 1, 0, d, 2.0 * t, tol * d / 2.0);
  Ball v = q.value * 2L / static_cast<long>(d);
  if (!q.converged || v.rad_double() > tol)
    throw num::NonConvergence("fp_quadrature: tolerance not met", v.mid_double(), v.rad_double(), 0);
  return {v, 0, q.evaluations, "quadrature"};
}

/// Coefficients b_n of L^m[r^{2p+1} e^{-r^2}] = (sum_n b_n r^n) e^{-r^2}, with
/// L[phi] = -phi - r phi'.
inline std::vector<Mpfr> u_derivative_polynomial(int p, int m) {
  std::vector<Mpfr> b(static_cast<std::size_t>(2 * p + 2 + 2 * m), Mpfr(static_cast<Bits>(256)));
  b[static_cast<std::size_t>(2 * p + 1)] = Mpfr(1L, 256);
  for (int step = 0; step < m; ++step) {
    std::vector<Mpfr> nb(b.size(), Mpfr(static_cast<Bits>(256)));
    for (std::size_t n = 0; n < b.size(); ++n) {
      if (b[n].is_zero()) continue;
      nb[n] -= b[n] * static_cast<double>(n + 1);
      if (n + 2 < b.size()) nb[n + 2] += b[n] * 2.0;
    }
    b = std::move(nb);
  }
  return b;
}

/// d^m/du^m F_p(e^{u/2}) by quadrature, independent of the series:
/// (2/d) (2d)^{-m} int_0^inf J_0(2 t r^d) L^m[r^{2p+1} e^{-r^2}] dr.
inline std::vector<Ball> fp_u_derivatives_quadrature(const FpParams& params, double u, int m_max, double tol) {
  params.validate();
  const int d = params.d;
  double t = std::exp(u / 2.0);
  std::vector<Ball> out;
  for (int m = 0; m <= m_max; ++m) {
    auto b = u_derivative_polynomial(params.p, m);
    double prefactor = (2.0 / d) * std::pow(2.0 * d, -m);
    double coeff_sum = 0.0;
    for (auto& x : b) coeff_sum += std::fabs(x.to_double());
    Ball acc;
    bool first = true;
    for (std::size_t n = 0; n < b.size(); ++n) {
      if (b[n].is_zero()) continue;
      double tol_n = tol / (prefactor * coeff_sum);
      QuadratureResult q = radial_bessel_integral(static_cast<long>(n), 0, d, 2.0 * t, tol_n);
      Ball term = q.value * Ball(b[n]);
      if (first) {
        acc = term;
        first = false;
      } else {
        acc = acc + term;
      }
    }
    Ball pre = Ball::exact(2L, acc.prec()) / static_cast<long>(d);
    for (int i = 0; i < m; ++i) pre = pre / static_cast<long>(2 * d);
    out.push_back(acc * pre);
  }
  return out;
}

}  // namespace lgpos::fp
