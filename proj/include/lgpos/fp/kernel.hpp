#pragma once

// Route selection for F_p(t), the exact value at t = 0 and the leading
// large-t term.

#include <cmath>
#include <stdexcept>
#include <string>

#include "lgpos/fp/quadrature.hpp"
#include "lgpos/fp/series.hpp"

namespace lgpos::fp {

enum class Route { Auto, Series, Quadrature };

inline const char* to_string(Route r) {
  switch (r) {
    case Route::Auto: return "auto";
    case Route::Series: return "series";
    case Route::Quadrature: return "quadrature";
  }
  return "?";
}

inline Route route_from_string(const std::string& s) {
  if (s == "auto") return Route::Auto;
  if (s == "series") return Route::Series;
  if (s == "quadrature") return Route::Quadrature;
  throw std::invalid_argument("unknown route: " + s);
}

/// Where Route::Auto switches from quadrature to the series.
inline constexpr double kSeriesThreshold = 0.5;

/// F_p(0) = Gamma(p+1)/d, exact up to the rounding of one division.
inline Ball fp_at_zero(const FpParams& params, int digits = 40) {
  params.validate();
  Bits bits = num::bits_for_digits(digits);
  Ball f = Ball::exact(1L, bits);
  for (long i = 2; i <= params.p; ++i) f = f * i;
  return f / static_cast<long>(params.d);
}

/// F_p(t) along the requested route. Auto uses the series for t >= 0.5 and
/// quadrature below.
inline FpValue fp_value(const FpKernel& kernel, double t, double tol, Route route = Route::Auto,
                        const num::PrecisionPolicy& policy = {}) {
  if (route == Route::Auto) route = t >= kSeriesThreshold ? Route::Series : Route::Quadrature;
  if (route == Route::Series) return fp_series(kernel, t, tol, policy);
  return fp_quadrature(kernel.params(), t, tol);
}

/// First nonzero term c_j t^{-2 a_j} of the large-t expansion. No error bound.
inline Ball fp_asymptotic(const FpParams& params, double t, int digits = 30) {
  params.validate();
  if (!(t > 0)) throw std::domain_error("fp_asymptotic: t must be > 0");
  FpKernel kernel(params);
  long j = 0;
  while (kernel.coefficient_is_zero(j)) ++j;
  auto terms = kernel.terms(static_cast<int>(j + 1), digits);
  const FpSeriesTerm& term = terms.back();
  Bits bits = num::bits_for_digits(digits);
  Ball a = Ball::rational(term.exponent_num, term.exponent_den, bits);
  Ball tt = Ball::exact(t, bits);
  Ball v = term.coefficient * num::exp(-(a * 2L) * num::log(tt));
  return v / static_cast<long>(params.d * params.d);
}

}  // namespace lgpos::fp
