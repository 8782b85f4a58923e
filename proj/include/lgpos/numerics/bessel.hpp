#pragma once

#include "lgpos/numerics/ball.hpp"

namespace lgpos::num {

/// J_m(x) for integer order m >= 0 and a real ball x. The midpoint comes from
/// the correctly rounded MPFR evaluation; the input radius propagates with
/// Lipschitz constant 1 since |J_m'| <= 1 on the real line.
inline Ball bessel_j(long m, const Ball& x) {
  if (m < 0) throw std::domain_error("bessel_j: negative order");
  Mpfr v = bessel_jn(m, x.mid());
  Mag r = x.rad() + detail::rounding_error(v);
  return Ball(std::move(v), r);
}

inline Ball bessel_j(long m, double x, int digits) { return bessel_j(m, Ball::exact(x, bits_for_digits(digits))); }

}  // namespace lgpos::num
