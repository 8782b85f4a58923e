#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "lgpos/numerics/mpfr.hpp"

namespace lgpos::num {

/// Thrown when a function is evaluated at one of its poles.
class PoleError : public std::domain_error {
 public:
  explicit PoleError(const std::string& what) : std::domain_error(what) {}
};

/// Thrown when an adaptive computation cannot meet its tolerance. Carries the
/// best estimate available and its error estimate.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double partial, double err_estimate, int digits_reached)
      : std::runtime_error(what), partial_(partial), err_(err_estimate), digits_(digits_reached) {}
  double partial() const { return partial_; }
  double err_estimate() const { return err_; }
  int digits_reached() const { return digits_; }

 private:
  double partial_;
  double err_;
  int digits_;
};

inline constexpr int kDefaultStartDigits = 30;
inline constexpr int kDefaultPrecisionCap = 600;

/// Precision cap in decimal digits, read from POSITIVITY_PRECISION_CAP.
inline int precision_cap_digits() {
  const char* env = std::getenv("POSITIVITY_PRECISION_CAP");
  if (env == nullptr || *env == '\0') return kDefaultPrecisionCap;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (end == env || v < 10) return kDefaultPrecisionCap;
  if (v > 100000) v = 100000;
  return static_cast<int>(v);
}

/// Starting precision and cap for an adaptive-precision computation.
struct PrecisionPolicy {
  int start_digits = kDefaultStartDigits;
  int cap_digits = precision_cap_digits();

  static PrecisionPolicy with_cap(int cap) {
    PrecisionPolicy p;
    p.cap_digits = cap;
    if (p.start_digits > cap) p.start_digits = cap;
    return p;
  }
};

}  // namespace lgpos::num
