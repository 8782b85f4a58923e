#pragma once

// Determinant tests of positivity: total positivity on grids, Wronskian
// (extended total positivity) determinants, Hankel scans of F_p, Bochner
// positive-definiteness and the discrete Cauchy-Binet identity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "lgpos/fp/kernel.hpp"
#include "lgpos/numerics/linalg.hpp"
#include "lgpos/numerics/rng.hpp"

namespace lgpos::positivity {

using num::Ball;
using num::BallMatrix;
using num::Bits;
using num::CBall;
using num::CBallMatrix;
using num::Mpfr;
using num::Sign;

class InsufficientDerivatives : public std::invalid_argument {
 public:
  explicit InsufficientDerivatives(const std::string& what) : std::invalid_argument(what) {}
};

class HermitianViolation : public std::runtime_error {
 public:
  explicit HermitianViolation(const std::string& what) : std::runtime_error(what) {}
};

struct GridSpec {
  std::vector<double> xs;
  std::vector<double> ys;

  std::size_t size() const { return xs.size(); }
  void validate() const {
    if (xs.size() != ys.size() || xs.empty()) throw std::invalid_argument("GridSpec: xs and ys must have equal nonzero length");
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (!(xs[i] > xs[i - 1]) || !(ys[i] > ys[i - 1]))
        throw std::invalid_argument("GridSpec: sequences must be strictly increasing");
  }
};

struct PositivityVerdict {
  Ball value;
  Sign sign = Sign::Indeterminate;
  std::string context;
  int digits = 0;
  bool cap_reached = false;
  bool counterexample_candidate = false;
  // Set when a candidate survived precision doubling and the quadrature
  // route also gave a negative value.
  bool dual_confirmed = false;
};

/// A real kernel evaluated at an exact double argument with |error| <= tol.
using RealKernel = std::function<Ball(double x, double tol)>;

namespace detail {

/// x - y, required to be exact in double so that the matrix is that of the kernel.
inline double exact_difference(double x, double y) {
  double s = x - y;
  double bb = s - x;
  double err = (x - (s - bb)) + (-y - bb);
  if (err != 0.0) throw std::invalid_argument("grid difference is not exactly representable; quantize the grid");
  return s;
}

inline double initial_tol(int cap_digits) { return std::pow(10.0, -std::min(30, cap_digits)); }

}  // namespace detail

/// Strictly increasing grid of n points, quantized to multiples of 2^-20 so
/// that all differences are exact, with neighbouring points at least min_gap apart.
inline std::vector<double> seeded_points(std::size_t n, num::SeededRng& rng, double lo, double hi, double min_gap) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<double> v(n);
    for (auto& x : v) x = std::ldexp(std::round(std::ldexp(rng.uniform(lo, hi), 20)), -20);
    std::sort(v.begin(), v.end());
    bool ok = true;
    for (std::size_t i = 1; i < n; ++i)
      if (v[i] - v[i - 1] < min_gap) ok = false;
    if (ok) return v;
  }
  throw std::runtime_error("seeded_points: could not satisfy the minimum gap");
}

inline GridSpec seeded_grid(std::size_t n, std::uint64_t seed, double lo = -4.0, double hi = 4.0,
                            double min_gap = 1e-2) {
  num::SeededRng rng(seed);
  GridSpec g;
  g.xs = seeded_points(n, rng, lo, hi, min_gap);
  g.ys = seeded_points(n, rng, lo, hi, min_gap);
  return g;
}

/// u -> F_p(e^{u/2}) from the series, evaluated at exact u.
inline RealKernel fp_u_kernel(const fp::FpKernel& kernel, const num::PrecisionPolicy& policy = {}) {
  return [&kernel, policy](double u, double tol) {
    auto out = kernel.weighted_sums_adaptive(fp::SeriesArg::from_u(u), {fp::SeriesWeight::derivative(0)}, tol, policy);
    return out.values[0];
  };
}

/// det_{i,j} f(x_i - y_j) with a certified sign. The kernel tolerance is
/// tightened until the sign is certified or the precision cap is reached.
inline PositivityVerdict tp_grid_det(const RealKernel& f, const GridSpec& grid, const num::PrecisionPolicy& policy = {}) {
  grid.validate();
  const std::size_t n = grid.size();
  std::vector<double> diff(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) diff[i * n + j] = detail::exact_difference(grid.xs[i], grid.ys[j]);
  PositivityVerdict v;
  v.context = "det f(x_i - y_j), N=" + std::to_string(n);
  double floor_tol = std::pow(10.0, -policy.cap_digits);
  for (double tol = detail::initial_tol(policy.cap_digits);; tol *= 1e-20) {
    if (tol < floor_tol) tol = floor_tol;
    try {
      std::vector<Ball> vals;
      for (double x : diff) vals.push_back(f(x, tol));
      BallMatrix m(n, n, vals.front());
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = vals[i * n + j];
      v.value = num::certified_det(m);
      v.sign = v.value.sign();
      v.digits = static_cast<int>(std::ceil(-std::log10(tol)));
    } catch (const num::NonConvergence&) {
      v.cap_reached = true;
      return v;
    }
    if (v.sign != Sign::Indeterminate) return v;
    if (tol <= floor_tol) {
      v.cap_reached = true;
      return v;
    }
  }
}

/// The matrix ((-1)^l f^{(k+l)}(x))_{0<=k,l<N}.
inline BallMatrix hankel_matrix(const std::vector<Ball>& derivs, int N) {
  if (N < 1) throw std::invalid_argument("hankel_matrix: N must be >= 1");
  if (derivs.size() < static_cast<std::size_t>(2 * N - 1))
    throw InsufficientDerivatives("need " + std::to_string(2 * N - 1) + " derivatives, got " +
                                  std::to_string(derivs.size()));
  BallMatrix m(static_cast<std::size_t>(N), static_cast<std::size_t>(N), derivs.front());
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l) {
      const Ball& e = derivs[static_cast<std::size_t>(k + l)];
      m(static_cast<std::size_t>(k), static_cast<std::size_t>(l)) = (l % 2) ? -e : e;
    }
  return m;
}

/// Delta_N(f, x) from the derivatives f(x), f'(x), ...
inline PositivityVerdict wronskian_delta(const std::vector<Ball>& derivs, int N) {
  PositivityVerdict v;
  v.value = num::certified_det(hankel_matrix(derivs, N));
  v.sign = v.value.sign();
  v.context = "Delta_" + std::to_string(N);
  v.digits = num::digits_for_bits(v.value.prec());
  return v;
}

struct HankelCell {
  int N = 0;
  double u = 0.0;
  PositivityVerdict verdict;
};

namespace detail {

inline std::vector<PositivityVerdict> hankel_column(const std::vector<Ball>& derivs, int N_max) {
  std::vector<PositivityVerdict> out;
  for (int N = 1; N <= N_max; ++N) out.push_back(wronskian_delta(derivs, N));
  return out;
}

}  // namespace detail

/// Hankel determinants det((-1)^l d^{k+l}/du^{k+l} F_p(e^{u/2})) for N = 1..N_max
/// at every u. Precision is raised until all signs are certified; cells still
/// undecided at the cap are returned as Indeterminate with cap_reached set.
/// In the proven range a Negative cell is escalated once more at doubled
/// precision and then recomputed by quadrature before being reported.
inline std::vector<HankelCell> hankel_scan(const fp::FpParams& params, int N_max, const std::vector<double>& u_grid,
                                           double tol = 1e-30, const num::PrecisionPolicy& policy = {}) {
  params.validate();
  if (N_max < 1) throw std::invalid_argument("hankel_scan: N_max must be >= 1");
  const int m_max = 2 * N_max - 2;
  if (m_max > 24) throw std::invalid_argument("hankel_scan: N_max must be <= 13");
  fp::FpKernel kernel(params);
  std::vector<fp::SeriesWeight> weights;
  for (int m = 0; m <= m_max; ++m) weights.push_back(fp::SeriesWeight::derivative(m));
  std::vector<HankelCell> cells;
  const double floor_tol = std::pow(10.0, -policy.cap_digits);
  for (double u : u_grid) {
    auto arg = fp::SeriesArg::from_u(u);
    std::vector<PositivityVerdict> col;
    bool at_cap = false;
    int digits = 0;
    for (double t = std::min(tol, detail::initial_tol(policy.cap_digits));; t *= 1e-20) {
      if (t < floor_tol) t = floor_tol;
      fp::SeriesOutcome out;
      try {
        out = kernel.weighted_sums_adaptive(arg, weights, t, policy);
      } catch (const num::NonConvergence&) {
        out = kernel.weighted_sums(arg, weights, t, policy.cap_digits);
        at_cap = true;
      }
      digits = out.digits;
      col = detail::hankel_column(out.values, N_max);
      bool undecided = std::any_of(col.begin(), col.end(), [](const auto& v) { return v.sign == Sign::Indeterminate; });
      if (!undecided || at_cap) break;
      if (t <= floor_tol) {
        at_cap = true;
        break;
      }
    }
    for (int N = 1; N <= N_max; ++N) {
      PositivityVerdict v = col[static_cast<std::size_t>(N - 1)];
      v.digits = digits;
      v.cap_reached = at_cap && v.sign == Sign::Indeterminate;
      std::ostringstream ctx;
      ctx << "Hankel " << params.label() << ",N=" << N << ",u=" << u;
      v.context = ctx.str();
      if (v.sign == Sign::Negative && params.in_proven_range()) {
        v.counterexample_candidate = true;
        // Doubled precision with a much tighter tolerance.
        num::PrecisionPolicy hi = policy;
        hi.start_digits = std::min(policy.cap_digits, 2 * std::max(digits, policy.start_digits));
        try {
          auto again = kernel.weighted_sums_adaptive(arg, weights, std::max(floor_tol, 1e-60), hi);
          PositivityVerdict w = wronskian_delta(again.values, N);
          if (w.sign == Sign::Negative) {
            auto dual = fp::fp_u_derivatives_quadrature(params, u, 2 * N - 2, 1e-25);
            PositivityVerdict q = wronskian_delta(dual, N);
            v.dual_confirmed = q.sign == Sign::Negative;
          } else {
            v = w;
            v.context = ctx.str();
          }
        } catch (const num::NonConvergence&) {
        }
      }
      cells.push_back({N, u, v});
    }
  }
  return cells;
}

/// Bochner check: [phi(s_i - s_j)] is Hermitian within `herm_tol` (relative)
/// and all leading principal minors are certified positive.
struct BochnerResult {
  PositivityVerdict verdict;
  std::vector<CBall> minors;
  double hermitian_residual = 0.0;
};

using ComplexFunction = std::function<CBall(double s)>;

inline BochnerResult bochner_pd_check(const ComplexFunction& phi, const std::vector<double>& points,
                                      double herm_tol = 1e-20) {
  const std::size_t n = points.size();
  if (n == 0) throw std::invalid_argument("bochner_pd_check: no points");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (points[i] == points[j]) throw std::invalid_argument("bochner_pd_check: points must be distinct");
  BochnerResult res;
  CBall zero = phi(0.0);
  CBallMatrix m(n, n, zero);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = i == j ? zero : phi(detail::exact_difference(points[i], points[j]));
      norm = std::max(norm, std::abs(m(i, j).mid_double()));
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      CBall r = m(i, j) - m(j, i).conj();
      double excess = std::max(0.0, std::abs(r.mid_double()) - r.rad_double());
      res.hermitian_residual = std::max(res.hermitian_residual, std::abs(r.mid_double()) / norm);
      if (excess > herm_tol * norm) throw HermitianViolation("bochner_pd_check: matrix is not Hermitian");
    }
  res.minors = num::leading_minor_dets(m);
  Sign overall = Sign::Positive;
  for (const CBall& mnr : res.minors) {
    Sign s = num::certified_sign(mnr);
    if (s == Sign::Negative) {
      overall = Sign::Negative;
      break;
    }
    if (s == Sign::Indeterminate) overall = Sign::Indeterminate;
  }
  res.verdict.value = res.minors.back().real();
  res.verdict.sign = overall;
  res.verdict.context = "leading minors of [phi(s_i - s_j)], n=" + std::to_string(n);
  res.verdict.digits = num::digits_for_bits(res.verdict.value.prec());
  return res;
}

/// Gamma(1/2 + is) / Gamma(1/2).
inline ComplexFunction phi_gamma_half(int digits = 40) {
  return [digits](double s) {
    Bits b = num::bits_for_digits(digits);
    CBall z = CBall::exact(0.5, s, b);
    return num::exp(num::ln_gamma(z) - CBall(num::ln_gamma(Ball::rational(1, 2, b))));
  };
}

/// Gamma(eps + is) Gamma(m - ids) / Gamma(1 - is): the kernel G of the
/// multivariate theorem with Gamma(is) shifted off its pole.
inline ComplexFunction phi_regularized_g(int m, int d, double eps, int digits = 40) {
  return [=](double s) {
    Bits b = num::bits_for_digits(digits);
    CBall a = CBall::exact(eps, s, b);
    CBall c = CBall::exact(static_cast<double>(m), 0.0, b) - CBall::exact(0.0, s, b) * Ball::exact(static_cast<long>(d), b);
    CBall e = CBall::exact(1.0, -s, b);
    return num::exp(num::ln_gamma(a) + num::ln_gamma(c) - num::ln_gamma(e));
  };
}

inline ComplexFunction phi_gaussian(int digits = 40) {
  return [digits](double s) {
    Bits b = num::bits_for_digits(digits);
    Ball x = Ball::exact(s, b);
    return CBall(num::exp(-(x * x)));
  };
}

inline BallMatrix random_integer_matrix(std::size_t rows, std::size_t cols, num::SeededRng& rng, long lo = -9,
                                        long hi = 9) {
  BallMatrix m(rows, cols, Ball::exact(0L, 128));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      long v = lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
      m(i, j) = Ball::exact(v, 128);
    }
  return m;
}

namespace detail {

inline void combinations(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
                         std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    combinations(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::size_t> random_subset(std::size_t n, std::size_t k, num::SeededRng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// Fraction-free (Bareiss) determinant of an integer matrix.
inline mpz_class bareiss_det(std::vector<std::vector<mpz_class>> a) {
  const std::size_t n = a.size();
  mpz_class prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && a[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(a[k], a[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

/// Integer entries of a matrix of exact balls, if they all are integers.
inline bool integer_entries(const BallMatrix& m, std::vector<std::vector<mpz_class>>& out) {
  out.assign(m.rows(), std::vector<mpz_class>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Ball& b = m(i, j);
      if (!b.is_exact() || !b.mid().is_integer()) return false;
      mpfr_get_z(out[i][j].get_mpz_t(), b.mid().get(), MPFR_RNDN);
    }
  return true;
}

inline BallMatrix multiply(const BallMatrix& a, const BallMatrix& b) {
  BallMatrix c(a.rows(), b.cols(), Ball::exact(0L, a(0, 0).prec()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Ball s = Ball::exact(0L, a(0, 0).prec());
      for (std::size_t k = 0; k < a.cols(); ++k) s = s + a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

}  // namespace detail

/// Checks det((AB)_{I,J}) = sum_K det(A_{I,K}) det(B_{K,J}) for `trials`
/// random index sets I, J of size k, with the determinant engine. For integer
/// matrices every ball determinant must also contain the exact Bareiss value.
inline bool cauchy_binet_check(const BallMatrix& A, const BallMatrix& B, std::size_t k, int trials, std::uint64_t seed) {
  if (A.cols() != B.rows()) throw std::invalid_argument("cauchy_binet_check: incompatible dimensions");
  if (k == 0 || k > A.rows() || k > B.cols() || k > A.cols()) throw std::invalid_argument("cauchy_binet_check: bad k");
  num::SeededRng rng(seed);
  BallMatrix AB = detail::multiply(A, B);
  std::vector<std::vector<std::size_t>> ks;
  std::vector<std::size_t> cur;
  detail::combinations(A.cols(), k, 0, cur, ks);
  for (int t = 0; t < trials; ++t) {
    auto I = detail::random_subset(A.rows(), k, rng);
    auto J = detail::random_subset(B.cols(), k, rng);
    Ball lhs = num::certified_det(AB.select(I, J));
    Ball rhs = Ball::exact(0L, lhs.prec());
    for (const auto& K : ks) rhs = rhs + num::certified_det(A.select(I, K)) * num::certified_det(B.select(K, J));
    if (!(lhs - rhs).contains_zero()) return false;
    std::vector<std::vector<mpz_class>> zi;
    if (detail::integer_entries(AB.select(I, J), zi)) {
      mpz_class exact = detail::bareiss_det(zi);
      Mpfr e(lhs.prec() + 64);
      mpfr_set_z(e.get(), exact.get_mpz_t(), MPFR_RNDN);
      if (!lhs.contains(e) || !rhs.contains(e)) return false;
    }
  }
  return true;
}

}  // namespace lgpos::positivity
