#pragma once

// Dense matrices of balls and certified determinants.

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lgpos/numerics/ball.hpp"

namespace lgpos::num {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  /// Leading m x m principal block.
  Matrix leading(std::size_t m) const {
    Matrix out(m, m, data_.front());
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) out(i, j) = (*this)(i, j);
    return out;
  }
  /// Submatrix on the given row and column index sets.
  Matrix select(const std::vector<std::size_t>& ri, const std::vector<std::size_t>& ci) const {
    Matrix out(ri.size(), ci.size(), data_.front());
    for (std::size_t i = 0; i < ri.size(); ++i)
      for (std::size_t j = 0; j < ci.size(); ++j) out(i, j) = (*this)(ri[i], ci[j]);
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using BallMatrix = Matrix<Ball>;
using CBallMatrix = Matrix<CBall>;

namespace detail {
inline Mpfr abs_mid(const Ball& b) { return abs(b.mid()); }
inline Mpfr abs_mid(const CBall& b) { return hypot(b.re(), b.im()); }
inline Ball zero_like(const Ball& b) { return Ball(Mpfr(b.prec())); }
inline CBall zero_like(const CBall& b) { return CBall(b.prec()); }
inline Ball one_like(const Ball& b) { return Ball::exact(1L, b.prec()); }
inline CBall one_like(const CBall& b) { return CBall::exact(1.0, 0.0, b.prec()); }
inline Ball ball_with_radius(const Ball& like, const Mag& r) { return Ball(Mpfr(like.prec()), r); }
inline CBall ball_with_radius(const CBall& like, const Mag& r) { return CBall(Mpfr(like.prec()), Mpfr(like.prec()), r); }
}  // namespace detail

/// Determinant by Gaussian elimination with partial pivoting in ball
/// arithmetic. If no remaining pivot excludes zero, the rest is enclosed by
/// the product of row 1-norms (a Hadamard-type bound).
template <class T>
T certified_det(Matrix<T> a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("certified_det: matrix not square");
  if (n == 0) return T();
  T det = detail::one_like(a(0, 0));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = n;
    Mpfr best(static_cast<Bits>(64));
    for (std::size_t i = k; i < n; ++i) {
      if (a(i, k).contains_zero()) continue;
      Mpfr v = detail::abs_mid(a(i, k));
      if (piv == n || v > best) {
        best = v;
        piv = i;
      }
    }
    if (piv == n) {
      // If the column is exactly zero the determinant is exactly zero.
      bool exact_zero = true;
      for (std::size_t i = k; i < n; ++i)
        if (!(a(i, k).is_exact() && detail::abs_mid(a(i, k)).is_zero())) exact_zero = false;
      if (exact_zero) return detail::zero_like(a(0, 0));
      Mag bound = Mag::pow2(0);
      for (std::size_t i = k; i < n; ++i) {
        Mag row;
        for (std::size_t j = k; j < n; ++j) row = row + a(i, j).mag();
        bound = bound * row;
      }
      return detail::ball_with_radius(a(0, 0), det.mag() * bound);
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det = det * a(k, k);
    if (k + 1 == n) break;
    T inv = inverse(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k).is_exact() && detail::abs_mid(a(i, k)).is_zero()) continue;
      T f = a(i, k) * inv;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = a(i, j) - f * a(k, j);
    }
  }
  return det;
}

/// Determinants of the leading m x m blocks, m = 1..n.
template <class T>
std::vector<T> leading_minor_dets(const Matrix<T>& a) {
  std::vector<T> out;
  for (std::size_t m = 1; m <= a.rows(); ++m) out.push_back(certified_det(a.leading(m)));
  return out;
}

/// Certified sign of a real ball; for a complex ball, the sign of its real
/// part provided the imaginary part is consistent with zero.
inline Sign certified_sign(const Ball& b) { return b.sign(); }
inline Sign certified_sign(const CBall& b) {
  if (b.imag().sign() != Sign::Indeterminate) return Sign::Indeterminate;
  return b.real().sign();
}

}  // namespace lgpos::num
