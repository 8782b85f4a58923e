#pragma once

// Homogeneous polynomials in n complex variables and the densities rho used
// as weights in the multivariate integrals.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lgpos/numerics/rng.hpp"

namespace lgpos::mv {

using cplx = std::complex<double>;

class HomogeneousPoly {
 public:
  using Exponent = std::vector<int>;

  HomogeneousPoly(int n, int degree) : n_(n), degree_(degree) {
    if (n < 1) throw std::invalid_argument("HomogeneousPoly: n must be >= 1");
    if (degree < 0) throw std::invalid_argument("HomogeneousPoly: degree must be >= 0");
  }

  int n() const { return n_; }
  int degree() const { return degree_; }
  const std::map<Exponent, cplx>& terms() const { return terms_; }
  bool is_zero() const { return flat_.empty(); }

  /// Adds c z^e; the exponents must sum to the degree.
  HomogeneousPoly& add_term(const Exponent& e, cplx c) {
    if (static_cast<int>(e.size()) != n_) throw std::invalid_argument("HomogeneousPoly: exponent length != n");
    int s = 0;
    for (int k : e) {
      if (k < 0) throw std::invalid_argument("HomogeneousPoly: negative exponent");
      s += k;
    }
    if (s != degree_) throw std::invalid_argument("HomogeneousPoly: exponent does not sum to degree");
    cplx& slot = terms_[e];
    slot += c;
    if (slot == cplx(0.0)) terms_.erase(e);
    rebuild();
    return *this;
  }

  cplx eval(const cplx* z) const {
    cplx acc = 0.0;
    for (const auto& [e, c] : flat_) {
      cplx m = c;
      for (int i = 0; i < n_; ++i)
        for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) m *= z[i];
      acc += m;
    }
    return acc;
  }
  cplx eval(const std::vector<cplx>& z) const {
    if (static_cast<int>(z.size()) != n_) throw std::invalid_argument("HomogeneousPoly::eval: wrong dimension");
    return eval(z.data());
  }

  std::string to_string() const {
    if (flat_.empty()) return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [e, c] : flat_) {
      if (!first) os << " + ";
      first = false;
      os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::fabs(c.imag()) << "i)";
      for (int i = 0; i < n_; ++i) {
        int k = e[static_cast<std::size_t>(i)];
        if (k == 0) continue;
        os << "*z" << (i + 1);
        if (k > 1) os << "^" << k;
      }
    }
    return os.str();
  }

  /// All exponent vectors of length n summing to degree, in lexicographic order.
  static std::vector<Exponent> monomials(int n, int degree) {
    std::vector<Exponent> out;
    Exponent e(static_cast<std::size_t>(n), 0);
    auto rec = [&](auto&& self, int i, int left) -> void {
      if (i == n - 1) {
        e[static_cast<std::size_t>(i)] = left;
        out.push_back(e);
        return;
      }
      for (int k = left; k >= 0; --k) {
        e[static_cast<std::size_t>(i)] = k;
        self(self, i + 1, left - k);
      }
    };
    rec(rec, 0, degree);
    return out;
  }

  static HomogeneousPoly zero(int n, int degree) { return HomogeneousPoly(n, degree); }

  /// I.i.d. complex Gaussian coefficients, E|c|^2 = 1, for every monomial.
  static HomogeneousPoly random(int n, int degree, std::uint64_t seed) {
    HomogeneousPoly w(n, degree);
    num::SeededRng rng(seed);
    const double s = std::sqrt(0.5);
    for (const auto& e : monomials(n, degree)) {
      double re = rng.normal() * s;
      double im = rng.normal() * s;
      w.add_term(e, cplx(re, im));
    }
    return w;
  }

  /// sum_j a_j z_j^d.
  static HomogeneousPoly separable(const std::vector<cplx>& a, int degree) {
    HomogeneousPoly w(static_cast<int>(a.size()), degree);
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a[j] == cplx(0.0)) continue;
      Exponent e(a.size(), 0);
      e[j] = degree;
      w.add_term(e, a[j]);
    }
    return w;
  }

  static HomogeneousPoly monomial(const Exponent& e, cplx c = 1.0) {
    int s = 0;
    for (int k : e) s += k;
    HomogeneousPoly w(static_cast<int>(e.size()), s);
    w.add_term(e, c);
    return w;
  }

  /// Coefficients a_j if the polynomial is sum_j a_j z_j^d, otherwise nothing.
  std::optional<std::vector<cplx>> separable_coefficients() const {
    std::vector<cplx> a(static_cast<std::size_t>(n_), 0.0);
    for (const auto& [e, c] : flat_) {
      int nz = 0;
      std::size_t j = 0;
      for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i] != 0) {
          ++nz;
          j = i;
        }
      if (nz != 1) return std::nullopt;
      a[j] = c;
    }
    return a;
  }

 private:
  void rebuild() { flat_.assign(terms_.begin(), terms_.end()); }

  int n_;
  int degree_;
  std::map<Exponent, cplx> terms_;
  std::vector<std::pair<Exponent, cplx>> flat_;
};

/// rho = 1 or rho = |P|^2; rho(lambda z) = |lambda|^{2 ell} rho(z).
class Density {
 public:
  enum class Kind { One, AbsSquarePoly };

  static Density one() { return Density(); }
  static Density abs_square(HomogeneousPoly P) {
    Density r;
    r.kind_ = Kind::AbsSquarePoly;
    r.ell_ = P.degree();
    r.P_.emplace(std::move(P));
    return r;
  }

  Kind kind() const { return kind_; }
  int ell() const { return ell_; }
  const std::optional<HomogeneousPoly>& poly() const { return P_; }

  double eval(const cplx* z) const {
    if (kind_ == Kind::One) return 1.0;
    return std::norm(P_->eval(z));
  }

  std::string to_string() const {
    if (kind_ == Kind::One) return "1";
    return "|" + P_->to_string() + "|^2";
  }

 private:
  Kind kind_ = Kind::One;
  int ell_ = 0;
  std::optional<HomogeneousPoly> P_;
};

}  // namespace lgpos::mv
