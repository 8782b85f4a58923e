#pragma once

// Moment matrices I_{k,l,p}(t) = int_C z^{p+dk} conj(z)^{p+dl} e^{-|z|^2 + t z^d - conj(t z^d)}
// for real t >= 0, their leading minors, the triangular (Gram-Schmidt)
// biorthogonalization and the full monomial Gram matrix.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgpos/fp/kernel.hpp"
#include "lgpos/fp/quadrature.hpp"
#include "lgpos/numerics/linalg.hpp"
#include "lgpos/positivity/lab.hpp"

namespace lgpos::biorth {

using num::Ball;
using num::Bits;
using num::CBall;
using num::CBallMatrix;
using num::Mag;
using num::Mpfr;
using num::Sign;
using positivity::PositivityVerdict;

class DegenerateFiltration : public std::runtime_error {
 public:
  DegenerateFiltration(const std::string& what, int index) : std::runtime_error(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

/// pi Gamma(p + dk + 1) = I_{k,k,p}(0).
inline Ball gaussian_moment(int d, int p, int k, Bits bits) {
  Ball f = Ball::exact(1L, bits);
  for (long i = 2; i <= p + static_cast<long>(d) * k; ++i) f = f * i;
  return f * Ball::pi(bits);
}

/// I_{k,l,p}(t) with |error| <= tol. t = 0 is exact; otherwise the series is
/// used for t >= 0.5 and the Bessel quadrature below.
inline CBall moment_entry(int d, int p, int k, int l, double t, double tol, fp::Route route = fp::Route::Auto,
                          const num::PrecisionPolicy& policy = {}) {
  fp::FpParams prm{d, p};
  prm.validate();
  if (p >= d) throw std::invalid_argument("moment_entry: p is a residue class, need p <= d - 1");
  if (k < 0 || l < 0) throw std::invalid_argument("moment_entry: k, l must be >= 0");
  if (!(t >= 0)) throw std::domain_error("moment_entry: t must be real and >= 0");
  if (t == 0.0) {
    Bits bits = num::bits_for_digits(std::max(40, static_cast<int>(std::ceil(-std::log10(tol))) + 30));
    if (k != l) return CBall(bits);
    return CBall(gaussian_moment(d, p, k, bits));
  }
  if (route == fp::Route::Auto) route = t >= fp::kSeriesThreshold ? fp::Route::Series : fp::Route::Quadrature;
  if (route == fp::Route::Series) {
    // I = pi d (-1)^l sum_j c_j ff(-a_j, k) ff(-a_j, l) t^{-2 a_j - k - l}
    double scale = M_PI * d * std::pow(t, -(k + l));
    fp::FpKernel kernel(prm);
    auto out = kernel.weighted_sums_adaptive(fp::SeriesArg::from_t(t), {fp::SeriesWeight::moment(k, l)},
                                             tol / (2.0 * scale), policy);
    Ball v = out.values[0];
    Bits bits = v.prec();
    Ball tt = Ball::exact(t, bits);
    v = v * Ball::pi(bits) * static_cast<long>(d) * num::pow(num::inverse(tt), k + l);
    if (l % 2) v = -v;
    return CBall(v);
  }
  // 2 pi s K(2p + d(k+l) + 1, |k-l|, 2t), s = (-1)^{k-l} for k > l and 1 otherwise.
  long a = 2L * p + static_cast<long>(d) * (k + l) + 1;
  long m = std::abs(k - l);
  num::QuadratureResult q = fp::radial_bessel_integral(a, m, d, 2.0 * t, tol / (2.0 * M_PI) / 1.01);
  if (!q.converged) throw num::NonConvergence("moment_entry: quadrature did not converge", q.mid(), q.err(), 0);
  Ball v = q.value * Ball::pi(q.value.prec()) * 2L;
  if (k > l && (k - l) % 2) v = -v;
  return CBall(v);
}

struct MomentMatrix {
  int d = 3;
  int p = 0;
  double t = 0.0;
  std::size_t N = 0;
  CBallMatrix entries;
  /// max |conj(M_kl) - M_lk| / max|M| for M_kl = (-1)^l I_kl.
  double twisted_hermitian_residual = 0.0;
  double tol_rel = 0.0;
};

/// Scale of entry (k, l): sqrt(I_kk(0) I_ll(0)).
inline double moment_scale(int d, int p, int k, int l) {
  return M_PI * std::exp(0.5 * (std::lgamma(p + d * k + 1.0) + std::lgamma(p + d * l + 1.0)));
}

inline MomentMatrix moment_matrix(int d, int p, std::size_t N, double t, double tol_rel = 1e-30,
                                  fp::Route route = fp::Route::Auto, const num::PrecisionPolicy& policy = {}) {
  if (N == 0) throw std::invalid_argument("moment_matrix: N must be >= 1");
  MomentMatrix mm;
  mm.d = d;
  mm.p = p;
  mm.t = t;
  mm.N = N;
  mm.tol_rel = tol_rel;
  std::vector<CBall> vals;
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t l = 0; l < N; ++l) {
      int ki = static_cast<int>(k), li = static_cast<int>(l);
      vals.push_back(moment_entry(d, p, ki, li, t, tol_rel * moment_scale(d, p, ki, li), route, policy));
    }
  mm.entries = CBallMatrix(N, N, vals.front());
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t l = 0; l < N; ++l) mm.entries(k, l) = vals[k * N + l];
  double norm = 0.0, res = 0.0;
  auto twisted = [&](std::size_t k, std::size_t l) { return l % 2 ? -mm.entries(k, l) : mm.entries(k, l); };
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t l = 0; l < N; ++l) {
      norm = std::max(norm, std::abs(mm.entries(k, l).mid_double()));
      res = std::max(res, std::abs((twisted(k, l).conj() - twisted(l, k)).mid_double()));
    }
  mm.twisted_hermitian_residual = norm > 0 ? res / norm : 0.0;
  return mm;
}

/// Both determinant families for the leading blocks, m = 1..N.
struct MinorReport {
  std::vector<PositivityVerdict> det_I;
  std::vector<PositivityVerdict> det_twisted;  // det((-1)^l I_{k,l})
};

inline PositivityVerdict complex_verdict(const CBall& v, const std::string& ctx) {
  PositivityVerdict out;
  out.value = v.real();
  out.sign = num::certified_sign(v);
  out.context = ctx;
  out.digits = num::digits_for_bits(v.prec());
  return out;
}

inline MinorReport leading_minors(const MomentMatrix& M) {
  MinorReport rep;
  CBallMatrix tw = M.entries;
  for (std::size_t k = 0; k < M.N; ++k)
    for (std::size_t l = 1; l < M.N; l += 2) tw(k, l) = -M.entries(k, l);
  auto a = num::leading_minor_dets(M.entries);
  auto b = num::leading_minor_dets(tw);
  for (std::size_t m = 0; m < a.size(); ++m) {
    rep.det_I.push_back(complex_verdict(a[m], "det I, m=" + std::to_string(m + 1)));
    rep.det_twisted.push_back(complex_verdict(b[m], "det (-1)^l I, m=" + std::to_string(m + 1)));
  }
  return rep;
}

/// Builds the moment matrix at decreasing tolerances until every leading
/// minor of I has a certified sign or the precision cap is reached.
inline std::pair<MomentMatrix, MinorReport> certified_moment_minors(int d, int p, std::size_t N, double t,
                                                                    double tol_rel = 1e-30,
                                                                    const num::PrecisionPolicy& policy = {}) {
  double floor_tol = std::pow(10.0, -policy.cap_digits);
  for (double tr = tol_rel;; tr *= 1e-20) {
    if (tr < floor_tol) tr = floor_tol;
    MomentMatrix M = moment_matrix(d, p, N, t, tr, fp::Route::Auto, policy);
    MinorReport rep = leading_minors(M);
    bool undecided = std::any_of(rep.det_I.begin(), rep.det_I.end(),
                                 [](const PositivityVerdict& v) { return v.sign == Sign::Indeterminate; });
    if (!undecided || tr <= floor_tol) {
      if (undecided)
        for (auto& v : rep.det_I) v.cap_reached = v.sign == Sign::Indeterminate;
      return {std::move(M), std::move(rep)};
    }
  }
}

struct BiorthogonalSystem {
  CBallMatrix p_coeffs;  // row k: coefficients of p_k in z^{p+dj}
  CBallMatrix q_coeffs;
  std::vector<CBall> h;
  std::vector<bool> h_real;
  /// Certified bound on max |(p_k, q_l) - delta_kl h_k| against the
  /// midpoint matrix, i.e. the error of the factorization itself.
  double residual = 0.0;
  /// max |h_k - minor_k / minor_{k-1}|, relative to |h_k|.
  double minor_ratio_discrepancy = 0.0;
};

namespace detail {

inline CBall exact_mid(const CBall& b) { return CBall(b.re(), b.im(), Mag()); }

inline double bound(const CBall& b) { return b.mag().to_double(); }

}  // namespace detail

/// Triangular factorization I = L D U without pivoting (pivoting would break
/// the degree filtration). p = L^{-1}, q = (U^{-1})^H, h = diag(D).
inline BiorthogonalSystem biorthogonalize(const MomentMatrix& M) {
  const std::size_t n = M.N;
  const CBallMatrix& A = M.entries;
  CBall zero(A(0, 0).prec());
  CBall one = CBall::exact(1.0, 0.0, A(0, 0).prec());
  CBallMatrix L(n, n, zero), U(n, n, zero);
  std::vector<CBall> D(n, zero);
  for (std::size_t k = 0; k < n; ++k) {
    CBall s = A(k, k);
    for (std::size_t j = 0; j < k; ++j) s = s - L(k, j) * D[j] * U(j, k);
    if (s.contains_zero())
      throw DegenerateFiltration("biorthogonalize: pivot " + std::to_string(k) + " is not certified nonzero",
                                 static_cast<int>(k));
    D[k] = s;
    L(k, k) = one;
    U(k, k) = one;
    CBall inv = num::inverse(s);
    for (std::size_t i = k + 1; i < n; ++i) {
      CBall a = A(i, k), b = A(k, i);
      for (std::size_t j = 0; j < k; ++j) {
        a = a - L(i, j) * D[j] * U(j, k);
        b = b - L(k, j) * D[j] * U(j, i);
      }
      L(i, k) = a * inv;
      U(k, i) = b * inv;
    }
  }
  // Unit-triangular inverses.
  CBallMatrix P(n, n, zero), Qs(n, n, zero);
  for (std::size_t i = 0; i < n; ++i) {
    P(i, i) = one;
    for (std::size_t j = i; j-- > 0;) {
      CBall s = zero;
      for (std::size_t m = j + 1; m <= i; ++m) s = s - P(i, m) * L(m, j);
      P(i, j) = s;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    Qs(j, j) = one;
    for (std::size_t i = j; i-- > 0;) {
      CBall s = zero;
      for (std::size_t m = i + 1; m <= j; ++m) s = s - U(i, m) * Qs(m, j);
      Qs(i, j) = s;
    }
  }
  BiorthogonalSystem sys;
  sys.p_coeffs = P;
  sys.q_coeffs = CBallMatrix(n, n, zero);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sys.q_coeffs(i, j) = Qs(j, i).conj();
  sys.h = D;
  for (const CBall& h : D) {
    double im = std::fabs(h.im().to_double());
    double tolr = std::max(h.rad_double(), 1e-18 * std::abs(h.mid_double()));
    sys.h_real.push_back(im <= tolr);
  }
  // Residual of P A Q^H - D on midpoints.
  double res = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) {
      CBall s = zero;
      for (std::size_t i = 0; i <= k; ++i)
        for (std::size_t j = 0; j <= l; ++j)
          s = s + detail::exact_mid(P(k, i)) * detail::exact_mid(A(i, j)) * detail::exact_mid(Qs(j, l));
      if (k == l) s = s - detail::exact_mid(D[k]);
      res = std::max(res, detail::bound(s));
    }
  sys.residual = res;
  auto minors = num::leading_minor_dets(A);
  for (std::size_t k = 0; k < n; ++k) {
    CBall ratio = k == 0 ? minors[0] : minors[k] / minors[k - 1];
    double rel = std::abs(ratio.mid_double() - D[k].mid_double()) / std::abs(D[k].mid_double());
    sys.minor_ratio_discrepancy = std::max(sys.minor_ratio_discrepancy, rel);
  }
  return sys;
}

struct GramBlock {
  int residue = 0;
  MomentMatrix matrix;
  MinorReport minors;
  BiorthogonalSystem system;
  bool norms_positive = false;
};

struct FullGramReport {
  int d = 3;
  int N_deg = 0;
  double t = 0.0;
  std::vector<GramBlock> blocks;
  std::vector<PositivityVerdict> degree_minors;  // leading minors of the full Gram matrix
  /// max |degree minor - product of block minors| / |degree minor|.
  double block_product_discrepancy = 0.0;
  /// Largest off-residue entry (exactly zero by construction).
  double off_residue_max = 0.0;
  bool nondegenerate = false;
  bool norms_positive = false;
  double max_residual = 0.0;
};

/// Gram matrix of z^a, a = 0..N_deg. Entries with a != b (mod d) vanish by
/// the Z/d symmetry, so the matrix splits into the residue-class blocks.
inline FullGramReport full_gram(int d, int N_deg, double t, double tol_rel = 1e-30,
                                const num::PrecisionPolicy& policy = {}) {
  if (N_deg < 0) throw std::invalid_argument("full_gram: N_deg must be >= 0");
  FullGramReport rep;
  rep.d = d;
  rep.N_deg = N_deg;
  rep.t = t;
  rep.nondegenerate = true;
  rep.norms_positive = true;
  for (int p = 0; p < d && p <= N_deg; ++p) {
    std::size_t n = static_cast<std::size_t>((N_deg - p) / d + 1);
    GramBlock blk;
    blk.residue = p;
    auto [M, minors] = certified_moment_minors(d, p, n, t, tol_rel, policy);
    blk.matrix = std::move(M);
    blk.minors = std::move(minors);
    try {
      blk.system = biorthogonalize(blk.matrix);
      blk.norms_positive = true;
      for (std::size_t k = 0; k < n; ++k)
        if (!(blk.system.h_real[k] && blk.system.h[k].real().sign() == Sign::Positive)) blk.norms_positive = false;
      rep.max_residual = std::max(rep.max_residual, blk.system.residual);
    } catch (const DegenerateFiltration&) {
      blk.norms_positive = false;
    }
    rep.norms_positive = rep.norms_positive && blk.norms_positive;
    rep.blocks.push_back(std::move(blk));
  }
  const std::size_t n = static_cast<std::size_t>(N_deg + 1);
  Bits bits = rep.blocks.front().matrix.entries(0, 0).prec();
  CBallMatrix G(n, n, CBall(bits));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a % d != b % d) continue;
      const auto& blk = rep.blocks[a % d];
      G(a, b) = blk.matrix.entries(a / d, b / d);
    }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a % d != b % d) rep.off_residue_max = std::max(rep.off_residue_max, detail::bound(G(a, b)));
  auto full = num::leading_minor_dets(G);
  for (std::size_t m = 1; m <= n; ++m) {
    CBall prod = CBall::exact(1.0, 0.0, bits);
    for (const auto& blk : rep.blocks) {
      std::size_t cnt = 0;
      for (std::size_t a = 0; a < m; ++a)
        if (static_cast<int>(a % d) == blk.residue) ++cnt;
      if (cnt == 0) continue;
      prod = prod * num::certified_det(blk.matrix.entries.leading(cnt));
    }
    const CBall& f = full[m - 1];
    PositivityVerdict v = complex_verdict(f, "degree minor m=" + std::to_string(m));
    if (v.sign == Sign::Indeterminate) rep.nondegenerate = false;
    rep.degree_minors.push_back(v);
    double rel = std::abs(f.mid_double() - prod.mid_double()) / std::abs(f.mid_double());
    rep.block_product_discrepancy = std::max(rep.block_product_discrepancy, rel);
  }
  return rep;
}

/// Direct two-dimensional quadrature of I_{k,l,p}(t) for complex t, in
/// double precision: GL20 panels in r (no wider than a quarter oscillation)
/// and the trapezoid rule in theta.
inline std::complex<double> moment_direct_2d(int d, int p, int k, int l, std::complex<double> t, double tol = 1e-12) {
  long a = 2L * p + static_cast<long>(d) * (k + l) + 1;
  double R = fp::detail::gaussian_cutoff(a, tol * 1e-2);
  double at = std::abs(t);
  const auto& rule = num::gauss_legendre_double(20);
  std::complex<double> total = 0.0;
  double r0 = 0.0;
  const std::complex<double> I(0.0, 1.0);
  while (r0 < R) {
    double h = 0.25;
    if (at > 0) h = std::min(h, M_PI / (4.0 * at * d * std::pow(r0 + h, d - 1)));
    double r1 = std::min(R, r0 + h);
    double half = (r1 - r0) / 2, mid = (r1 + r0) / 2;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      double r = mid + half * rule.nodes[i];
      double x = 2.0 * at * std::pow(r, d);
      long nth = static_cast<long>(std::ceil(1.5 * (x + std::abs(k - l)) * d + 48));
      std::complex<double> ang = 0.0;
      for (long j = 0; j < nth; ++j) {
        double th = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(nth);
        std::complex<double> zd = std::polar(std::pow(r, d), d * th);
        std::complex<double> w = t * zd;
        ang += std::exp(I * (static_cast<double>(d) * (k - l) * th + 2.0 * w.imag()));
      }
      ang *= 2.0 * M_PI / static_cast<double>(nth);
      total += rule.weights[i] * half * std::pow(r, static_cast<double>(a)) * std::exp(-r * r) * ang;
    }
    r0 = r1;
  }
  return total;
}

/// Leading minors of I(t) for t = |t| e^{i psi} by direct quadrature next to
/// those of the normal form I(|t|). The rotation z -> e^{-i psi/d} z gives
/// I(t)_{kl} = e^{-i psi (k-l)} I(|t|)_{kl}, a diagonal similarity, so the
/// minors agree.
struct PhaseCheck {
  std::vector<std::complex<double>> direct_minors;
  std::vector<std::complex<double>> normal_minors;
  double max_rel_diff = 0.0;
};

inline PhaseCheck phase_normal_form_check(int d, int p, std::size_t N, double abs_t, double psi) {
  PhaseCheck pc;
  std::complex<double> t = std::polar(abs_t, psi);
  std::vector<std::vector<std::complex<double>>> A(N, std::vector<std::complex<double>>(N));
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t l = 0; l < N; ++l)
      A[k][l] = moment_direct_2d(d, p, static_cast<int>(k), static_cast<int>(l), t);
  MomentMatrix M = moment_matrix(d, p, N, abs_t, 1e-25);
  auto minors = num::leading_minor_dets(M.entries);
  for (std::size_t m = 1; m <= N; ++m) {
    // Small complex determinant by elimination in double.
    std::vector<std::vector<std::complex<double>>> B(m, std::vector<std::complex<double>>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) B[i][j] = A[i][j];
    std::complex<double> det = 1.0;
    for (std::size_t c = 0; c < m; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < m; ++r)
        if (std::abs(B[r][c]) > std::abs(B[piv][c])) piv = r;
      if (piv != c) {
        std::swap(B[piv], B[c]);
        det = -det;
      }
      det *= B[c][c];
      for (std::size_t r = c + 1; r < m; ++r) {
        std::complex<double> f = B[r][c] / B[c][c];
        for (std::size_t j = c; j < m; ++j) B[r][j] -= f * B[c][j];
      }
    }
    pc.direct_minors.push_back(det);
    pc.normal_minors.push_back(minors[m - 1].mid_double());
    pc.max_rel_diff = std::max(pc.max_rel_diff, std::abs(det - pc.normal_minors.back()) / std::abs(det));
  }
  return pc;
}

}  // namespace lgpos::biorth
