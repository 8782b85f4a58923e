#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>

#include "lgpos/biorth/moments.hpp"
#include "oracles.hpp"

using namespace lgpos;
using namespace lgpos::biorth;
using num::Ball;
using num::CBall;
using num::Sign;
using oracle::hp;
using oracle::hp100;
using oracle::mellin_series;

namespace {

// 2 pi s int_0^R r^a e^{-r^2} J_m(2 t r^d) dr in double, with Boost's Bessel
// function; s is the angular phase i^{l-k} folded to +-1 for the real result.
double radial_moment_oracle(int d, int p, int k, int l, double t) {
  long a = 2L * p + static_cast<long>(d) * (k + l) + 1;
  int m = std::abs(k - l);
  auto f = [=](double r) {
    return std::pow(r, static_cast<double>(a)) * std::exp(-r * r) *
           boost::math::cyl_bessel_j(m, 2 * t * std::pow(r, d));
  };
  double err = 0;
  double R = std::sqrt(a / 2.0) + 9.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, R, 12, 1e-14, &err);
  double s = (k > l && (k - l) % 2) ? -1.0 : 1.0;
  return 2 * M_PI * s * v;
}

double fact(int n) { return std::tgamma(n + 1.0); }

}  // namespace

// Entries ---------------------------------------------------------------------

TEST(MomentEntry, GaussianAnchors) {
  CBall a = moment_entry(3, 0, 0, 0, 0.0, 1e-30);
  EXPECT_TRUE(oracle::encloses(a.real(), oracle::pi()));
  CBall b = moment_entry(3, 1, 1, 1, 0.0, 1e-30);
  EXPECT_TRUE(oracle::encloses(b.real(), 24 * oracle::pi()));
  CBall off = moment_entry(3, 1, 0, 2, 0.0, 1e-30);
  EXPECT_EQ(std::abs(off.mid_double()), 0.0);
}

TEST(MomentEntry, ZeroDiagonalIsPiFactorial) {
  for (int d : {3, 4})
    for (int p = 0; p < d; ++p)
      for (int k = 0; k < 3; ++k) {
        CBall v = moment_entry(d, p, k, k, 0.0, 1e-20);
        EXPECT_NEAR(v.real().mid_double(), M_PI * fact(p + d * k), 1e-12 * M_PI * fact(p + d * k));
      }
}

TEST(MomentEntry, OriginEntryIsScaledFp) {
  // (1 / (pi d)) I_00 = F_p, against the Mellin-expansion oracle.
  for (double t : {0.3, 1.0, 4.0})
    for (int p = 0; p <= 2; ++p) {
      CBall v = moment_entry(3, p, 0, 0, t, 1e-28);
      Ball f = v.real() / Ball::pi(v.prec()) / 3L;
      EXPECT_TRUE(oracle::encloses100(f, mellin_series(3, p, t))) << p << " " << t;
      EXPECT_LT(v.rad_double(), 1e-27);
    }
}

TEST(MomentEntry, MatchesBesselOracle) {
  for (double t : {0.2, 0.5, 1.5})
    for (auto [k, l] : {std::pair{1, 0}, {0, 1}, {2, 1}, {0, 2}, {2, 2}}) {
      CBall v = moment_entry(3, 1, k, l, t, 1e-20);
      double ref = radial_moment_oracle(3, 1, k, l, t);
      EXPECT_NEAR(v.real().mid_double(), ref, 1e-11 * std::max(1.0, std::fabs(ref))) << k << l << " " << t;
      EXPECT_EQ(v.im().to_double(), 0.0);
    }
}

TEST(MomentEntry, SeriesAndQuadratureAgree) {
  for (double t : {0.6, 1.0, 3.0})
    for (auto [k, l] : {std::pair{0, 0}, {1, 0}, {1, 2}, {3, 1}}) {
      double tol = 1e-22 * moment_scale(3, 2, k, l);
      CBall s = moment_entry(3, 2, k, l, t, tol, fp::Route::Series);
      CBall q = moment_entry(3, 2, k, l, t, tol, fp::Route::Quadrature);
      EXPECT_TRUE((s - q).contains_zero()) << k << l << " " << t;
    }
}

TEST(MomentEntry, FirstOffDiagonalIsTDerivative) {
  // I_{1,0,p}(t) = pi d dF_p/dt (Wirtinger), i.e. (pi d / 2) F_p'(t) for real t.
  const double t = 1.0, h = 1e-5;
  for (int p = 0; p <= 2; ++p) {
    double fp_ = fp::fp_series(fp::FpParams{3, p}, t + h, 1e-28).value.mid_double();
    double fm = fp::fp_series(fp::FpParams{3, p}, t - h, 1e-28).value.mid_double();
    double deriv = (fp_ - fm) / (2 * h);
    CBall v = moment_entry(3, p, 1, 0, t, 1e-25);
    EXPECT_NEAR(v.real().mid_double(), M_PI * 3 / 2 * deriv, 1e-8 * std::fabs(M_PI * 3 / 2 * deriv)) << p;
  }
}

TEST(MomentEntry, DirectTwoDimensionalQuadrature) {
  CBall v = moment_entry(3, 0, 1, 0, 0.5, 1e-25);
  std::complex<double> direct = moment_direct_2d(3, 0, 1, 0, 0.5);
  EXPECT_NEAR(v.real().mid_double(), direct.real(), 1e-9);
  EXPECT_NEAR(direct.imag(), 0.0, 1e-9);
  EXPECT_NEAR(v.real().mid_double(), -0.776568, 5e-7);
  for (auto [k, l] : {std::pair{0, 0}, {0, 1}, {2, 1}}) {
    CBall e = moment_entry(3, 1, k, l, 0.8, 1e-25);
    std::complex<double> dd = moment_direct_2d(3, 1, k, l, 0.8);
    EXPECT_NEAR(e.real().mid_double(), dd.real(), 1e-9 * std::max(1.0, std::abs(dd))) << k << l;
  }
}

TEST(MomentEntry, RejectsBadInput) {
  EXPECT_THROW(moment_entry(3, 0, -1, 0, 1.0, 1e-20), std::invalid_argument);
  EXPECT_THROW(moment_entry(3, 0, 0, 0, -1.0, 1e-20), std::domain_error);
  EXPECT_THROW(moment_entry(3, 3, 0, 0, 1.0, 1e-20), std::invalid_argument);
}

// Matrices and minors -----------------------------------------------------------

TEST(MomentMatrix, DiagonalAtZero) {
  MomentMatrix M = moment_matrix(3, 1, 4, 0.0);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t l = 0; l < 4; ++l) {
      double want = k == l ? M_PI * fact(1 + 3 * static_cast<int>(k)) : 0.0;
      EXPECT_NEAR(M.entries(k, l).real().mid_double(), want, 1e-12 * std::max(1.0, want));
    }
  EXPECT_EQ(M.twisted_hermitian_residual, 0.0);
  EXPECT_THROW(moment_matrix(3, 0, 0, 1.0), std::invalid_argument);
}

TEST(MomentMatrix, TwistedHermitian) {
  for (double t : {0.3, 1.0, 5.0})
    for (int p = 0; p <= 2; ++p) {
      MomentMatrix M = moment_matrix(3, p, 4, t, 1e-28);
      EXPECT_LE(M.twisted_hermitian_residual, 1e-18) << p << " " << t;
    }
}

TEST(LeadingMinors, ExactAtZero) {
  MomentMatrix M = moment_matrix(4, 2, 4, 0.0);
  MinorReport r = leading_minors(M);
  hp prod = 1;
  for (int m = 0; m < 4; ++m) {
    prod *= oracle::pi() * boost::math::tgamma(hp(2 + 4 * m + 1));
    EXPECT_EQ(r.det_I[m].sign, Sign::Positive);
    EXPECT_TRUE(oracle::encloses(r.det_I[m].value, prod)) << m;
  }
}

TEST(LeadingMinors, PositiveAtT1) {
  auto [M, r] = certified_moment_minors(3, 0, 4, 1.0);
  for (const auto& v : r.det_I) EXPECT_EQ(v.sign, Sign::Positive) << v.context;
}

TEST(LeadingMinors, PositiveAtT10AndStableUnderDoubling) {
  auto [M, r] = certified_moment_minors(3, 2, 4, 10.0, 1e-30);
  auto [M2, r2] = certified_moment_minors(3, 2, 4, 10.0, 1e-60);
  for (std::size_t m = 0; m < 4; ++m) {
    EXPECT_EQ(r.det_I[m].sign, Sign::Positive) << m;
    EXPECT_TRUE((r.det_I[m].value - r2.det_I[m].value).contains_zero()) << m;
  }
}

TEST(LeadingMinors, SignConventionAudit) {
  // At t = 0: det I > 0 always, det((-1)^l I) < 0 exactly for N = 2, 3 mod 4.
  MomentMatrix M = moment_matrix(3, 1, 8, 0.0);
  MinorReport r = leading_minors(M);
  for (int N = 1; N <= 8; ++N) {
    EXPECT_EQ(r.det_I[N - 1].sign, Sign::Positive);
    Sign want = (N % 4 == 2 || N % 4 == 3) ? Sign::Negative : Sign::Positive;
    EXPECT_EQ(r.det_twisted[N - 1].sign, want) << N;
  }
  // The twisted determinant is (-1)^{floor(N/2)} det I for any t.
  MinorReport r1 = leading_minors(moment_matrix(3, 1, 5, 1.0, 1e-28));
  for (int N = 1; N <= 5; ++N) {
    Ball want = (N / 2) % 2 ? -r1.det_I[N - 1].value : r1.det_I[N - 1].value;
    EXPECT_TRUE((r1.det_twisted[N - 1].value - want).contains_zero()) << N;
  }
}

TEST(LeadingMinors, MatchesHankelDeterminantSign) {
  for (double u : {-1.0, 0.0, 2.0}) {
    double t = std::exp(u / 2);
    MinorReport r = leading_minors(moment_matrix(3, 0, 3, t, 1e-28));
    fp::FpKernel k({3, 0});
    auto der = fp::fp_u_derivatives(k, u, 4, 1e-30);
    for (int N = 1; N <= 3; ++N)
      EXPECT_EQ(r.det_I[N - 1].sign, positivity::wronskian_delta(der, N).sign) << u << " " << N;
  }
}

// Biorthogonalization -----------------------------------------------------------------

TEST(Biorthogonalize, IdentityAtZero) {
  MomentMatrix M = moment_matrix(3, 2, 4, 0.0);
  BiorthogonalSystem s = biorthogonalize(M);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      double want = i == j ? 1.0 : 0.0;
      EXPECT_EQ(s.p_coeffs(i, j).real().mid_double(), want);
      EXPECT_EQ(s.q_coeffs(i, j).real().mid_double(), want);
    }
    EXPECT_NEAR(s.h[i].real().mid_double(), M_PI * fact(2 + 3 * static_cast<int>(i)),
                1e-12 * M_PI * fact(2 + 3 * static_cast<int>(i)));
  }
}

TEST(Biorthogonalize, NormsPositiveAtT1) {
  MomentMatrix M = moment_matrix(3, 0, 4, 1.0, 1e-30);
  BiorthogonalSystem s = biorthogonalize(M);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_TRUE(s.h_real[k]);
    EXPECT_EQ(s.h[k].real().sign(), Sign::Positive);
    EXPECT_EQ(s.p_coeffs(k, k).real().mid_double(), 1.0);
    EXPECT_EQ(s.q_coeffs(k, k).real().mid_double(), 1.0);
    for (std::size_t j = k + 1; j < 4; ++j) EXPECT_EQ(std::abs(s.p_coeffs(k, j).mid_double()), 0.0);
  }
  EXPECT_LE(s.residual, 1e-20);
  EXPECT_LE(s.minor_ratio_discrepancy, 1e-20);
}

TEST(Biorthogonalize, PairingIsDiagonal) {
  // Independent double-precision check of sum_ij p_ki I_ij conj(q_lj) = delta_kl h_k.
  MomentMatrix M = moment_matrix(3, 1, 4, 2.0, 1e-30);
  BiorthogonalSystem s = biorthogonalize(M);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t l = 0; l < 4; ++l) {
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
          acc += s.p_coeffs(k, i).mid_double() * M.entries(i, j).mid_double() *
                 std::conj(s.q_coeffs(l, j).mid_double());
      std::complex<double> want = k == l ? s.h[k].mid_double() : 0.0;
      double scale = moment_scale(3, 1, static_cast<int>(k), static_cast<int>(l));
      EXPECT_LE(std::abs(acc - want), 1e-12 * scale) << k << " " << l;
    }
}

TEST(Biorthogonalize, NormsAreMinorRatios) {
  MomentMatrix M = moment_matrix(4, 3, 5, 0.7, 1e-30);
  BiorthogonalSystem s = biorthogonalize(M);
  MinorReport r = leading_minors(M);
  for (std::size_t k = 0; k < 5; ++k) {
    Ball ratio = k == 0 ? r.det_I[0].value : r.det_I[k].value / r.det_I[k - 1].value;
    EXPECT_TRUE((ratio - s.h[k].real()).contains_zero()) << k;
  }
}

TEST(Biorthogonalize, DegenerateFiltration) {
  MomentMatrix M = moment_matrix(3, 0, 2, 0.0);
  M.entries(1, 1) = CBall(M.entries(1, 1).prec());
  try {
    biorthogonalize(M);
    FAIL() << "expected DegenerateFiltration";
  } catch (const DegenerateFiltration& e) {
    EXPECT_EQ(e.index(), 1);
  }
}

// Full Gram matrix ----------------------------------------------------------------

TEST(FullGram, NondegenerateAcrossT) {
  for (double t : {0.1, 1.0, 10.0}) {
    FullGramReport r = full_gram(3, 7, t);
    EXPECT_TRUE(r.nondegenerate) << t;
    EXPECT_TRUE(r.norms_positive) << t;
    EXPECT_EQ(r.blocks.size(), 3u);
    EXPECT_EQ(r.degree_minors.size(), 8u);
    for (const auto& v : r.degree_minors) EXPECT_EQ(v.sign, Sign::Positive) << v.context;
    EXPECT_EQ(r.off_residue_max, 0.0);
    EXPECT_LE(r.block_product_discrepancy, 1e-20);
    EXPECT_LE(r.max_residual, 1e-20);
  }
}

TEST(FullGram, BlockSizes) {
  FullGramReport r = full_gram(4, 5, 1.0);
  ASSERT_EQ(r.blocks.size(), 4u);
  EXPECT_EQ(r.blocks[0].matrix.N, 2u);  // degrees 0, 4
  EXPECT_EQ(r.blocks[1].matrix.N, 2u);  // 1, 5
  EXPECT_EQ(r.blocks[2].matrix.N, 1u);
  EXPECT_EQ(r.blocks[3].matrix.N, 1u);
  FullGramReport small = full_gram(3, 1, 1.0);
  EXPECT_EQ(small.blocks.size(), 2u);
  EXPECT_THROW(full_gram(3, -1, 1.0), std::invalid_argument);
}

// Phase normal form ------------------------------------------------------------------

TEST(PhaseNormalForm, MinorsIndependentOfPhase) {
  PhaseCheck pc = phase_normal_form_check(3, 0, 2, 1.0, 0.7);
  ASSERT_EQ(pc.direct_minors.size(), 2u);
  EXPECT_LE(pc.max_rel_diff, 1e-8);
  for (const auto& m : pc.direct_minors) EXPECT_GT(m.real(), 0.0);
}

TEST(PhaseNormalForm, EntriesPickUpDiagonalPhase) {
  // I(|t| e^{i psi})_{kl} = e^{-i psi (k - l)} I(|t|)_{kl}.
  const double psi = 0.7;
  std::complex<double> rot = moment_direct_2d(3, 0, 1, 0, std::polar(1.0, psi));
  CBall base = moment_entry(3, 0, 1, 0, 1.0, 1e-25);
  std::complex<double> want = std::polar(1.0, -psi) * base.mid_double();
  EXPECT_LE(std::abs(rot - want), 1e-9);
}
