#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <set>

#include "lgpos/numerics/bessel.hpp"
#include "lgpos/numerics/gamma.hpp"
#include "lgpos/numerics/linalg.hpp"
#include "lgpos/numerics/quadrature.hpp"
#include "lgpos/numerics/rng.hpp"
#include "oracles.hpp"

using namespace lgpos::num;
using oracle::hp;

namespace {

const Bits kBits = bits_for_digits(40);

Ball exact(double x) { return Ball::exact(x, kBits); }

}  // namespace

// Gamma -------------------------------------------------------------------

TEST(LnGamma, AtOneIsZero) {
  Ball v = ln_gamma(exact(1.0));
  EXPECT_TRUE(v.contains(Mpfr(0L, kBits)));
  EXPECT_LT(v.rad_double(), 1e-35);
}

TEST(LnGamma, AtHalfIsLogSqrtPi) {
  Ball v = ln_gamma(Ball::rational(1, 2, kBits));
  hp ref = boost::multiprecision::log(boost::multiprecision::sqrt(oracle::pi()));
  EXPECT_TRUE(oracle::encloses(v, ref));
  EXPECT_NEAR(v.mid_double(), 0.5723649429247001, 1e-15);
}

TEST(LnGamma, AtFiveIsLog24) {
  Ball v = ln_gamma(exact(5.0));
  EXPECT_TRUE(oracle::encloses(v, boost::multiprecision::log(hp(24))));
}

TEST(LnGamma, EnclosesMpfrReferenceOnPositiveAxis) {
  SeededRng rng(2024);
  for (int i = 0; i < 200; ++i) {
    double x = std::exp(rng.uniform(std::log(1e-3), std::log(400.0)));
    Ball v = ln_gamma(exact(x));
    ASSERT_TRUE(oracle::encloses(v, oracle::mpfr_lngamma(x))) << "x=" << x;
  }
}

TEST(LnGamma, MatchesBoostAtFiftyDigits) {
  for (double x : {0.125, 0.75, 2.5, 7.25, 33.0, 101.5}) {
    Ball v = ln_gamma(exact(x));
    EXPECT_TRUE(oracle::encloses(v, boost::math::lgamma(hp(x)))) << x;
  }
}

TEST(LnGamma, NegativeNonIntegerGivesSign) {
  int sign = 0;
  Ball v = ln_gamma(exact(-2.5), &sign);
  // Gamma(-2.5) = -8 sqrt(pi) / 15
  EXPECT_EQ(sign, -1);
  hp ref = boost::multiprecision::log(8 * boost::multiprecision::sqrt(oracle::pi()) / 15);
  EXPECT_TRUE(oracle::encloses(v, ref));
}

TEST(LnGamma, PoleThrows) {
  EXPECT_THROW(ln_gamma(exact(0.0)), PoleError);
  EXPECT_THROW(ln_gamma(exact(-3.0)), PoleError);
}

TEST(LnGamma, ComplexRecurrence) {
  // Gamma(z + 1) = z Gamma(z) on random complex points.
  SeededRng rng(7);
  for (int i = 0; i < 60; ++i) {
    double re = rng.uniform(0.05, 20.0), im = rng.uniform(-30.0, 30.0);
    CBall z = CBall::exact(re, im, kBits);
    CBall lhs = exp(ln_gamma(z + CBall::exact(1.0, 0.0, kBits)));
    CBall rhs = z * exp(ln_gamma(z));
    ASSERT_TRUE((lhs - rhs).contains_zero()) << re << "+" << im << "i";
  }
}

TEST(LnGamma, ComplexReflection) {
  // Gamma(z) Gamma(1 - z) = pi / sin(pi z), checked through |.|^2 on the line Re z = 1/2:
  // |Gamma(1/2 + iy)|^2 = pi / cosh(pi y).
  for (double y : {0.1, 0.7, 1.5, 3.0, 8.0}) {
    CBall g = exp(ln_gamma(CBall::exact(0.5, y, kBits)));
    Ball mod2 = g.real() * g.real() + g.imag() * g.imag();
    hp ref = oracle::pi() / boost::multiprecision::cosh(oracle::pi() * y);
    EXPECT_TRUE(oracle::encloses(mod2, ref)) << y;
  }
}

TEST(LnGamma, ComplexModulusOnImaginaryShift) {
  // |Gamma(1 + iy)|^2 = pi y / sinh(pi y).
  for (double y : {0.25, 1.0, 2.0, 5.0}) {
    CBall g = exp(ln_gamma(CBall::exact(1.0, y, kBits)));
    Ball mod2 = g.real() * g.real() + g.imag() * g.imag();
    hp ref = oracle::pi() * y / boost::multiprecision::sinh(oracle::pi() * y);
    EXPECT_TRUE(oracle::encloses(mod2, ref)) << y;
  }
}

TEST(LnGamma, RealReflectionIdentity) {
  SeededRng rng(99);
  for (int i = 0; i < 50; ++i) {
    double x = rng.uniform(0.01, 0.99);
    Ball g1 = gamma(exact(x));
    Ball g2 = gamma(Ball::exact(1L, kBits) - exact(x));
    hp ref = oracle::pi() / boost::multiprecision::sin(oracle::pi() * hp(x));
    ASSERT_TRUE(oracle::encloses(g1 * g2, ref)) << x;
  }
}

TEST(LnGamma, ErrorShrinksWithPrecision) {
  Ball lo = ln_gamma(Ball::exact(3.3, bits_for_digits(30)));
  Ball hi = ln_gamma(Ball::exact(3.3, bits_for_digits(300)));
  EXPECT_LT(hi.rad_double(), 1e-290);
  EXPECT_LT(lo.rad_double(), 1e-25);
  EXPECT_TRUE(oracle::encloses(hi, oracle::mpfr_lngamma(3.3)));
}

TEST(RecipGamma, Poles) {
  EXPECT_TRUE(recip_gamma(exact(0.0)).is_exact_zero());
  EXPECT_TRUE(recip_gamma(exact(-3.0)).is_exact_zero());
}

TEST(RecipGamma, AtHalf) {
  Ball v = recip_gamma(Ball::rational(1, 2, kBits));
  EXPECT_TRUE(oracle::encloses(v, 1 / boost::multiprecision::sqrt(oracle::pi())));
}

TEST(RecipGamma, NegativeArguments) {
  for (double x : {-0.5, -1.25, -4.75}) {
    Ball v = recip_gamma(exact(x));
    EXPECT_TRUE(oracle::encloses(v, 1 / boost::math::tgamma(hp(x)))) << x;
  }
}

// Bessel ------------------------------------------------------------------

TEST(BesselJ, AtZero) {
  EXPECT_TRUE(bessel_j(0, exact(0.0)).contains(Mpfr(1L, kBits)));
  EXPECT_TRUE(bessel_j(1, exact(0.0)).contains(Mpfr(0L, kBits)));
}

TEST(BesselJ, FirstZeroOfJ0) {
  Ball v = bessel_j(0, 2.4048255576957728, 40);
  EXPECT_LT(std::fabs(v.mid_double()), 1e-9);
  EXPECT_TRUE(oracle::encloses(v, oracle::bessel_series(0, hp(2.4048255576957728))));
}

TEST(BesselJ, MatchesSeriesOracle) {
  for (int m : {0, 1, 2, 5})
    for (double x : {0.3, 1.0, 4.5, 9.0}) {
      Ball v = bessel_j(m, exact(x));
      EXPECT_TRUE(oracle::encloses(v, oracle::bessel_series(m, hp(x)))) << m << " " << x;
      EXPECT_NEAR(v.mid_double(), boost::math::cyl_bessel_j(m, x), 1e-13);
    }
}

// Quadrature --------------------------------------------------------------

TEST(Quadrature, Elementary) {
  auto a = integrate_semiaxis([](const Mpfr& r) { return r * exp(-(r * r)); }, 1e-25, 40);
  EXPECT_TRUE(oracle::encloses(a.value, hp(0.5)));
  EXPECT_TRUE(a.converged);
  auto b = integrate_semiaxis([](const Mpfr& r) { return exp(-(r * r)); }, 1e-25, 40);
  EXPECT_TRUE(oracle::encloses(b.value, boost::multiprecision::sqrt(oracle::pi()) / 2));
}

TEST(Quadrature, BesselWeightedGaussianMatchesTermwiseMoments) {
  // int r^3 e^{-r^2} J_0(2r) dr = sum_k (-1)^k / (k!)^2 * Gamma(k + 2) / 2.
  hp ref = 0, term = 0;
  for (int k = 0; k < 80; ++k) {
    term = (k % 2 ? -1 : 1) * boost::math::tgamma(hp(k + 2)) /
           (2 * boost::math::tgamma(hp(k + 1)) * boost::math::tgamma(hp(k + 1)));
    ref += term;
  }
  auto r = integrate_semiaxis(
      [](const Mpfr& x) { return x * x * x * exp(-(x * x)) * bessel_jn(0, x * 2.0); }, 1e-20, 40);
  EXPECT_TRUE(oracle::encloses(r.value, ref));
  EXPECT_LT(r.err(), 1e-20);
}

TEST(Quadrature, HigherGaussianMoments) {
  // int r^a e^{-r^2} = Gamma((a+1)/2)/2.
  for (int a : {2, 5, 7, 9, 11, 15}) {
    auto r = integrate_semiaxis([a](const Mpfr& x) { return pow(x, static_cast<long>(a)) * exp(-(x * x)); }, 1e-22, 40);
    EXPECT_TRUE(oracle::encloses(r.value, boost::math::tgamma(hp(a + 1) / 2) / 2)) << a;
  }
}

TEST(FourierLine, GaussianNormalization) {
  auto r = fourier_line([](double x) { return std::exp(-x * x / 2); }, 0.0, 1e-12);
  EXPECT_NEAR(r.value.real(), std::sqrt(2 * M_PI), 1e-10);
  EXPECT_NEAR(r.value.imag(), 0.0, 1e-12);
}

TEST(FourierLine, GumbelDensityGivesGammaOnePlusIs) {
  FourierHints h;
  h.lower = -45.0;
  h.upper = 5.0;
  for (double s : {0.5, 1.0, 2.0}) {
    auto r = fourier_line([](double x) { return std::exp(x - std::exp(x)); }, s, 1e-12, h);
    double mod2 = std::norm(r.value);
    EXPECT_NEAR(mod2, M_PI * s / std::sinh(M_PI * s), 1e-10) << s;
    CBall lg = ln_gamma(CBall::exact(1.0, s, kBits));
    EXPECT_NEAR(std::arg(r.value), std::remainder(lg.im().to_double(), 2 * M_PI), 1e-9) << s;
  }
}

TEST(FourierLine, RegularizedDoubleExponential) {
  // e^{eps x - e^x} has transform Gamma(eps + is).
  const double eps = 1e-2;
  FourierHints h;
  h.lower = -4000.0;
  h.upper = 5.0;
  h.panel = 2.0;
  // Left of `lower` the integrand is e^{eps x} to double precision.
  h.left_tail = [&](double s) {
    std::complex<double> a(eps, s);
    return std::make_pair(std::exp(a * h.lower) / a, 1e-15);
  };
  auto r = fourier_line([eps](double x) { return std::exp(eps * x - std::exp(x)); }, 1.0, 1e-10, h);
  CBall g = exp(ln_gamma(CBall::exact(eps, 1.0, kBits)));
  EXPECT_LT(std::abs(r.value - g.mid_double()), 1e-7);
}

// Determinants ------------------------------------------------------------

TEST(CertifiedDet, Identity) {
  BallMatrix m(3, 3, exact(0.0));
  for (int i = 0; i < 3; ++i) m(i, i) = exact(1.0);
  Ball d = certified_det(m);
  EXPECT_TRUE(d.contains(Mpfr(1L, kBits)));
  EXPECT_EQ(d.sign(), Sign::Positive);
}

TEST(CertifiedDet, SingularExactIsZero) {
  BallMatrix m(2, 2, exact(0.0));
  m(0, 0) = exact(1);
  m(0, 1) = exact(2);
  m(1, 0) = exact(2);
  m(1, 1) = exact(4);
  Ball d = certified_det(m);
  EXPECT_TRUE(d.contains_zero());
  EXPECT_LT(d.mag().to_double(), 1e-30);
}

TEST(CertifiedDet, SingularWithInputErrorIsIndeterminate) {
  BallMatrix m(2, 2, exact(0.0));
  Mag e = Mag::from_double(1e-30);
  m(0, 0) = Ball(Mpfr(1L, kBits), e);
  m(0, 1) = Ball(Mpfr(2L, kBits), e);
  m(1, 0) = Ball(Mpfr(2L, kBits), e);
  m(1, 1) = Ball(Mpfr(4L, kBits), e);
  EXPECT_EQ(certified_det(m).sign(), Sign::Indeterminate);
}

TEST(CertifiedDet, DoubleExponentialGrid) {
  // f(x) = e^{-e^x} on xs = ys = (0, 1): det = e^{-2} - e^{-(e + 1/e)}.
  auto f = [](double x) { return exp(-exp(exact(x))); };
  BallMatrix m(2, 2, exact(0.0));
  double xs[2] = {0, 1}, ys[2] = {0, 1};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = f(xs[i] - ys[j]);
  Ball d = certified_det(m);
  hp e = boost::multiprecision::exp(hp(1));
  hp ref = boost::multiprecision::exp(hp(-2)) - boost::multiprecision::exp(-(e + 1 / e));
  EXPECT_TRUE(oracle::encloses(d, ref));
  EXPECT_NEAR(d.mid_double(), 0.0896, 5e-4);
  EXPECT_EQ(d.sign(), Sign::Positive);
}

TEST(CertifiedDet, HilbertMatrixAgainstExactRational) {
  // det H_5 = 1 / 266716800000.
  const int n = 5;
  BallMatrix m(n, n, exact(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Ball::rational(1, i + j + 1, kBits);
  Ball d = certified_det(m);
  EXPECT_TRUE(oracle::encloses(d, hp(1) / hp("266716800000")));
}

TEST(CertifiedDet, ComplexMatchesHandExpansion) {
  CBallMatrix m(2, 2, CBall(kBits));
  m(0, 0) = CBall::exact(1, 2, kBits);
  m(0, 1) = CBall::exact(3, -1, kBits);
  m(1, 0) = CBall::exact(0.5, 0.5, kBits);
  m(1, 1) = CBall::exact(-2, 1, kBits);
  std::complex<double> ref = std::complex<double>(1, 2) * std::complex<double>(-2, 1) -
                             std::complex<double>(3, -1) * std::complex<double>(0.5, 0.5);
  CBall d = certified_det(m);
  EXPECT_TRUE((d - CBall::exact(ref.real(), ref.imag(), kBits)).contains_zero());
}

// RNG ---------------------------------------------------------------------

TEST(SeededRng, SameSeedSameStream) {
  SeededRng a(12345), b(12345);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(SeededRng, DifferentSeedsDiffer) {
  SeededRng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 10; ++i) same += a() == b();
  EXPECT_EQ(same, 0);
}

TEST(SeededRng, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(SeededRng, NormalMoments) {
  SeededRng r(5);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 5 * std::sqrt(1.0 / n));
  EXPECT_NEAR(s2 / n, 1.0, 5 * std::sqrt(2.0 / n));
}

// Precision policy --------------------------------------------------------

TEST(PrecisionPolicy, CapFromEnvironment) {
  setenv("POSITIVITY_PRECISION_CAP", "123", 1);
  EXPECT_EQ(precision_cap_digits(), 123);
  setenv("POSITIVITY_PRECISION_CAP", "junk", 1);
  EXPECT_EQ(precision_cap_digits(), kDefaultPrecisionCap);
  unsetenv("POSITIVITY_PRECISION_CAP");
  EXPECT_EQ(precision_cap_digits(), 600);
}

TEST(GammaFault, ScalesGamma) {
  gamma_fault_scale().store(1e-6);
  Ball faulty = gamma(exact(4.0));
  gamma_fault_scale().store(0.0);
  Ball clean = gamma(exact(4.0));
  EXPECT_FALSE(faulty.contains(Mpfr(6L, kBits)));
  EXPECT_TRUE(clean.contains(Mpfr(6L, kBits)));
}
