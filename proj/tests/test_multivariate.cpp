#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "lgpos/multivariate/integrals.hpp"
#include "oracles.hpp"

using namespace lgpos;
using namespace lgpos::mv;
using oracle::hp100;

namespace {

McConfig mc(std::uint64_t samples, std::uint64_t seed = 1, unsigned threads = 0) {
  McConfig c;
  c.samples = samples;
  c.seed = seed;
  c.threads = threads;
  return c;
}

bool within_3se(const IntegralEstimate& e, double ref) { return std::fabs(e.value - ref) <= 3 * e.total_error(); }

}  // namespace

// Polynomials -----------------------------------------------------------------

TEST(HomogeneousPoly, EvalAndHomogeneity) {
  HomogeneousPoly W(2, 3);
  W.add_term({3, 0}, {1.0, 0.5}).add_term({1, 2}, {-2.0, 0.0}).add_term({0, 3}, {0.0, 1.0});
  std::vector<cplx> z{{0.3, -0.7}, {1.1, 0.2}};
  cplx want = cplx(1.0, 0.5) * std::pow(z[0], 3) - 2.0 * z[0] * z[1] * z[1] + cplx(0, 1) * std::pow(z[1], 3);
  EXPECT_LT(std::abs(W.eval(z) - want), 1e-14);
  num::SeededRng rng(2);
  for (int i = 0; i < 20; ++i) {
    cplx lam(rng.uniform() * 2 - 1, rng.uniform() * 2 - 1);
    std::vector<cplx> lz{lam * z[0], lam * z[1]};
    EXPECT_LT(std::abs(W.eval(lz) - std::pow(lam, 3) * W.eval(z)), 1e-12);
  }
}

TEST(HomogeneousPoly, Validation) {
  HomogeneousPoly W(2, 3);
  EXPECT_THROW(W.add_term({2, 0}, 1.0), std::invalid_argument);
  EXPECT_THROW(W.add_term({1, 1, 1}, 1.0), std::invalid_argument);
  EXPECT_THROW(W.add_term({4, -1}, 1.0), std::invalid_argument);
  EXPECT_THROW(HomogeneousPoly(0, 3), std::invalid_argument);
  EXPECT_THROW(W.eval(std::vector<cplx>{1.0}), std::invalid_argument);
  W.add_term({1, 2}, 1.0).add_term({1, 2}, -1.0);
  EXPECT_TRUE(W.is_zero());
}

TEST(HomogeneousPoly, MonomialsAndSeparable) {
  EXPECT_EQ(HomogeneousPoly::monomials(2, 3).size(), 4u);
  EXPECT_EQ(HomogeneousPoly::monomials(3, 3).size(), 10u);
  auto W = HomogeneousPoly::separable({1.0, {0.0, 2.0}}, 3);
  auto a = W.separable_coefficients();
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ((*a)[1], cplx(0.0, 2.0));
  EXPECT_FALSE(HomogeneousPoly::random(2, 3, 4).separable_coefficients().has_value());
  // Same seed, same coefficients.
  EXPECT_EQ(HomogeneousPoly::random(2, 3, 4).to_string(), HomogeneousPoly::random(2, 3, 4).to_string());
  EXPECT_NE(HomogeneousPoly::random(2, 3, 4).to_string(), HomogeneousPoly::random(2, 3, 5).to_string());
}

TEST(Density, HomogeneityAndSign) {
  Density rho = Density::abs_square(HomogeneousPoly::monomial({1, 1}));
  EXPECT_EQ(rho.ell(), 2);
  std::vector<cplx> z{{0.4, 0.1}, {-0.3, 0.9}};
  cplx lam(0.7, -1.2);
  std::vector<cplx> lz{lam * z[0], lam * z[1]};
  EXPECT_NEAR(rho.eval(lz.data()), std::pow(std::norm(lam), 2) * rho.eval(z.data()), 1e-13);
  EXPECT_GE(rho.eval(z.data()), 0.0);
  EXPECT_EQ(Density::one().eval(z.data()), 1.0);
}

// Direct Monte Carlo ---------------------------------------------------------------

TEST(DirectMc, ZeroPotentialIsGaussianMass) {
  IntegralEstimate e = i_direct_mc(HomogeneousPoly::zero(2, 3), Density::one(), mc(10000));
  EXPECT_NEAR(e.value, M_PI * M_PI, 1e-12);
  EXPECT_EQ(e.imag_value, 0.0);
}

TEST(DirectMc, LinearPotentialIsGaussianFourier) {
  for (cplx t : {cplx(0.5, 0.0), cplx(0.3, -0.8)}) {
    HomogeneousPoly W(1, 1);
    W.add_term({1}, t);
    IntegralEstimate e = i_direct_mc(W, Density::one(), mc(400000, 3));
    EXPECT_TRUE(within_3se(e, M_PI * std::exp(-std::norm(t)))) << e.value;
    EXPECT_LE(std::fabs(e.imag_value), 3 * e.imag_std_error);
  }
}

TEST(DirectMc, RejectsTooFewSamples) {
  EXPECT_THROW(i_direct_mc(HomogeneousPoly::zero(2, 3), Density::one(), mc(10)), std::invalid_argument);
  Density rho = Density::abs_square(HomogeneousPoly::monomial({1, 0, 0}));
  EXPECT_THROW(i_direct_mc(HomogeneousPoly::zero(2, 3), rho, mc(10000)), std::invalid_argument);
}

TEST(DirectMc, DeterministicAcrossThreadCounts) {
  auto W = HomogeneousPoly::random(2, 3, 42);
  IntegralEstimate a = i_direct_mc(W, Density::one(), mc(300000, 9, 1));
  IntegralEstimate b = i_direct_mc(W, Density::one(), mc(300000, 9, 3));
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_EQ(a.imag_value, b.imag_value);
  IntegralEstimate c = i_direct_mc(W, Density::one(), mc(300000, 10, 1));
  EXPECT_NE(a.value, c.value);
}

// Separable closed form -----------------------------------------------------------------

TEST(Separable, ZeroCoefficientsGivePiToTheN) {
  num::Ball v = i_separable({0.0, 0.0, 0.0}, 4);
  EXPECT_TRUE(oracle::encloses(v, oracle::pi() * oracle::pi() * oracle::pi()));
}

TEST(Separable, OneVariableIsScaledF0) {
  // 3 pi F_0(1), with F_0 from the Mellin-expansion oracle; the phase of a is irrelevant.
  hp100 ref = 3 * boost::math::constants::pi<hp100>() * oracle::mellin_series(3, 0, 1.0);
  for (cplx a : {cplx(1.0, 0.0), std::polar(1.0, 2.1)}) {
    num::Ball v = i_separable({a}, 3, 1e-22);
    EXPECT_NEAR(v.mid_double(), static_cast<double>(ref), 1e-15);
    EXPECT_LT(v.rad_double(), 1e-20);
  }
  IntegralEstimate e = i_direct_mc(HomogeneousPoly::separable({1.0}, 3), Density::one(), mc(400000, 5));
  EXPECT_TRUE(within_3se(e, static_cast<double>(ref))) << e.value;
}

TEST(Separable, Factorizes) {
  num::Ball one = i_separable({1.0}, 3);
  num::Ball three = i_separable({1.0, 1.0, 1.0}, 3);
  EXPECT_TRUE((three - one * one * one).contains_zero());
  EXPECT_THROW(i_separable({1.0}, 2), std::invalid_argument);
  EXPECT_THROW(i_separable({}, 3), std::invalid_argument);
}

TEST(Separable, MatchesDirectMc) {
  auto W = HomogeneousPoly::separable({1.0, 1.0}, 3);
  IntegralEstimate e = i_direct_mc(W, Density::one(), mc(1000000, 7));
  double ref = i_separable({1.0, 1.0}, 3).mid_double();
  EXPECT_TRUE(within_3se(e, ref)) << e.value << " vs " << ref;
}

// Sphere reduction ------------------------------------------------------------------

TEST(SphereReduced, CalibrationAtZero) {
  IntegralEstimate e = i_sphere_reduced(HomogeneousPoly::zero(2, 3), Density::one(), mc(10000));
  EXPECT_NEAR(e.value, M_PI * M_PI, 1e-9);
  EXPECT_EQ(e.constant, 1.5);
  EXPECT_NEAR(sphere_area(2), 2 * M_PI * M_PI, 1e-14);
}

TEST(SphereReduced, SeparableWithinOnePercent) {
  auto W = HomogeneousPoly::separable({1.0, 1.0}, 3);
  IntegralEstimate e = i_sphere_reduced(W, Density::one(), mc(1000000, 2));
  double ref = i_separable({1.0, 1.0}, 3).mid_double();
  EXPECT_LE(std::fabs(e.value - ref), 0.01 * ref);
  EXPECT_TRUE(within_3se(e, ref)) << e.value << " vs " << ref;
}

TEST(SphereReduced, AgreesWithDirectOnRandomCubics) {
  for (std::uint64_t s = 0; s < 4; ++s) {
    auto W = HomogeneousPoly::random(2, 3, 100 + s);
    IntegralEstimate a = i_direct_mc(W, Density::one(), mc(400000, s));
    IntegralEstimate b = i_sphere_reduced(W, Density::one(), mc(400000, s));
    EXPECT_LE(std::fabs(a.value - b.value), 3 * std::hypot(a.total_error(), b.total_error())) << s;
    EXPECT_GE(b.min_integrand, -b.certified_err);
    EXPECT_FALSE(b.exploratory);
  }
}

TEST(SphereReduced, LinearDensityPositiveAndConsistent) {
  Density rho = Density::abs_square(HomogeneousPoly::monomial({1, 0}));
  auto W = HomogeneousPoly::random(2, 3, 17);
  IntegralEstimate s = i_sphere_reduced(W, rho, mc(400000, 4));
  IntegralEstimate d = i_direct_mc(W, rho, mc(400000, 4));
  EXPECT_EQ(s.kernel_index, 2);
  EXPECT_FALSE(s.exploratory);
  EXPECT_EQ(classify(s), Verdict::Positive);
  EXPECT_GE(s.min_integrand, -s.certified_err);
  EXPECT_LE(std::fabs(s.value - d.value), 3 * std::hypot(s.total_error(), d.total_error()));
}

TEST(SphereReduced, ExploratoryFlagOutsideRange) {
  Density rho = Density::abs_square(HomogeneousPoly::monomial({1, 1}));
  IntegralEstimate s = i_sphere_reduced(HomogeneousPoly::random(2, 3, 1), rho, mc(20000));
  EXPECT_TRUE(s.exploratory);
  EXPECT_EQ(s.kernel_index, 3);
  EXPECT_THROW(i_sphere_reduced(HomogeneousPoly::random(2, 2, 1), Density::one(), mc(20000)), std::invalid_argument);
}

TEST(SphereReduced, Deterministic) {
  auto W = HomogeneousPoly::random(3, 3, 8);
  IntegralEstimate a = i_sphere_reduced(W, Density::one(), mc(100000, 3, 1));
  IntegralEstimate b = i_sphere_reduced(W, Density::one(), mc(100000, 3, 2));
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
}

// Scaling -----------------------------------------------------------------------

TEST(Scaling, UnitScaleIsIdentical) {
  ScalingReport r = scaling_check(HomogeneousPoly::random(2, 3, 3), 1.0, mc(50000));
  EXPECT_EQ(r.difference, 0.0);
  EXPECT_TRUE(r.consistent);
}

TEST(Scaling, ZeroPotential) {
  ScalingReport r = scaling_check(HomogeneousPoly::zero(2, 3), 1.7, mc(50000));
  EXPECT_NEAR(r.lhs.value, M_PI * M_PI, 1e-12);
  EXPECT_NEAR(r.rhs.value, M_PI * M_PI, 1e-12);
}

TEST(Scaling, RandomCubic) {
  ScalingReport r = scaling_check(HomogeneousPoly::random(2, 3, 21), 1.5, mc(400000, 6));
  EXPECT_TRUE(r.consistent) << r.difference << " " << r.combined_se;
  EXPECT_THROW(scaling_check(HomogeneousPoly::zero(2, 3), 3.0, mc(50000)), std::invalid_argument);
}

// Sweeps -----------------------------------------------------------------------

TEST(EvidenceSweep, ProvenRegimeAllPositive) {
  std::vector<HomogeneousPoly> fam;
  for (std::uint64_t s = 0; s < 100; ++s) fam.push_back(HomogeneousPoly::random(2, 3, num::derive_seed(77, s)));
  SweepConfig cfg;
  cfg.mc = mc(20000, 5);
  cfg.direct = false;
  auto out = evidence_sweep(fam, Density::one(), cfg);
  ASSERT_EQ(out.size(), 100u);
  for (const auto& e : out) {
    EXPECT_EQ(e.verdict, Verdict::Positive) << e.index;
    EXPECT_EQ(e.label, "Instance");
    EXPECT_TRUE(e.error.empty());
  }
}

TEST(EvidenceSweep, OpenRegimeLabelledEvidence) {
  std::vector<HomogeneousPoly> fam;
  for (std::uint64_t s = 0; s < 5; ++s) fam.push_back(HomogeneousPoly::random(4, 3, s));
  SweepConfig cfg;
  cfg.mc = mc(20000, 1);
  auto out = evidence_sweep(fam, Density::one(), cfg);
  for (const auto& e : out) {
    EXPECT_EQ(e.label, "Evidence");
    EXPECT_TRUE(e.exploratory);
    EXPECT_TRUE(e.direct.has_value());
    EXPECT_TRUE(e.sphere.has_value());
    EXPECT_TRUE(e.routes_consistent.has_value());
  }
}

TEST(EvidenceSweep, SeparableRouteAndFailures) {
  SweepConfig cfg;
  cfg.mc = mc(20000, 1);
  auto out = evidence_sweep({HomogeneousPoly::separable({1.0, 0.5}, 3)}, Density::one(), cfg);
  ASSERT_TRUE(out[0].separable.has_value());
  SweepConfig none = cfg;
  none.direct = false;
  none.sphere = false;
  auto bad = evidence_sweep({HomogeneousPoly::random(2, 3, 1)}, Density::one(), none);
  EXPECT_EQ(bad[0].verdict, Verdict::Failed);
  EXPECT_FALSE(bad[0].error.empty());
}

TEST(Classify, ThreeSigma) {
  IntegralEstimate e;
  e.value = 1.0;
  e.std_error = 0.3;
  EXPECT_EQ(classify(e), Verdict::Positive);
  e.std_error = 0.4;
  EXPECT_EQ(classify(e), Verdict::ConsistentWithZero);
  e.value = -2.0;
  EXPECT_EQ(classify(e), Verdict::NegativeFlagged);
  EXPECT_TRUE(proven_regime(2, 1, 3));
  EXPECT_FALSE(proven_regime(2, 2, 3));
}
