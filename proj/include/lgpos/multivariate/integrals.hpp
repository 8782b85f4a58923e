#pragma once

// I(rho, W) = int_{C^n} rho(z) e^{-|z|^2 + W(z) - conj(W(z))} by direct Monte
// Carlo, by the reduction to a sphere integral of F_{n+l-1}(|W|), and in
// closed form for separable W.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lgpos/fp/kernel.hpp"
#include "lgpos/fp/table.hpp"
#include "lgpos/multivariate/poly.hpp"
#include "lgpos/numerics/rng.hpp"

namespace lgpos::mv {

using num::Ball;

enum class Method { DirectMC, SphereReduced, SeparableClosed };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::DirectMC: return "direct_mc";
    case Method::SphereReduced: return "sphere_reduced";
    case Method::SeparableClosed: return "separable_closed";
  }
  return "?";
}

struct IntegralEstimate {
  Method method = Method::DirectMC;
  double value = 0.0;
  double std_error = 0.0;
  /// Imaginary part of the direct estimator; zero for the other methods.
  double imag_value = 0.0;
  double imag_std_error = 0.0;
  /// Deterministic error on top of the statistical one (kernel table, closed form).
  double certified_err = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  /// Set when n + l - 1 > d - 1, where F_{n+l-1} is not known to be nonnegative.
  bool exploratory = false;
  /// Sphere route: constant in front of the sphere integral and the smallest sampled integrand.
  double constant = 0.0;
  double min_integrand = 0.0;
  int kernel_index = -1;

  double total_error() const { return std::sqrt(std_error * std_error + certified_err * certified_err); }
};

struct McConfig {
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

namespace detail {

inline constexpr std::uint64_t kChunk = 1u << 16;

struct Acc {
  // Welford updates, Chan et al. merge.
  double mx = 0.0, qx = 0.0, my = 0.0, qy = 0.0;
  double min = std::numeric_limits<double>::infinity();
  std::uint64_t n = 0;

  void add(double x, double y = 0.0) {
    ++n;
    double nn = static_cast<double>(n);
    double dx = x - mx, dy = y - my;
    mx += dx / nn;
    my += dy / nn;
    qx += dx * (x - mx);
    qy += dy * (y - my);
    min = std::min(min, x);
  }
  void merge(const Acc& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
    double dx = o.mx - mx, dy = o.my - my;
    mx += dx * nb / nt;
    my += dy * nb / nt;
    qx += o.qx + dx * dx * na * nb / nt;
    qy += o.qy + dy * dy * na * nb / nt;
    min = std::min(min, o.min);
    n += o.n;
  }
  double mean() const { return mx; }
  double se() const { return std::sqrt(qx / static_cast<double>(n - 1) / static_cast<double>(n)); }
  double imag_mean() const { return my; }
  double imag_se() const { return std::sqrt(qy / static_cast<double>(n - 1) / static_cast<double>(n)); }
};

/// Runs body(rng, count, acc) over fixed-size chunks with per-chunk seeds;
/// chunk results are merged in index order, so the outcome does not depend
/// on the number of workers.
template <class Body>
Acc run_chunks(const McConfig& cfg, std::uint64_t stream, const Body& body) {
  if (cfg.samples < 2) throw std::invalid_argument("Monte Carlo needs at least 2 samples");
  const std::uint64_t chunks = (cfg.samples + kChunk - 1) / kChunk;
  std::vector<Acc> parts(chunks);
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t c; (c = next.fetch_add(1)) < chunks;) {
      std::uint64_t count = std::min<std::uint64_t>(kChunk, cfg.samples - c * kChunk);
      num::SeededRng rng(num::derive_seed(num::derive_seed(cfg.seed, stream), c));
      body(rng, count, parts[c]);
    }
  };
  unsigned nt = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  nt = static_cast<unsigned>(std::min<std::uint64_t>(nt, chunks));
  if (nt <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nt; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  Acc total;
  for (const Acc& a : parts) total.merge(a);
  return total;
}

/// Standard complex Gaussian: density e^{-|z|^2} / pi^n.
inline void complex_gaussian(num::SeededRng& rng, cplx* z, int n, double scale = 1.0) {
  const double s = std::sqrt(0.5) * scale;
  for (int i = 0; i < n; ++i) {
    double re = rng.normal() * s;
    double im = rng.normal() * s;
    z[i] = cplx(re, im);
  }
}

inline void check_dims(const HomogeneousPoly& W, const Density& rho) {
  if (rho.poly() && rho.poly()->n() != W.n()) throw std::invalid_argument("density and W have different n");
}

// Stream tags keep the two routes' random numbers independent.
inline constexpr std::uint64_t kDirectStream = 0x4449524543540000ULL;
inline constexpr std::uint64_t kSphereStream = 0x5350484552450000ULL;
inline constexpr std::uint64_t kScaledStream = 0x5343414c45440000ULL;

}  // namespace detail

/// pi^n E[rho(Z) e^{2i Im W(Z)}] for Z standard complex Gaussian.
inline IntegralEstimate i_direct_mc(const HomogeneousPoly& W, const Density& rho, const McConfig& cfg) {
  detail::check_dims(W, rho);
  if (cfg.samples < 1000) throw std::invalid_argument("i_direct_mc: samples must be >= 1000");
  const int n = W.n();
  detail::Acc acc = detail::run_chunks(cfg, detail::kDirectStream, [&](num::SeededRng& rng, std::uint64_t count,
                                                                       detail::Acc& a) {
    std::vector<cplx> z(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; i < count; ++i) {
      detail::complex_gaussian(rng, z.data(), n);
      double r = rho.eval(z.data());
      double phase = 2.0 * W.eval(z.data()).imag();
      a.add(r * std::cos(phase), r * std::sin(phase));
    }
  });
  const double pin = std::pow(M_PI, n);
  IntegralEstimate est;
  est.method = Method::DirectMC;
  est.value = pin * acc.mean();
  est.std_error = pin * acc.se();
  est.imag_value = pin * acc.imag_mean();
  est.imag_std_error = pin * acc.imag_se();
  est.samples = cfg.samples;
  est.seed = cfg.seed;
  est.exploratory = n + rho.ell() > W.degree();
  return est;
}

/// Surface area of the unit sphere in C^n = R^{2n}.
inline double sphere_area(int n) { return 2.0 * std::pow(M_PI, n) / std::tgamma(static_cast<double>(n)); }

/// Constant in I(rho, W) = c int_{S^{2n-1}} rho F_{n+l-1}(|W|) d sigma.
inline double sphere_constant(int d) { return d / 2.0; }

/// (d/2) Area(S^{2n-1}) E[rho(w) F_{n+l-1}(|W(w)|)] for w uniform on the sphere.
inline IntegralEstimate i_sphere_reduced(const HomogeneousPoly& W, const Density& rho, const McConfig& cfg) {
  detail::check_dims(W, rho);
  const int n = W.n();
  const int d = W.degree();
  if (d < 3) throw std::invalid_argument("i_sphere_reduced: the kernel needs d >= 3");
  const int m = n + rho.ell() - 1;
  auto table = fp::shared_fp_table({d, m});
  detail::Acc acc = detail::run_chunks(cfg, detail::kSphereStream, [&](num::SeededRng& rng, std::uint64_t count,
                                                                       detail::Acc& a) {
    std::vector<cplx> z(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; i < count; ++i) {
      detail::complex_gaussian(rng, z.data(), n);
      double norm = 0.0;
      for (const cplx& c : z) norm += std::norm(c);
      double inv = 1.0 / std::sqrt(norm);
      for (cplx& c : z) c *= inv;
      double r = rho.eval(z.data());
      double f = table->at_t(std::abs(W.eval(z.data())));
      // The imaginary slot carries rho so that E[rho] is available for the error bound.
      a.add(r * f, r);
    }
  });
  const double c = sphere_constant(d) * sphere_area(n);
  IntegralEstimate est;
  est.method = Method::SphereReduced;
  est.value = c * acc.mean();
  est.std_error = c * acc.se();
  est.certified_err = c * acc.imag_mean() * table->error_estimate();
  est.samples = cfg.samples;
  est.seed = cfg.seed;
  est.exploratory = m > d - 1;
  est.constant = sphere_constant(d);
  est.min_integrand = acc.min;
  est.kernel_index = m;
  return est;
}

/// prod_j pi d F_0(|a_j|) for W = sum_j a_j z_j^d.
inline Ball i_separable(const std::vector<cplx>& a, int d, double tol = 1e-20) {
  if (d < 3) throw std::invalid_argument("i_separable: d must be >= 3");
  if (a.empty()) throw std::invalid_argument("i_separable: need at least one coefficient");
  fp::FpKernel kernel({d, 0});
  int digits = std::max(30, static_cast<int>(std::ceil(-std::log10(tol))) + 10);
  num::Bits bits = num::bits_for_digits(digits);
  Ball prod = Ball::exact(1L, bits);
  for (const cplx& aj : a) {
    double t = std::abs(aj);
    Ball f = t == 0.0 ? fp::fp_at_zero({d, 0}, digits) : fp::fp_value(kernel, t, tol / (4.0 * a.size())).value;
    prod = prod * (Ball::pi(bits) * static_cast<long>(d) * f);
  }
  return prod;
}

inline IntegralEstimate separable_estimate(const std::vector<cplx>& a, int d, double tol = 1e-20) {
  Ball v = i_separable(a, d, tol);
  IntegralEstimate est;
  est.method = Method::SeparableClosed;
  est.value = v.mid_double();
  est.certified_err = v.rad_double() + std::fabs(est.value) * 1e-16;
  return est;
}

struct ScalingReport {
  double t_scale = 1.0;
  IntegralEstimate lhs;  // int e^{-|z|^2 + W - conj W}
  IntegralEstimate rhs;  // t^{2n} int e^{-t^2|z|^2 + t^d (W - conj W)}
  double difference = 0.0;
  double combined_se = 0.0;
  bool consistent = false;
};

/// Both sides of the change of variables z -> t z, sampled with a shared seed.
inline ScalingReport scaling_check(const HomogeneousPoly& W, double t_scale, const McConfig& cfg) {
  if (!(t_scale >= 0.5 && t_scale <= 2.0)) throw std::invalid_argument("scaling_check: t_scale must be in [0.5, 2]");
  ScalingReport rep;
  rep.t_scale = t_scale;
  const int n = W.n();
  const double td = std::pow(t_scale, W.degree());
  const double pin = std::pow(M_PI, n);
  auto run = [&](bool scaled) {
    detail::Acc acc = detail::run_chunks(cfg, detail::kScaledStream, [&](num::SeededRng& rng, std::uint64_t count,
                                                                         detail::Acc& a) {
      std::vector<cplx> z(static_cast<std::size_t>(n));
      for (std::uint64_t i = 0; i < count; ++i) {
        if (scaled) {
          // density t^{2n} e^{-t^2|z|^2} / pi^n; the prefactor t^{2n} cancels its normalization.
          detail::complex_gaussian(rng, z.data(), n, 1.0 / t_scale);
          a.add(std::cos(2.0 * td * W.eval(z.data()).imag()));
        } else {
          detail::complex_gaussian(rng, z.data(), n);
          a.add(std::cos(2.0 * W.eval(z.data()).imag()));
        }
      }
    });
    IntegralEstimate e;
    e.method = Method::DirectMC;
    e.value = pin * acc.mean();
    e.std_error = pin * acc.se();
    e.samples = cfg.samples;
    e.seed = cfg.seed;
    return e;
  };
  rep.lhs = run(false);
  rep.rhs = run(true);
  rep.difference = std::fabs(rep.lhs.value - rep.rhs.value);
  rep.combined_se = std::hypot(rep.lhs.std_error, rep.rhs.std_error);
  rep.consistent = rep.difference <= 3.0 * rep.combined_se || rep.difference == 0.0;
  return rep;
}

enum class Verdict { Positive, ConsistentWithZero, NegativeFlagged, Failed };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Positive: return "Positive";
    case Verdict::ConsistentWithZero: return "ConsistentWithZero";
    case Verdict::NegativeFlagged: return "Negative-flagged";
    case Verdict::Failed: return "Failed";
  }
  return "?";
}

/// Three-sigma classification of an estimate.
inline Verdict classify(const IntegralEstimate& e) {
  double err = 3.0 * e.std_error + e.certified_err;
  if (e.value - err > 0) return Verdict::Positive;
  if (e.value + err < 0) return Verdict::NegativeFlagged;
  return Verdict::ConsistentWithZero;
}

struct SweepConfig {
  McConfig mc;
  bool direct = true;
  bool sphere = true;
};

struct EvidenceEntry {
  std::size_t index = 0;
  std::string W;
  std::optional<IntegralEstimate> direct;
  std::optional<IntegralEstimate> sphere;
  std::optional<IntegralEstimate> separable;
  Verdict verdict = Verdict::Failed;
  /// "Instance" inside n + l <= d, "Evidence" outside.
  std::string label;
  bool exploratory = false;
  /// |direct - sphere| within 3 combined standard errors (when both ran).
  std::optional<bool> routes_consistent;
  std::string error;
};

inline bool proven_regime(int n, int ell, int d) { return n + ell <= d; }

/// Runs the requested routes on every member. Failures are recorded and the
/// sweep continues.
inline std::vector<EvidenceEntry> evidence_sweep(const std::vector<HomogeneousPoly>& family, const Density& rho,
                                                 const SweepConfig& cfg) {
  std::vector<EvidenceEntry> out;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const HomogeneousPoly& W = family[i];
    EvidenceEntry e;
    e.index = i;
    e.W = W.to_string();
    e.label = proven_regime(W.n(), rho.ell(), W.degree()) ? "Instance" : "Evidence";
    e.exploratory = W.n() + rho.ell() - 1 > W.degree() - 1;
    try {
      if (cfg.direct) e.direct = i_direct_mc(W, rho, cfg.mc);
      if (cfg.sphere) e.sphere = i_sphere_reduced(W, rho, cfg.mc);
      auto sep = W.separable_coefficients();
      if (sep && rho.kind() == Density::Kind::One && W.degree() >= 3) e.separable = separable_estimate(*sep, W.degree());
      std::vector<Verdict> vs;
      if (e.direct) vs.push_back(classify(*e.direct));
      if (e.sphere) vs.push_back(classify(*e.sphere));
      if (vs.empty()) throw std::invalid_argument("evidence_sweep: no route selected");
      // Report the weakest verdict among the routes.
      e.verdict = *std::max_element(vs.begin(), vs.end(), [](Verdict a, Verdict b) {
        auto rank = [](Verdict v) { return v == Verdict::Positive ? 0 : v == Verdict::ConsistentWithZero ? 1 : 2; };
        return rank(a) < rank(b);
      });
      if (e.direct && e.sphere) {
        double diff = std::fabs(e.direct->value - e.sphere->value);
        e.routes_consistent = diff <= 3.0 * std::hypot(e.direct->total_error(), e.sphere->total_error());
      }
    } catch (const std::exception& ex) {
      e.verdict = Verdict::Failed;
      e.error = ex.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace lgpos::mv
