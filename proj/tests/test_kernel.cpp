#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "topoflock/kernel.hpp"
#include "topoflock/rng.hpp"

using namespace topoflock;

namespace {

KernelParams params_1d(double alpha = 1.0, double tau = 1.0, double r0 = M_PI / 4.0) {
  KernelParams p;
  p.alpha = alpha;
  p.tau = tau;
  p.r0 = r0;
  return p;
}

} // namespace

TEST_CASE("bump profile", "[kernel]") {
  KernelParams p = params_1d(1.0, 1.0, 0.5);
  REQUIRE(bump_h(0.0, p) == 1.0);
  REQUIRE(bump_h(0.5, p) == 0.0);
  REQUIRE(bump_h(0.7, p) == 0.0);
  REQUIRE(bump_h(0.25, p) == Catch::Approx(std::exp(-1.0 / 3.0)).epsilon(1e-15));
  // smooth, nonincreasing
  double prev = 1.0;
  for (int i = 1; i <= 100; ++i) {
    double v = bump_h(0.005 * i, p);
    REQUIRE(v <= prev + 1e-16);
    prev = v;
  }
  REQUIRE_THROWS_AS(bump_h(-0.1, p), argument_error);
}

TEST_CASE("phi reduces to the metric kernel for uniform density", "[kernel]") {
  Grid g(1, 256);
  Field uni(g, 1, 1.0);
  DensityAccumulator acc(uni);
  DomainShape s = make_domain_shape(1);
  for (double tau : {0.0, 0.7, 1.0}) {
    KernelParams p = params_1d(1.3, tau);
    for (double r : {0.05, 0.2, 0.6}) {
      double v = phi({1.0, 0.0}, {1.0 + r, 0.0}, acc, s, p);
      double metric = bump_h(r, p) / std::pow(r, 1.0 + p.alpha);
      REQUIRE(v == Catch::Approx(metric).epsilon(1e-13));
    }
  }
}

TEST_CASE("phi vanishes beyond the cutoff", "[kernel]") {
  Grid g(1, 256);
  Field uni(g, 1, 1.0);
  DensityAccumulator acc(uni);
  DomainShape s = make_domain_shape(1);
  KernelParams p = params_1d();
  REQUIRE(phi({0.0, 0.0}, {p.r0 * 1.01, 0.0}, acc, s, p) == 0.0);
  REQUIRE_THROWS_AS(phi({0.0, 0.0}, {0.0, 0.0}, acc, s, p), singular_point_error);
}

TEST_CASE("phi closed form for constant density", "[kernel]") {
  // rho = c, n = 1, tau = 1, alpha = 1, r0 = 0.5, |x-y| = 0.1:
  // phi = h(0.1) / (0.1 * (0.1 c)) = 100 h(0.1) / c
  double c = 1.7;
  Grid g(1, 512);
  Field rho(g, 1, c);
  DensityAccumulator acc(rho);
  DomainShape s = make_domain_shape(1);
  KernelParams p = params_1d(1.0, 1.0, 0.5);
  double v = phi({2.0, 0.0}, {2.1, 0.0}, acc, s, p);
  double expect = 100.0 * bump_h(std::abs(2.1 - 2.0), p) / c;
  REQUIRE(v == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("kernel cache: uniform density rows equal the metric row", "[kernel]") {
  Grid g(1, 128);
  Field uni(g, 1, 1.0);
  DomainShape s = make_domain_shape(1);
  KernelParams p = params_1d();
  KernelCache cache(uni, s, p);
  const StencilRule& st = cache.stencil();
  for (std::size_t j = 0; j < st.pair_count(); ++j) {
    double r = st.offset_norm(j);
    double metric = bump_h(r, p) / std::pow(r, 1.0 + p.alpha);
    for (std::size_t i = 0; i < g.size(); i += 17)
      REQUIRE(cache.phi_plus(j, i) == Catch::Approx(metric).epsilon(1e-13));
  }
}

TEST_CASE("kernel cache spot check against direct phi", "[kernel]") {
  SplitMix64 rng(314);
  for (int dim : {1, 2}) {
    Grid g(dim, dim == 1 ? 256 : 32);
    Field rho = make_field(g, 1, [&](std::array<double, 2>, int) { return rng.uniform(0.4, 2.0); });
    DomainShape s = dim == 1 ? make_domain_shape(1) : make_domain_shape(2, M_PI / 4.0, 16);
    KernelParams p = params_1d(1.0, static_cast<double>(dim));
    KernelCache cache(rho, s, p);
    DensityAccumulator acc(rho);
    const StencilRule& st = cache.stencil();
    for (int t = 0; t < 100; ++t) {
      std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(st.pair_count()) - 1));
      std::size_t i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(g.size()) - 1));
      auto x = g.point(i);
      auto y = g.point(st.fwd[j][i]);
      double direct = phi(x, y, acc, s, p);
      double cached = cache.phi_plus(j, i);
      if (direct == 0.0)
        REQUIRE(cached == 0.0);
      else
        REQUIRE(cached == Catch::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("kernel cache is exactly symmetric entrywise", "[kernel]") {
  SplitMix64 rng(555);
  Grid g(2, 32);
  Field rho = make_field(g, 1, [&](std::array<double, 2>, int) { return rng.uniform(0.4, 2.0); });
  DomainShape s = make_domain_shape(2, M_PI / 4.0, 16);
  KernelParams p = params_1d(0.8, 2.0);
  KernelCache cache(rho, s, p);
  const StencilRule& st = cache.stencil();
  // phi(x, x+z) must equal phi(x+z, x) == phi_minus at the shifted point
  for (std::size_t j = 0; j < st.pair_count(); ++j)
    for (std::size_t i = 0; i < g.size(); i += 11)
      REQUIRE(cache.phi_plus(j, i) == cache.phi_minus(j, st.fwd[j][i]));
}

TEST_CASE("kernel cache rebuild reflects density changes", "[kernel]") {
  Grid g(1, 128);
  Field rho(g, 1, 1.0);
  DomainShape s = make_domain_shape(1);
  KernelParams p = params_1d();
  KernelCache c1(rho, s, p);
  Field rho2 = rho;
  rho2(5) = 1.5; // perturb one cell
  KernelCache c2(rho2, s, p);
  REQUIRE(c1.fingerprint() != c2.fingerprint());
  bool differs = false;
  for (std::size_t j = 0; j < c1.stencil().pair_count() && !differs; ++j)
    for (std::size_t i = 0; i < g.size() && !differs; ++i)
      if (c1.phi_plus(j, i) != c2.phi_plus(j, i)) differs = true;
  REQUIRE(differs);
  // far away from the perturbed cell the tables agree up to prefix rounding
  REQUIRE(c1.phi_plus(0, g.size() / 2) ==
          Catch::Approx(c2.phi_plus(0, g.size() / 2)).epsilon(1e-12));
}

TEST_CASE("kernel scaling invariant: rho -> c rho multiplies phi by c^{-tau/n}",
          "[kernel]") {
  SplitMix64 rng(808);
  Grid g(1, 128);
  Field rho = make_field(g, 1, [&](std::array<double, 2>, int) { return rng.uniform(0.5, 1.5); });
  Field rho2 = 2.0 * rho;
  DomainShape s = make_domain_shape(1);
  KernelParams p = params_1d(1.0, 1.0);
  KernelCache c1(rho, s, p);
  KernelCache c2(rho2, s, p);
  // tau = 1, n = 1, c = 2: every entry is exactly halved (power-of-two scaling)
  for (std::size_t j = 0; j < c1.stencil().pair_count(); ++j)
    for (std::size_t i = 0; i < g.size(); i += 13)
      REQUIRE(c2.phi_plus(j, i) == 0.5 * c1.phi_plus(j, i));

  KernelParams p7 = params_1d(1.0, 0.7);
  KernelCache d1(rho, s, p7), d2(rho2, s, p7);
  double factor = std::pow(2.0, -0.7);
  for (std::size_t i = 0; i < g.size(); i += 13)
    REQUIRE(d2.phi_plus(2, i) == Catch::Approx(factor * d1.phi_plus(2, i)).epsilon(1e-14));
}

TEST_CASE("metric reduction: tau = 0 makes the cache density-independent", "[kernel]") {
  SplitMix64 rng(21);
  Grid g(1, 128);
  Field r1 = make_field(g, 1, [&](std::array<double, 2>, int) { return rng.uniform(0.5, 1.5); });
  Field r2 = make_field(g, 1, [&](std::array<double, 2>, int) { return rng.uniform(0.5, 1.5); });
  DomainShape s = make_domain_shape(1);
  KernelParams p = params_1d(1.2, 0.0);
  KernelCache c1(r1, s, p), c2(r2, s, p);
  for (std::size_t j = 0; j < c1.stencil().pair_count(); ++j)
    REQUIRE(c1.plane(j) == c2.plane(j));
}

TEST_CASE("kernel two-sided envelope from density bounds", "[kernel]") {
  SplitMix64 rng(99);
  Grid g(2, 32);
  Field rho = make_field(g, 1, [&](std::array<double, 2>, int) { return rng.uniform(0.6, 1.4); });
  double rmin = field_min(rho), rmax = field_max(rho);
  DomainShape s = make_domain_shape(2, M_PI / 4.0, 16);
  KernelParams p = params_1d(1.0, 2.0);
  KernelCache cache(rho, s, p);
  const StencilRule& st = cache.stencil();
  double comega = s.scale_constant();
  for (std::size_t j = 0; j < st.pair_count(); ++j) {
    double r = st.offset_norm(j);
    double metric = bump_h(r, p) / std::pow(r, 2.0 + p.alpha);
    if (metric == 0.0) continue;
    double lo = metric * std::pow(comega * rmax, -p.tau / 2.0);
    double hi = metric * std::pow(comega * rmin, -p.tau / 2.0);
    for (std::size_t i = 0; i < g.size(); i += 7) {
      REQUIRE(cache.phi_plus(j, i) >= lo * (1.0 - 1e-12));
      REQUIRE(cache.phi_plus(j, i) <= hi * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("cache vacuum and staleness guards", "[kernel]") {
  Grid g(1, 64);
  Field low(g, 1, 1e-9);
  DomainShape s = make_domain_shape(1);
  KernelParams p = params_1d();
  REQUIRE_THROWS_AS(KernelCache(low, s, p), vacuum_error);

  Field rho(g, 1, 1.0);
  KernelCache cache(rho, s, p);
  REQUIRE(cache.matches(rho));
  Field other(g, 1, 1.1);
  REQUIRE_FALSE(cache.matches(other));
  REQUIRE_THROWS_AS(cache.require_current(other), consistency_error);
}
