#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "topoflock/simulate.hpp"

using namespace topoflock;

namespace {

SimConfig flagship_config(int points = 64) {
  SimConfig cfg;
  cfg.grid.points = points;
  cfg.resolve();
  return cfg;
}

SimState flagship_state(const SimConfig& cfg) {
  Grid g = cfg.to_grid();
  SimState s;
  s.rho = make_field(g, 1, [&](std::array<double, 2> p, int) {
    return cfg.initial.rho_mean + cfg.initial.rho_amp * std::cos(p[0]);
  });
  s.u = make_field(g, 1, [&](std::array<double, 2> p, int) {
    return cfg.initial.u_amp * std::sin(p[0]);
  });
  return s;
}

SimState uniform_state(const Grid& g, double rho0, double u0) {
  SimState s;
  s.rho = Field(g, 1, rho0);
  s.u = Field(g, g.dim, u0);
  return s;
}

} // namespace

TEST_CASE("rhs vanishes exactly at the uniform equilibrium", "[evolution]") {
  SimConfig cfg = flagship_config();
  Grid g = cfg.to_grid();
  SimState s = uniform_state(g, 1.0, 0.0);
  KernelCache cache(s.rho, cfg.to_shape(), cfg.to_kernel_params());
  Tendency f = compute_rhs(s, cache);
  for (double v : f.drho.values) REQUIRE(v == 0.0);
  for (double v : f.du.values) REQUIRE(v == 0.0);
}

TEST_CASE("rhs vanishes for constant density and constant velocity", "[evolution]") {
  SimConfig cfg = flagship_config();
  Grid g = cfg.to_grid();
  SimState s = uniform_state(g, 1.0, 0.7);
  KernelCache cache(s.rho, cfg.to_shape(), cfg.to_kernel_params());
  Tendency f = compute_rhs(s, cache);
  REQUIRE(linf_norm(f.drho) <= 1e-12);
  REQUIRE(linf_norm(f.du) <= 1e-12);
}

TEST_CASE("rhs vanishes exactly when the velocity is zero", "[evolution]") {
  SimConfig cfg = flagship_config();
  Grid g = cfg.to_grid();
  SimState s;
  s.rho = make_field(g, 1, [](std::array<double, 2> p, int) {
    return 1.0 + 0.1 * std::cos(p[0]);
  });
  s.u = Field(g, 1, 0.0);
  KernelCache cache(s.rho, cfg.to_shape(), cfg.to_kernel_params());
  Tendency f = compute_rhs(s, cache);
  for (double v : f.drho.values) REQUIRE(v == 0.0);
  for (double v : f.du.values) REQUIRE(v == 0.0);
}

TEST_CASE("cfl_dt: explicit row-sum formula and monotonicity in |u|", "[evolution]") {
  SimConfig cfg = flagship_config(128);
  cfg.kernel.tau = 0.0;
  Grid g = cfg.to_grid();
  SimState s = uniform_state(g, 1.0, 0.0);
  KernelParams p = cfg.to_kernel_params();
  KernelCache cache(s.rho, cfg.to_shape(), p);

  // oracle: Lambda = sum_j w_j h(|z_j|) / |z_j|^{1+alpha} over all offsets
  const StencilRule& st = cache.stencil();
  double lam = 0.0;
  for (std::size_t j = 0; j < st.pair_count(); ++j) {
    double r = st.offset_norm(j);
    lam += 2.0 * st.weights[j] * bump_h(r, p) / std::pow(r, 1.0 + p.alpha);
  }
  double h = g.spacing();
  double expect = cfg.evolution.cfl * std::min(h / 1e-12, std::pow(h, p.alpha) / lam);
  double dt0 = cfl_dt(s, cfg, cache);
  REQUIRE(dt0 == Catch::Approx(expect).epsilon(1e-10));
  REQUIRE(dt0 > 0.0);

  // advection-dominated regime: doubling max|u| halves the step
  SimState fast = uniform_state(g, 1.0, 50.0);
  SimState faster = uniform_state(g, 1.0, 100.0);
  double dta = cfl_dt(fast, cfg, cache);
  double dtb = cfl_dt(faster, cfg, cache);
  REQUIRE(dta == Catch::Approx(2.0 * dtb).epsilon(1e-9));
}

TEST_CASE("step leaves the equilibrium unchanged", "[evolution]") {
  SimConfig cfg = flagship_config();
  Grid g = cfg.to_grid();
  SimState s = uniform_state(g, 1.0, 0.0);
  SimState next = step(s, 1e-3, cfg, cfg.to_shape());
  for (std::size_t i = 0; i < g.size(); ++i) {
    REQUIRE(std::abs(next.rho(i) - 1.0) <= 1e-14);
    REQUIRE(std::abs(next.u(i)) <= 1e-14);
  }
}

TEST_CASE("large viscosity relaxes the density monotonically in H1", "[evolution]") {
  SimConfig cfg = flagship_config();
  cfg.evolution.epsilon = 1.0;
  Grid g = cfg.to_grid();
  SimState s;
  s.rho = make_field(g, 1, [](std::array<double, 2> p, int) {
    return 1.0 + 0.1 * std::cos(p[0]);
  });
  s.u = Field(g, 1, 0.0);
  double prev = sobolev_seminorm(s.rho, 1.0);
  for (int k = 0; k < 5; ++k) {
    s = step(s, 0.05, cfg, cfg.to_shape());
    double cur = sobolev_seminorm(s.rho, 1.0);
    REQUIRE(cur < prev);
    prev = cur;
  }
}

TEST_CASE("observed temporal order of the integrator is about 3", "[evolution]") {
  SimConfig cfg = flagship_config(64);
  cfg.evolution.dt_override = 0.0;
  DomainShape shape = cfg.to_shape();
  double T = 0.04;

  auto advance = [&](double dt) {
    SimState s = flagship_state(cfg);
    int steps = static_cast<int>(std::round(T / dt));
    for (int k = 0; k < steps; ++k) s = step(s, dt, cfg, shape);
    return s;
  };

  SimState a = advance(T / 10.0);
  SimState b = advance(T / 20.0);
  SimState c = advance(T / 40.0);
  double d1 = linf_norm(a.u - b.u);
  double d2 = linf_norm(b.u - c.u);
  double order = std::log2(d1 / d2);
  INFO("d1 = " << d1 << " d2 = " << d2 << " order = " << order);
  REQUIRE(order > 2.6);
  REQUIRE(order < 3.5);
}

TEST_CASE("mass is conserved along a short flagship run", "[evolution]") {
  SimConfig cfg = flagship_config(64);
  cfg.evolution.t_final = 0.1;
  SimState s0 = flagship_state(cfg);
  RunResult r = run(cfg, s0);
  REQUIRE(r.exit_code == 0);
  double m0 = r.records.front().mass;
  double mend = r.records.back().mass;
  REQUIRE(std::abs(mend - m0) <= 1e-12 * m0);
}

TEST_CASE("run with t_final = 0 echoes the initial state", "[evolution]") {
  SimConfig cfg = flagship_config(64);
  cfg.evolution.t_final = 0.0;
  SimState s0 = flagship_state(cfg);
  RunResult r = run(cfg, s0);
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.steps == 0);
  REQUIRE(r.records.size() == 1);
  REQUIRE(r.records.front().t == 0.0);
  REQUIRE(r.final_state.rho.values == s0.rho.values);
}

TEST_CASE("equilibrium run keeps all diagnostics constant", "[evolution]") {
  SimConfig cfg = flagship_config(64);
  cfg.evolution.t_final = 0.05;
  cfg.initial.rho_amp = 0.0;
  cfg.initial.u_amp = 0.0;
  Grid g = cfg.to_grid();
  SimState s0 = uniform_state(g, 1.0, 0.0);
  RunResult r = run(cfg, s0);
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.records.size() >= 2);
  const auto& first = r.records.front();
  for (const auto& rec : r.records) {
    REQUIRE(rec.mass == Catch::Approx(first.mass).epsilon(1e-14));
    REQUIRE(std::abs(rec.momentum[0] - first.momentum[0]) <= 1e-14);
    REQUIRE(rec.rho_min == Catch::Approx(first.rho_min).epsilon(1e-13));
    REQUIRE(rec.alignment_sup <= 1e-13);
    REQUIRE(rec.e_l2 <= 1e-13);
  }
}

TEST_CASE("vacuum during a run aborts with exit code 2", "[evolution]") {
  SimConfig cfg = flagship_config(64);
  cfg.domain.rho_floor = 0.898;
  cfg.evolution.t_final = 1.0;
  Grid g = cfg.to_grid();
  SimState s0;
  s0.rho = make_field(g, 1, [](std::array<double, 2> p, int) {
    return 1.0 + 0.1 * std::cos(p[0]);
  });
  s0.u = make_field(g, 1, [](std::array<double, 2> p, int) {
    return -0.3 * std::sin(p[0]);
  });
  RunResult r = run(cfg, s0);
  REQUIRE(r.exit_code == 2);
  REQUIRE(r.message.find("vacuum") != std::string::npos);
  REQUIRE_FALSE(r.records.empty());
}

TEST_CASE("a reckless time step blows up with exit code 2", "[evolution]") {
  SimConfig cfg = flagship_config(64);
  cfg.evolution.dt_override = 10.0;
  cfg.evolution.t_final = 100.0;
  SimState s0 = flagship_state(cfg);
  RunResult r = run(cfg, s0);
  REQUIRE(r.exit_code == 2);
}

TEST_CASE("initial-state validation rejects vacuum data before stepping",
          "[evolution]") {
  SimConfig cfg = flagship_config(64);
  Grid g = cfg.to_grid();
  SimState s0;
  s0.rho = make_field(g, 1, [](std::array<double, 2> p, int) {
    return 1.0 + std::cos(p[0]); // touches zero
  });
  s0.u = Field(g, 1, 0.0);
  REQUIRE_THROWS_AS(run(cfg, s0), vacuum_error);
}

TEST_CASE("momentum drift stays tiny on a short run", "[evolution]") {
  SimConfig cfg = flagship_config(64);
  cfg.evolution.t_final = 0.2;
  SimState s0 = flagship_state(cfg);
  RunResult r = run(cfg, s0);
  REQUIRE(r.exit_code == 0);
  double scale = r.records.front().mass * 0.2; // mass * max|u0|
  double drift = 0.0;
  for (const auto& rec : r.records)
    drift = std::max(drift, std::abs(rec.momentum[0] - r.records.front().momentum[0]));
  REQUIRE(drift <= 1e-8 * scale);
}
