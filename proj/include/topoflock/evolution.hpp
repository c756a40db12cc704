#pragma once

#include "topoflock/alignment.hpp"
#include "topoflock/simconfig.hpp"
#include "topoflock/spectral.hpp"

namespace topoflock {

/// Instantaneous solver state.
struct SimState {
  Field rho; // c = 1
  Field u;   // c = n
  double t = 0.0;
};

struct Tendency {
  Field drho;
  Field du;
};

/// Inviscid tendencies of the Euler-alignment system:
///   drho/dt = -div(rho u)            (spectral divergence of the dealiased flux)
///   du/dt   = -(u . grad) u + C_phi(u, rho)
/// The eps Laplacian terms are handled exactly in step(), not here.
inline Tendency compute_rhs(const SimState& state, const KernelCache& cache) {
  cache.require_current(state.rho);
  const Grid& g = state.rho.grid;
  int n = g.dim;

  Tendency out;
  out.drho = Field(g, 1);
  for (int d = 0; d < n; ++d) {
    Field flux = dealiased_product(state.rho, 0, state.u, d);
    out.drho -= spectral_derivative(flux, d, 1);
  }

  Field calign = apply_C_phi(state.u, state.rho, cache);
  out.du = Field(g, n);
  for (int c = 0; c < n; ++c) {
    Field adv(g, 1);
    for (int d = 0; d < n; ++d) {
      Field duc = spectral_derivative(component(state.u, c), d, 1);
      for (std::size_t i = 0; i < g.size(); ++i) adv(i) += state.u(i, d) * duc(i);
    }
    adv = dealias(adv);
    for (std::size_t i = 0; i < g.size(); ++i) out.du(i, c) = -adv(i) + calign(i, c);
  }
  return out;
}

/// Stable step size: cfl * min(advective, alignment-dissipation candidates).
/// Lambda_diss is the largest row sum of the discrete alignment operator,
/// max_i sum_j w_j phi(x_i, x_i + z_j) rho(x_i + z_j).
inline double cfl_dt(const SimState& state, const SimConfig& config,
                     const KernelCache& cache) {
  const Grid& g = state.rho.grid;
  double h = g.spacing();
  double umax = linf_norm(state.u);
  double advective = h / (umax + 1e-12);

  const StencilRule& st = cache.stencil();
  double lam = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < st.pair_count(); ++j)
      row += st.weights[j] * (cache.phi_plus(j, i) * state.rho(st.fwd[j][i]) +
                              cache.phi_minus(j, i) * state.rho(st.bwd[j][i]));
    lam = std::max(lam, row);
  }
  double dissipative = std::pow(h, cache.params().alpha) / lam;
  return config.evolution.cfl * std::min(advective, dissipative);
}

namespace detail {

inline void check_stage(const Field& rho, double rho_floor, double t) {
  double mn = field_min(rho);
  if (!(mn > rho_floor))
    throw vacuum_error("density reached the vacuum floor (min rho = " +
                       std::to_string(mn) + ") near t = " + std::to_string(t));
}

} // namespace detail

/// One SSP-RK3 step of the inviscid system, with the kernel cache rebuilt at
/// every stage from the stage density. The eps Laplacian is applied exactly
/// through the heat semigroup, split symmetrically around the explicit body,
/// so the k = 0 mode of rho (the mass) is untouched by viscosity.
inline SimState step(const SimState& state, double dt, const SimConfig& config,
                     const DomainShape& shape,
                     const KernelCache* first_stage_cache = nullptr) {
  const KernelParams params = config.to_kernel_params();
  double eps = config.evolution.epsilon;
  double floor = config.domain.rho_floor;

  SimState s = state;
  if (eps > 0.0) {
    s.rho = heat_semigroup(s.rho, eps, 0.5 * dt);
    s.u = heat_semigroup(s.u, eps, 0.5 * dt);
  }

  auto stage_rhs = [&](const SimState& st) {
    detail::check_stage(st.rho, floor, state.t);
    KernelCache cache(st.rho, shape, params, floor);
    return compute_rhs(st, cache);
  };

  // Shu-Osher stages; a caller-provided cache for the unmodified first-stage
  // density (eps = 0 path) saves one rebuild.
  Tendency f0;
  if (first_stage_cache != nullptr && eps == 0.0 && first_stage_cache->matches(s.rho)) {
    detail::check_stage(s.rho, floor, state.t);
    f0 = compute_rhs(s, *first_stage_cache);
  } else {
    f0 = stage_rhs(s);
  }
  SimState s1{s.rho, s.u, s.t};
  for (std::size_t i = 0; i < s1.rho.values.size(); ++i)
    s1.rho.values[i] += dt * f0.drho.values[i];
  for (std::size_t i = 0; i < s1.u.values.size(); ++i)
    s1.u.values[i] += dt * f0.du.values[i];

  Tendency f1 = stage_rhs(s1);
  SimState s2{Field(s.rho.grid, 1), Field(s.u.grid, s.u.components), s.t};
  for (std::size_t i = 0; i < s2.rho.values.size(); ++i)
    s2.rho.values[i] = 0.75 * s.rho.values[i] +
                       0.25 * (s1.rho.values[i] + dt * f1.drho.values[i]);
  for (std::size_t i = 0; i < s2.u.values.size(); ++i)
    s2.u.values[i] = 0.75 * s.u.values[i] +
                     0.25 * (s1.u.values[i] + dt * f1.du.values[i]);

  Tendency f2 = stage_rhs(s2);
  SimState out{Field(s.rho.grid, 1), Field(s.u.grid, s.u.components), state.t + dt};
  double c13 = 1.0 / 3.0, c23 = 2.0 / 3.0;
  for (std::size_t i = 0; i < out.rho.values.size(); ++i)
    out.rho.values[i] = c13 * s.rho.values[i] +
                        c23 * (s2.rho.values[i] + dt * f2.drho.values[i]);
  for (std::size_t i = 0; i < out.u.values.size(); ++i)
    out.u.values[i] = c13 * s.u.values[i] +
                      c23 * (s2.u.values[i] + dt * f2.du.values[i]);

  if (eps > 0.0) {
    out.rho = heat_semigroup(out.rho, eps, 0.5 * dt);
    out.u = heat_semigroup(out.u, eps, 0.5 * dt);
  }

  if (!out.rho.is_finite()) throw blowup_error(out.t, "rho");
  if (!out.u.is_finite()) throw blowup_error(out.t, "u");
  return out;
}

} // namespace topoflock
