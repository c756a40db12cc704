#pragma once

#include <limits>
#include <string>
#include <vector>

#include "topoflock/evolution.hpp"

namespace topoflock {

/// One row of monitored quantities along a trajectory.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  std::array<double, 2> momentum = {0.0, 0.0}; // n components used
  double rho_min = 0.0;
  double rho_max = 0.0;
  std::array<double, 2> velocity_amplitude = {0.0, 0.0}; // max - min per component
  double alignment_sup = 0.0;                            // ||u - ubar||_inf
  double e_l2 = 0.0;
  double e_transport_residual = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> ym; // grand quantity for the configured m list
  double dirichlet_u = 0.0;
  double connectivity = 0.0; // inf_x rho(x, t) * (1 + t)

  /// Fixed column order; documented by this header row.
  static std::vector<std::string> columns(int dim, const std::vector<int>& ym_list) {
    std::vector<std::string> c = {"t", "mass"};
    for (int d = 0; d < dim; ++d) c.push_back("momentum_" + std::to_string(d));
    c.push_back("rho_min");
    c.push_back("rho_max");
    for (int d = 0; d < dim; ++d) c.push_back("u_amplitude_" + std::to_string(d));
    c.push_back("alignment_sup");
    c.push_back("e_l2");
    c.push_back("e_transport_residual");
    for (int m : ym_list) c.push_back("y" + std::to_string(m));
    c.push_back("dirichlet_u");
    c.push_back("connectivity");
    return c;
  }

  std::vector<double> row(int dim) const {
    std::vector<double> r = {t, mass};
    for (int d = 0; d < dim; ++d) r.push_back(momentum[d]);
    r.push_back(rho_min);
    r.push_back(rho_max);
    for (int d = 0; d < dim; ++d) r.push_back(velocity_amplitude[d]);
    r.push_back(alignment_sup);
    r.push_back(e_l2);
    r.push_back(e_transport_residual);
    for (double y : ym) r.push_back(y);
    r.push_back(dirichlet_u);
    r.push_back(connectivity);
    return r;
  }
};

/// e = div u + L_phi rho (1D: u_x + L_phi rho).
inline Field e_field(const SimState& state, const KernelCache& cache) {
  cache.require_current(state.rho);
  Field e = spectral_divergence(state.u);
  e += apply_L_phi(state.rho, cache);
  return e;
}

/// Normalized residual of the 1D transport law e_t + (u e)_x = 0, from three
/// equally spaced samples: centered time difference of e against the spectral
/// space derivative of the (dealiased) product u e at the middle sample.
inline double e_transport_residual(const Field& e_prev, const Field& e_mid,
                                   const Field& e_next, const Field& u_mid,
                                   double dt) {
  if (e_mid.grid.dim != 1)
    throw unsupported_dimension_error(
        "e_transport_residual: the transport law is asserted only in 1D");
  if (!(dt > 0.0)) throw argument_error("e_transport_residual: dt must be positive");
  Field flux = dealiased_product(u_mid, 0, e_mid, 0);
  Field dflux = spectral_derivative(flux, 0, 1);
  Field resid(e_mid.grid, 1);
  double inv2dt = 1.0 / (2.0 * dt);
  for (std::size_t i = 0; i < resid.size(); ++i)
    resid(i) = (e_next(i) - e_prev(i)) * inv2dt + dflux(i);
  return l2_mean_norm(resid) / (l2_mean_norm(e_mid) + 1e-30);
}

/// Grand quantity Y_m = ||u||^2_{H^{m+1}} + ||e||^2_{H^m} + ||rho||^2_{H^m}
///                      + max rho + 1/min rho   (homogeneous seminorms).
inline double grand_quantity(const SimState& state, const Field& e, int m) {
  if (m < 0) throw argument_error("grand_quantity: m must be >= 0");
  double rmin = field_min(state.rho);
  if (!(rmin > 0.0)) throw vacuum_error("grand_quantity: min rho <= 0");
  double su = sobolev_seminorm(state.u, m + 1.0);
  double se = sobolev_seminorm(e, static_cast<double>(m));
  double sr = sobolev_seminorm(state.rho, static_cast<double>(m));
  return su * su + se * se + sr * sr + field_max(state.rho) + 1.0 / rmin;
}

struct AlignmentMetrics {
  std::array<double, 2> ubar = {0.0, 0.0};
  double sup_deviation = 0.0;
  std::array<double, 2> amplitude = {0.0, 0.0};
};

/// ubar = (integral of rho u) / (integral of rho), sup |u - ubar|, and the
/// componentwise velocity range.
inline AlignmentMetrics alignment_metrics(const SimState& state) {
  const Grid& g = state.rho.grid;
  int n = g.dim;
  AlignmentMetrics out;
  double mass = 0.0;
  std::array<double, 2> mom = {0.0, 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    mass += state.rho(i);
    for (int c = 0; c < n; ++c) mom[c] += state.rho(i) * state.u(i, c);
  }
  if (!(mass > 0.0)) throw argument_error("alignment_metrics: nonpositive mass");
  for (int c = 0; c < n; ++c) out.ubar[c] = mom[c] / mass;
  for (int c = 0; c < n; ++c) {
    double mn = state.u(0, c), mx = state.u(0, c);
    double dev = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double v = state.u(i, c);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
      dev = std::max(dev, std::abs(v - out.ubar[c]));
    }
    out.amplitude[c] = mx - mn;
    out.sup_deviation = std::max(out.sup_deviation, dev);
  }
  return out;
}

/// Assembles a full record from a state and a current kernel cache.
inline DiagnosticsRecord make_diagnostics(const SimState& state, const KernelCache& cache,
                                          const std::vector<int>& ym_list) {
  const Grid& g = state.rho.grid;
  int n = g.dim;
  double hn = n == 1 ? g.spacing() : g.spacing() * g.spacing();
  DiagnosticsRecord rec;
  rec.t = state.t;
  double mass = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) mass += state.rho(i);
  rec.mass = mass * hn;
  for (int c = 0; c < n; ++c) {
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) m += state.rho(i) * state.u(i, c);
    rec.momentum[c] = m * hn;
  }
  rec.rho_min = field_min(state.rho);
  rec.rho_max = field_max(state.rho);
  AlignmentMetrics am = alignment_metrics(state);
  rec.velocity_amplitude = am.amplitude;
  rec.alignment_sup = am.sup_deviation;
  Field e = e_field(state, cache);
  rec.e_l2 = l2_mean_norm(e);
  rec.ym.reserve(ym_list.size());
  for (int m : ym_list) rec.ym.push_back(grand_quantity(state, e, m));
  rec.dirichlet_u = dirichlet_form(state.u, cache);
  rec.connectivity = rec.rho_min * (1.0 + state.t);
  return rec;
}

} // namespace topoflock
