#pragma once

#include <string>
#include <vector>

#include "topoflock/comm_domain.hpp"
#include "topoflock/kernel.hpp"

namespace topoflock {

/// Raw configuration, mirroring the INI sections one to one. Field values
/// are what the parser writes; resolution to domain objects happens in the
/// to_* helpers after validate().
struct SimConfig {
  struct GridSection {
    int dim = 1;
    int points = 256;
    double length = kTwoPi;
    bool operator==(const GridSection&) const = default;
  } grid;

  struct KernelSection {
    double alpha = 1.0;
    double tau = -1.0; // < 0 means "default to n", resolved by resolve()
    double r0 = kTwoPi / 8.0; // pi/4 for L = 2pi
    std::string bump = "mollifier";
    bool operator==(const KernelSection&) const = default;
  } kernel;

  struct DomainSection {
    double lens_half_angle = 0.78539816339744831; // pi/4
    int quad_points = 16;
    double rho_floor = 1e-8;
    bool operator==(const DomainSection&) const = default;
  } domain;

  struct EvolutionSection {
    double epsilon = 0.0;
    double cfl = 0.45;
    double t_final = 1.0;
    double dt_override = 0.0; // 0 -> CFL-driven
    bool operator==(const EvolutionSection&) const = default;
  } evolution;

  struct InitialSection {
    double rho_mean = 1.0;
    double rho_amp = 0.5;
    int rho_mode_x = 1;
    int rho_mode_y = 0;
    double u_amp = 0.2;
    int u_mode_x = 1;
    int u_mode_y = 0;
    double u2_amp = 0.0; // second velocity component (2D)
    int u2_mode_x = 0;
    int u2_mode_y = 1;
    std::string rho_file; // snapshot overrides when nonempty
    std::string u_file;
    bool operator==(const InitialSection&) const = default;
  } initial;

  struct OutputSection {
    int diag_stride = 1;      // diagnostics every this many steps
    bool write_snapshots = true;
    bool e_residual = false;  // emit the 1D transport-law residual column
    std::vector<int> ym = {0, 1};
    bool operator==(const OutputSection&) const = default;
  } output;

  struct StudySection {
    std::vector<double> eps_list = {1e-2, 5e-3, 2.5e-3, 0.0};
    double t_study = 0.5;
    int theta_samples = 16;
    int family_size = 50;
    int band_lo = 4;
    int band_hi = 0; // 0 -> N/8
    std::vector<double> s_list = {0.5, 1.0, 1.5};
    std::vector<int> m_list = {1, 2};
    bool operator==(const StudySection&) const = default;
  } study;

  bool operator==(const SimConfig&) const = default;

  /// Fills derived defaults (tau -> n).
  void resolve() {
    if (kernel.tau < 0.0) kernel.tau = static_cast<double>(grid.dim);
  }

  void validate() const {
    if (grid.dim != 1 && grid.dim != 2)
      throw constraint_error("grid.dim", "must be 1 or 2");
    if (grid.points < 8 || (grid.points & (grid.points - 1)) != 0)
      throw constraint_error("grid.points", "must be a power of two >= 8");
    if (!(grid.length > 0.0))
      throw constraint_error("grid.length", "must be positive");
    if (!(kernel.alpha > 0.0 && kernel.alpha < 2.0))
      throw constraint_error("kernel.alpha", "alpha must lie in (0,2)");
    if (kernel.tau < 0.0)
      throw constraint_error("kernel.tau", "must be >= 0 (resolve() not applied?)");
    if (!(kernel.r0 > 0.0))
      throw constraint_error("kernel.r0", "must be positive");
    if (kernel.r0 > 0.25 * grid.length)
      throw constraint_error("kernel.r0", "must not exceed L/4");
    if (kernel.bump != "mollifier")
      throw constraint_error("kernel.bump", "unknown bump profile '" + kernel.bump + "'");
    if (grid.dim == 2 &&
        !(domain.lens_half_angle > 0.0 && domain.lens_half_angle < 0.5 * M_PI))
      throw constraint_error("domain.lens_half_angle", "must lie in (0, pi/2)");
    if (domain.quad_points < 16)
      throw constraint_error("domain.quad_points", "must be >= 16");
    if (!(domain.rho_floor > 0.0))
      throw constraint_error("domain.rho_floor", "must be positive");
    if (!(evolution.epsilon >= 0.0))
      throw constraint_error("evolution.epsilon", "must be >= 0");
    if (!(evolution.cfl > 0.0 && evolution.cfl <= 1.0))
      throw constraint_error("evolution.cfl", "must lie in (0, 1]");
    if (!(evolution.t_final >= 0.0))
      throw constraint_error("evolution.t_final", "must be >= 0");
    if (evolution.dt_override < 0.0)
      throw constraint_error("evolution.dt_override", "must be >= 0");
    if (output.diag_stride < 1)
      throw constraint_error("output.diag_stride", "must be >= 1");
    for (int m : output.ym)
      if (m < 0) throw constraint_error("output.ym", "orders must be >= 0");
    if (study.t_study < 0.0)
      throw constraint_error("study.t_study", "must be >= 0");
    if (study.theta_samples < 1)
      throw constraint_error("study.theta_samples", "must be >= 1");
    if (study.family_size < 1)
      throw constraint_error("study.family_size", "must be >= 1");
    if (study.band_lo < 1)
      throw constraint_error("study.band_lo", "must be >= 1");
  }

  Grid to_grid() const { return Grid(grid.dim, grid.points, grid.length); }

  DomainShape to_shape() const {
    return grid.dim == 1 ? make_domain_shape(1)
                         : make_domain_shape(2, domain.lens_half_angle, domain.quad_points);
  }

  KernelParams to_kernel_params() const {
    KernelParams p;
    p.alpha = kernel.alpha;
    p.tau = kernel.tau;
    p.r0 = kernel.r0;
    p.bump = BumpProfile::mollifier;
    return p;
  }
};

} // namespace topoflock
