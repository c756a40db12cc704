#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "topoflock/comm_domain.hpp"
#include "topoflock/stencil.hpp"

namespace topoflock {

enum class BumpProfile { mollifier };

/// Parameters of the topological communication kernel
///   phi(x, y) = h(|x-y|) / (|x-y|^{n+alpha-tau} d^tau(x, y)).
struct KernelParams {
  double alpha = 1.0; // singularity order, in (0, 2)
  double tau = 1.0;   // topological exponent, >= 0 (default n at config resolution)
  double r0 = 0.25 * kTwoPi / 2.0; // communication cutoff (pi/4 for L = 2pi)
  BumpProfile bump = BumpProfile::mollifier;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 2.0))
      throw argument_error("kernel alpha must lie in (0,2)");
    if (tau < 0.0) throw argument_error("kernel tau must be >= 0");
    if (!(r0 > 0.0)) throw argument_error("kernel r0 must be positive");
  }
};

/// Radial C-infinity cutoff: h(r) = exp(1 - 1/(1 - (r/r0)^2)) inside the
/// support, 0 outside; h(0) = 1, nonincreasing.
inline double bump_h(double r, const KernelParams& params) {
  if (r < 0.0) throw argument_error("bump_h: r must be >= 0");
  double t = r / params.r0;
  if (t >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

namespace detail {

inline double pow_tau(double d, double tau) {
  if (tau == 0.0) return 1.0;
  if (tau == 1.0) return d;
  if (tau == 2.0) return d * d;
  return std::pow(d, tau);
}

inline std::uint64_t fnv1a64(const void* data, std::size_t bytes, std::uint64_t h) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::uint64_t fingerprint_rho(const Field& rho, const KernelParams& params) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  h = fnv1a64(rho.values.data(), rho.values.size() * sizeof(double), h);
  double meta[5] = {params.alpha, params.tau, params.r0,
                    static_cast<double>(rho.grid.points), rho.grid.length};
  return fnv1a64(meta, sizeof(meta), h);
}

} // namespace detail

/// Communication kernel at a point pair (minimal periodic image). Returns 0
/// beyond the cutoff without touching the density.
inline double phi(std::array<double, 2> x, std::array<double, 2> y,
                  const DensityAccumulator& acc, const DomainShape& shape,
                  const KernelParams& params) {
  const Grid& g = acc.grid();
  int n = g.dim;
  double zx = g.wrap_diff(y[0] - x[0]);
  double zy = n == 2 ? g.wrap_diff(y[1] - x[1]) : 0.0;
  double r = std::sqrt(zx * zx + zy * zy);
  if (r == 0.0) throw singular_point_error("phi: evaluation at x == y");
  double hb = bump_h(r, params);
  if (hb == 0.0) return 0.0;
  double denom = std::pow(r, n + params.alpha - params.tau);
  if (params.tau > 0.0) {
    double d = topo_distance(acc, shape, x, y);
    denom *= detail::pow_tau(d, params.tau);
  }
  return hb / denom;
}

/// Table of phi(x_i, x_i + z_j) over all grid points and stencil offsets,
/// built once per density snapshot. Only the canonical offset half is stored;
/// the entry for (x_i, x_i - z_j) aliases the one for (x_{i-z_j}, x_{i-z_j} + z_j),
/// which makes the weighted table symmetric exactly, entry by entry.
class KernelCache {
public:
  KernelCache(const Field& rho, const DomainShape& shape, const KernelParams& params,
              double rho_floor = 1e-8)
      : grid_(rho.grid), params_(params),
        stencil_(make_stencil(rho.grid, params.r0)),
        fingerprint_(detail::fingerprint_rho(rho, params)) {
    params.validate();
    DensityAccumulator acc(rho, rho_floor);
    const Grid& g = grid_;
    int n = g.dim;
    double h = g.spacing();
    std::size_t npts = g.size();
    std::size_t npairs = stencil_.pair_count();
    planes_.assign(npairs, std::vector<double>(npts, 0.0));

    for (std::size_t j = 0; j < npairs; ++j) {
      double r = stencil_.offset_norm(j);
      double hb = bump_h(r, params);
      std::vector<double>& plane = planes_[j];
      if (hb == 0.0) continue;
      double cj = hb / std::pow(r, n + params.alpha - params.tau);
      if (params.tau == 0.0) {
        for (std::size_t i = 0; i < npts; ++i) plane[i] = cj;
        continue;
      }
      if (n == 1) {
        int steps = stencil_.offsets[j][0];
        for (std::size_t i = 0; i < npts; ++i) {
          double mass = acc.arc_mass_cells(static_cast<int>(i), steps);
          if (!(mass > 0.0)) throw vacuum_error("kernel cache: nonpositive arc mass");
          plane[i] = cj / detail::pow_tau(mass, params.tau);
        }
      } else {
        // Same arithmetic as omega_mass with x at a grid point and y = x + z.
        double zx = stencil_.offsets[j][0] * h;
        double zy = stencil_.offsets[j][1] * h;
        double s = 0.5 * r;
        auto e = detail::canonical_direction({zx / r, zy / r});
        std::size_t nq = shape.nodes.size();
        std::vector<double> relx(nq), rely(nq);
        for (std::size_t q = 0; q < nq; ++q) {
          const auto& xi = shape.nodes[q];
          relx[q] = s * (e[0] * xi[0] - e[1] * xi[1]);
          rely[q] = s * (e[1] * xi[0] + e[0] * xi[1]);
        }
        double s2 = s * s;
        double half_tau = 0.5 * params.tau; // d^tau = mass^{tau/2} in 2D
        for (std::size_t i = 0; i < npts; ++i) {
          auto p = g.point(i);
          double mx = p[0] + 0.5 * zx, my = p[1] + 0.5 * zy;
          double m = 0.0;
          for (std::size_t q = 0; q < nq; ++q)
            m += shape.weights[q] * acc.sample(mx + relx[q], my + rely[q]);
          m *= s2;
          if (!(m > 0.0)) throw vacuum_error("kernel cache: nonpositive communication mass");
          plane[i] = cj / detail::pow_tau(m, half_tau);
        }
      }
    }
  }

  const Grid& grid() const { return grid_; }
  const KernelParams& params() const { return params_; }
  const StencilRule& stencil() const { return stencil_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  /// phi(x_i, x_i + z_j) for canonical offset j.
  double phi_plus(std::size_t j, std::size_t i) const { return planes_[j][i]; }
  /// phi(x_i, x_i - z_j); aliases the symmetric entry.
  double phi_minus(std::size_t j, std::size_t i) const {
    return planes_[j][stencil_.bwd[j][i]];
  }

  const std::vector<double>& plane(std::size_t j) const { return planes_[j]; }

  bool matches(const Field& rho) const {
    return detail::fingerprint_rho(rho, params_) == fingerprint_;
  }

  void require_current(const Field& rho) const {
    if (!matches(rho))
      throw consistency_error("kernel cache is stale: density changed since build");
  }

private:
  Grid grid_;
  KernelParams params_;
  StencilRule stencil_;
  std::uint64_t fingerprint_;
  std::vector<std::vector<double>> planes_;
};

/// Convenience builder mirroring the spec operation name.
inline KernelCache build_kernel_cache(const Field& rho, const DomainShape& shape,
                                      const KernelParams& params, double rho_floor = 1e-8) {
  return KernelCache(rho, shape, params, rho_floor);
}

} // namespace topoflock
