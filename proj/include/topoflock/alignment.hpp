#pragma once

#include "topoflock/kernel.hpp"

namespace topoflock {

/// Discrete singular alignment operator
///   (L_phi f)(x_i) = sum_j w_j phi(x_i, x_i + z_j) (f(x_i + z_j) - f(x_i)),
/// applied componentwise. Each +/- offset pair is summed before accumulation:
/// for smooth f the pair forms a second difference, which tames the
/// |z|^{-n-alpha} singularity for every alpha < 2.
inline Field apply_L_phi(const Field& f, const KernelCache& cache) {
  if (!(f.grid == cache.grid()))
    throw argument_error("apply_L_phi: field grid does not match cache grid");
  const StencilRule& st = cache.stencil();
  std::size_t npts = f.size();
  Field out(f.grid, f.components);
  for (int c = 0; c < f.components; ++c) {
    for (std::size_t j = 0; j < st.pair_count(); ++j) {
      double w = st.weights[j];
      const double* plane = cache.plane(j).data();
      const std::uint32_t* fwd = st.fwd[j].data();
      const std::uint32_t* bwd = st.bwd[j].data();
      for (std::size_t i = 0; i < npts; ++i) {
        double fi = f(i, c);
        double pair = plane[i] * (f(fwd[i], c) - fi) + plane[bwd[i]] * (f(bwd[i], c) - fi);
        out(i, c) += w * pair;
      }
    }
  }
  return out;
}

/// Alignment force C_phi(u, rho)(x) = sum_j w_j phi(x, x+z_j) d_z u(x) rho(x+z_j),
/// componentwise, with the same +/- pairing as apply_L_phi.
inline Field apply_C_phi(const Field& u, const Field& rho, const KernelCache& cache) {
  cache.require_current(rho);
  if (!(u.grid == cache.grid()))
    throw argument_error("apply_C_phi: field grid does not match cache grid");
  const StencilRule& st = cache.stencil();
  std::size_t npts = u.size();
  Field out(u.grid, u.components);
  for (int c = 0; c < u.components; ++c) {
    for (std::size_t j = 0; j < st.pair_count(); ++j) {
      double w = st.weights[j];
      const double* plane = cache.plane(j).data();
      const std::uint32_t* fwd = st.fwd[j].data();
      const std::uint32_t* bwd = st.bwd[j].data();
      for (std::size_t i = 0; i < npts; ++i) {
        double ui = u(i, c);
        double pair = plane[i] * (u(fwd[i], c) - ui) * rho(fwd[i]) +
                      plane[bwd[i]] * (u(bwd[i], c) - ui) * rho(bwd[i]);
        out(i, c) += w * pair;
      }
    }
  }
  return out;
}

/// Algebraic identity route C_phi(u, rho) = L_phi(u rho) - u L_phi(rho),
/// exposed for cross-validation of the direct form.
inline Field apply_C_phi_identity(const Field& u, const Field& rho,
                                  const KernelCache& cache) {
  cache.require_current(rho);
  Field urho(u.grid, u.components);
  for (std::size_t i = 0; i < u.size(); ++i)
    for (int c = 0; c < u.components; ++c) urho(i, c) = u(i, c) * rho(i);
  Field l_urho = apply_L_phi(urho, cache);
  Field l_rho = apply_L_phi(rho, cache);
  Field out(u.grid, u.components);
  for (std::size_t i = 0; i < u.size(); ++i)
    for (int c = 0; c < u.components; ++c)
      out(i, c) = l_urho(i, c) - u(i, c) * l_rho(i);
  return out;
}

/// Nonlocal Dirichlet energy
///   (1/2) sum_{i,j} w_j phi(x_i, x_i+z_j) |d_{z_j} f(x_i)|^2 h^n >= 0,
/// computed by the symmetrized double sum (equal to -<L_phi f, f> h^n when
/// the kernel table is symmetric; the identity is a test cross-check).
inline double dirichlet_form(const Field& f, const KernelCache& cache) {
  if (!(f.grid == cache.grid()))
    throw argument_error("dirichlet_form: field grid does not match cache grid");
  const StencilRule& st = cache.stencil();
  double hn = f.grid.dim == 1 ? f.grid.spacing()
                              : f.grid.spacing() * f.grid.spacing();
  std::size_t npts = f.size();
  double acc = 0.0;
  for (int c = 0; c < f.components; ++c) {
    for (std::size_t j = 0; j < st.pair_count(); ++j) {
      double w = st.weights[j];
      const double* plane = cache.plane(j).data();
      const std::uint32_t* fwd = st.fwd[j].data();
      const std::uint32_t* bwd = st.bwd[j].data();
      double sj = 0.0;
      for (std::size_t i = 0; i < npts; ++i) {
        double fi = f(i, c);
        double dp = f(fwd[i], c) - fi;
        double dm = f(bwd[i], c) - fi;
        sj += plane[i] * dp * dp + plane[bwd[i]] * dm * dm;
      }
      acc += 0.5 * w * sj;
    }
  }
  return acc * hn;
}

/// -<L_phi f, f> h^n, the inner-product route to the Dirichlet energy.
inline double alignment_energy_inner(const Field& f, const KernelCache& cache) {
  Field lf = apply_L_phi(f, cache);
  double hn = f.grid.dim == 1 ? f.grid.spacing()
                              : f.grid.spacing() * f.grid.spacing();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    for (int c = 0; c < f.components; ++c) acc += lf(i, c) * f(i, c);
  return -acc * hn;
}

} // namespace topoflock
