#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "topoflock/grid.hpp"

namespace topoflock {

/// Quadrature rule in the integration variable z of the alignment operator:
/// nonzero grid translates with |z| <= r0, uniform weight h^n. Offsets are
/// stored as a canonical half; each entry implicitly represents the +/- pair,
/// so the rule is closed under negation with equal weights by construction.
struct StencilRule {
  Grid grid;
  double r0 = 0.0;
  std::vector<std::array<int, 2>> offsets; // canonical half: (p>0) or (p==0, q>0)
  std::vector<double> weights;             // h^n per offset
  // Wrapped flat-index permutations: fwd[j][i] = index of x_i + z_j,
  // bwd[j][i] = index of x_i - z_j.
  std::vector<std::vector<std::uint32_t>> fwd;
  std::vector<std::vector<std::uint32_t>> bwd;

  std::size_t pair_count() const { return offsets.size(); }

  /// Physical offset vector of canonical entry j.
  std::array<double, 2> offset_vector(std::size_t j) const {
    double h = grid.spacing();
    return {offsets[j][0] * h, offsets[j][1] * h};
  }

  double offset_norm(std::size_t j) const {
    auto z = offset_vector(j);
    return std::sqrt(z[0] * z[0] + z[1] * z[1]);
  }
};

inline StencilRule make_stencil(const Grid& grid, double r0) {
  if (!(r0 > 0.0)) throw argument_error("stencil: r0 must be positive");
  if (r0 > 0.25 * grid.length)
    throw argument_error("stencil: r0 must not exceed L/4 (periodic image safety)");
  StencilRule s;
  s.grid = grid;
  s.r0 = r0;
  double h = grid.spacing();
  double wn = grid.dim == 1 ? h : h * h;
  int qmax = static_cast<int>(r0 / h);
  if (grid.dim == 1) {
    for (int p = 1; p <= qmax; ++p)
      if (p * h <= r0) {
        s.offsets.push_back({p, 0});
        s.weights.push_back(wn);
      }
  } else {
    for (int p = -qmax; p <= qmax; ++p)
      for (int q = -qmax; q <= qmax; ++q) {
        if (p == 0 && q == 0) continue;
        if (!(p > 0 || (p == 0 && q > 0))) continue; // canonical half
        double r = h * std::sqrt(static_cast<double>(p) * p + static_cast<double>(q) * q);
        if (r <= r0) {
          s.offsets.push_back({p, q});
          s.weights.push_back(wn);
        }
      }
  }
  if (s.offsets.empty())
    throw argument_error("stencil: no grid offsets inside r0; refine the grid");

  std::size_t npts = grid.size();
  s.fwd.resize(s.offsets.size());
  s.bwd.resize(s.offsets.size());
  for (std::size_t j = 0; j < s.offsets.size(); ++j) {
    s.fwd[j].resize(npts);
    s.bwd[j].resize(npts);
    int p = s.offsets[j][0], q = s.offsets[j][1];
    if (grid.dim == 1) {
      int n = grid.points;
      for (int i = 0; i < n; ++i) {
        s.fwd[j][i] = static_cast<std::uint32_t>((i + p) % n);
        s.bwd[j][i] = static_cast<std::uint32_t>((i - p + n) % n);
      }
    } else {
      int n = grid.points;
      for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy) {
          std::size_t i = static_cast<std::size_t>(ix) * n + iy;
          s.fwd[j][i] = static_cast<std::uint32_t>(grid.wrap_index(ix + p, iy + q));
          s.bwd[j][i] = static_cast<std::uint32_t>(grid.wrap_index(ix - p, iy - q));
        }
    }
  }
  return s;
}

} // namespace topoflock
