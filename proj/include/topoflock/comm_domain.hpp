#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "topoflock/grid.hpp"

namespace topoflock {

namespace detail {

/// Gauss-Legendre nodes/weights on [-1, 1]. Nodes are built as exact +/-
/// mirror pairs so downstream node sets are negation-symmetric bitwise.
inline void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(q, 0.0);
  weights.assign(q, 0.0);
  int half = q / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev initial guess for the i-th positive root, Newton refinement.
    double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < q; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = q * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    nodes[i] = -x;
    nodes[q - 1 - i] = x;
    weights[i] = w;
    weights[q - 1 - i] = w;
  }
  if (q % 2 == 1) {
    // Central node at exactly zero; P_q'(0) = q P_{q-1}(0).
    double p0 = 1.0, p1 = 0.0;
    for (int j = 0; j < q; ++j) {
      double p2 = p1;
      p1 = p0;
      p0 = -static_cast<double>(j) * p2 / (j + 1.0);
    }
    double pp = static_cast<double>(q) * p1;
    nodes[half] = 0.0;
    weights[half] = 2.0 / (pp * pp);
  }
}

} // namespace detail

enum class DomainKind { interval, lens };

/// Reference communication domain Omega_0 = Omega(-e1, e1) with its
/// quadrature rule. 1D is the interval [-1, 1] (integrated exactly through
/// density prefix sums); 2D is a circular lens through +/- e1 whose tips
/// open with interior half-angle beta.
struct DomainShape {
  int dim = 1;
  DomainKind kind = DomainKind::interval;
  double lens_half_angle = 0.0; // beta, 2D only
  std::vector<std::array<double, 2>> nodes;
  std::vector<double> weights;
  double reference_area = 2.0;  // closed form |Omega_0|
  double weight_sum = 2.0;      // quadrature realization of |Omega_0|

  /// |Omega_0| / 2^n, the proportionality constant in |Omega(x,y)| =
  /// c * |x-y|^n, as realized by the quadrature weights.
  double scale_constant() const {
    return dim == 1 ? 0.5 * weight_sum : 0.25 * weight_sum;
  }
};

/// Lens upper boundary g(a) >= 0 for |a| <= 1, written in the form that is
/// analytic across the tips: g = (1 - a^2) / (sqrt(R^2 - a^2) + c).
inline double lens_boundary(double a, double beta) {
  double c = 1.0 / std::tan(beta);
  double R2 = 1.0 + c * c;
  return (1.0 - a * a) / (std::sqrt(R2 - a * a) + c);
}

/// Closed-form lens area 2 (R^2 beta - c) with R = 1/sin(beta), c = cot(beta).
inline double lens_area(double beta) {
  double c = 1.0 / std::tan(beta);
  double R2 = 1.0 + c * c;
  return 2.0 * (R2 * beta - c);
}

inline DomainShape make_domain_shape(int dim, double lens_half_angle = 0.0,
                                     int quad_points = 16) {
  if (dim != 1 && dim != 2) throw argument_error("domain dim must be 1 or 2");
  DomainShape s;
  s.dim = dim;
  if (dim == 1) {
    s.kind = DomainKind::interval;
    s.reference_area = 2.0;
    s.weight_sum = 2.0;
    return s;
  }
  if (!(lens_half_angle > 0.0 && lens_half_angle < 0.5 * M_PI))
    throw argument_error("lens_half_angle must lie in (0, pi/2)");
  if (quad_points < 16) throw argument_error("quad_points must be >= 16");

  s.kind = DomainKind::lens;
  s.lens_half_angle = lens_half_angle;
  s.reference_area = lens_area(lens_half_angle);

  // Tensor Gauss rule: a-nodes along the chord, b-nodes scaled to the local
  // half-thickness g(a). Mirror pairs of the 1D rule make the node set
  // invariant under each coordinate flip (and hence under negation, D2).
  std::vector<double> gn, gw;
  detail::gauss_legendre(quad_points, gn, gw);
  s.nodes.reserve(static_cast<std::size_t>(quad_points) * quad_points);
  s.weights.reserve(static_cast<std::size_t>(quad_points) * quad_points);
  for (int i = 0; i < quad_points; ++i) {
    double a = gn[i];
    double g = lens_boundary(std::abs(a), lens_half_angle);
    for (int j = 0; j < quad_points; ++j) {
      s.nodes.push_back({a, g * gn[j]});
      s.weights.push_back(gw[i] * gw[j] * g);
    }
  }
  double ws = 0.0;
  for (double w : s.weights) ws += w;
  s.weight_sum = ws;
  return s;
}

/// Frozen snapshot of a density field, queryable for masses of communication
/// domains. 1D carries trapezoid prefix sums (piecewise-linear density
/// integrated exactly); 2D carries a periodic bilinear interpolant.
class DensityAccumulator {
public:
  DensityAccumulator(const Field& rho, double rho_floor = 1e-8)
      : grid_(rho.grid), rho_(rho.values), floor_(rho_floor) {
    if (rho.components != 1)
      throw argument_error("density accumulator needs a scalar field");
    double mn = field_min(rho);
    if (!(mn > rho_floor))
      throw vacuum_error("density at or below the vacuum floor (min rho = " +
                         std::to_string(mn) + ")");
    if (grid_.dim == 1) {
      // Compensated (Kahan) accumulation: prefix differences over short arcs
      // must stay accurate relative to the arc mass, not the total mass.
      int n = grid_.points;
      double h = grid_.spacing();
      prefix_.assign(n + 1, 0.0);
      double sum = 0.0, comp = 0.0;
      for (int i = 0; i < n; ++i) {
        double cell = 0.5 * h * (rho_[i] + rho_[(i + 1) % n]);
        double y = cell - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        prefix_[i + 1] = sum;
      }
    }
  }

  const Grid& grid() const { return grid_; }
  double total_mass() const {
    if (grid_.dim == 1) return prefix_.back();
    double s = 0.0;
    for (double v : rho_) s += v;
    double h = grid_.spacing();
    return s * h * h;
  }

  /// 1D cumulative mass from 0 to x (x may be any real; periodic extension).
  double cumulative(double x) const {
    double L = grid_.length;
    double wraps = std::floor(x / L);
    double xr = x - wraps * L;
    double h = grid_.spacing();
    int n = grid_.points;
    int i = std::min(static_cast<int>(xr / h), n - 1);
    double xi = xr - i * h;
    double r0 = rho_[i], r1 = rho_[(i + 1) % n];
    double part = r0 * xi + (r1 - r0) * xi * xi / (2.0 * h);
    return wraps * prefix_[n] + prefix_[i] + part;
  }

  /// 1D mass of the arc between unwrapped coordinates a <= b.
  double arc_mass(double a, double b) const { return cumulative(b) - cumulative(a); }

  /// 1D mass of the cell-aligned arc of `steps` cells starting at grid index
  /// i0 (exact prefix difference; used by the kernel hot path).
  double arc_mass_cells(int i0, int steps) const {
    int n = grid_.points;
    int j = i0 + steps;
    if (j <= n) return prefix_[j] - prefix_[i0];
    return prefix_[n] - prefix_[i0] + prefix_[j - n];
  }

  /// 2D periodic bilinear sample; reproduces rho exactly at grid nodes
  /// (coordinates within 1e-10 cells of a node snap onto it).
  double sample(double px, double py) const {
    double L = grid_.length, h = grid_.spacing();
    int n = grid_.points;
    px -= L * std::floor(px / L);
    py -= L * std::floor(py / L);
    auto locate = [&](double p, int& idx, double& frac) {
      double t = p / h;
      double rn = std::nearbyint(t);
      if (std::abs(t - rn) < 1e-10) {
        idx = static_cast<int>(rn) % n;
        frac = 0.0;
      } else {
        idx = std::min(static_cast<int>(t), n - 1);
        frac = t - idx;
      }
    };
    int ix, iy;
    double fx, fy;
    locate(px, ix, fx);
    locate(py, iy, fy);
    int jx = (ix + 1) % n, jy = (iy + 1) % n;
    const double* r = rho_.data();
    double v00 = r[static_cast<std::size_t>(ix) * n + iy];
    double v10 = r[static_cast<std::size_t>(jx) * n + iy];
    double v01 = r[static_cast<std::size_t>(ix) * n + jy];
    double v11 = r[static_cast<std::size_t>(jx) * n + jy];
    return (1.0 - fx) * ((1.0 - fy) * v00 + fy * v01) + fx * ((1.0 - fy) * v10 + fy * v11);
  }

  double rho_floor() const { return floor_; }

private:
  Grid grid_;
  std::vector<double> rho_;
  double floor_;
  std::vector<double> prefix_; // 1D only, size N+1
};

namespace detail {

/// Canonical unit direction for an unordered point pair: flips sign so the
/// same rotation (and hence the same quadrature node sequence, bit for bit)
/// is used for (x, y) and (y, x).
inline std::array<double, 2> canonical_direction(std::array<double, 2> e) {
  if (e[0] < 0.0 || (e[0] == 0.0 && e[1] < 0.0)) return {-e[0], -e[1]};
  return e;
}

} // namespace detail

/// Mass of the communication domain Omega(x, y) = midpoint + (|x-y|/2) U Omega_0,
/// where U rotates e1 onto the pair direction. Exact in 1D (prefix sums);
/// reference-quadrature plus bilinear sampling in 2D.
inline double omega_mass(const DensityAccumulator& acc, const DomainShape& shape,
                         std::array<double, 2> x, std::array<double, 2> y) {
  const Grid& g = acc.grid();
  if (shape.dim != g.dim) throw argument_error("omega_mass: shape/grid dim mismatch");
  double zx = g.wrap_diff(y[0] - x[0]);
  double zy = g.dim == 2 ? g.wrap_diff(y[1] - x[1]) : 0.0;
  double r = std::sqrt(zx * zx + zy * zy);
  if (r == 0.0) throw degenerate_pair_error("omega_mass: x == y");
  // Canonicalize the pair: anchor at the endpoint from which the canonical
  // direction points, so (x, y) and (y, x) run the identical arithmetic.
  bool flip = zx < 0.0 || (zx == 0.0 && zy < 0.0);
  const std::array<double, 2>& base = flip ? y : x;
  if (flip) {
    zx = -zx;
    zy = -zy;
  }
  if (g.dim == 1) return acc.arc_mass(base[0], base[0] + zx);
  double s = 0.5 * r;
  std::array<double, 2> mid = {base[0] + 0.5 * zx, base[1] + 0.5 * zy};
  std::array<double, 2> e = {zx / r, zy / r};
  double m = 0.0;
  double s2 = s * s;
  for (std::size_t q = 0; q < shape.nodes.size(); ++q) {
    const auto& xi = shape.nodes[q];
    double px = mid[0] + s * (e[0] * xi[0] - e[1] * xi[1]);
    double py = mid[1] + s * (e[1] * xi[0] + e[0] * xi[1]);
    m += shape.weights[q] * acc.sample(px, py);
  }
  return m * s2;
}

/// Topological quasi-distance d(x, y) = (mass of Omega(x,y))^{1/n}.
inline double topo_distance(const DensityAccumulator& acc, const DomainShape& shape,
                            std::array<double, 2> x, std::array<double, 2> y) {
  double m = omega_mass(acc, shape, x, y);
  if (!(m > 0.0))
    throw vacuum_error("topo_distance: nonpositive communication mass");
  return shape.dim == 1 ? m : std::sqrt(m);
}

} // namespace topoflock
