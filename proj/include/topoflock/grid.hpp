#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "topoflock/errors.hpp"

namespace topoflock {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Uniform periodic grid on T^n, n in {1, 2}. Same point count and period
/// on every axis; N must be a power of two so the transforms stay radix-2.
struct Grid {
  int dim = 1;          // n
  int points = 0;       // N per axis
  double length = kTwoPi; // L per axis

  Grid() = default;
  Grid(int dim_, int points_, double length_ = kTwoPi)
      : dim(dim_), points(points_), length(length_) {
    validate();
  }

  void validate() const {
    if (dim != 1 && dim != 2)
      throw argument_error("grid dim must be 1 or 2");
    if (points < 8 || (points & (points - 1)) != 0)
      throw argument_error("grid points must be a power of two >= 8");
    if (!(length > 0.0))
      throw argument_error("grid length must be positive");
  }

  double spacing() const { return length / points; }

  std::size_t size() const {
    return dim == 1 ? static_cast<std::size_t>(points)
                    : static_cast<std::size_t>(points) * points;
  }

  /// Flat index of a (possibly out-of-range) integer lattice point,
  /// wrapped periodically. 2D layout is row-major in (ix, iy).
  std::size_t wrap_index(int ix, int iy = 0) const {
    int n = points;
    ix %= n; if (ix < 0) ix += n;
    iy %= n; if (iy < 0) iy += n;
    return dim == 1 ? static_cast<std::size_t>(ix)
                    : static_cast<std::size_t>(ix) * n + iy;
  }

  std::array<double, 2> point(std::size_t flat) const {
    double h = spacing();
    if (dim == 1) return {static_cast<double>(flat) * h, 0.0};
    std::size_t n = static_cast<std::size_t>(points);
    return {static_cast<double>(flat / n) * h, static_cast<double>(flat % n) * h};
  }

  /// Minimal periodic image of a coordinate difference, in [-L/2, L/2].
  /// Computed from |d| so that wrap_diff(-d) == -wrap_diff(d) exactly.
  double wrap_diff(double d) const {
    double L = length;
    double s = d < 0.0 ? -1.0 : 1.0;
    double a = std::abs(d);
    a -= L * std::floor(a / L);
    if (a > 0.5 * L) a -= L;
    return s * a;
  }

  bool operator==(const Grid& o) const {
    return dim == o.dim && points == o.points && length == o.length;
  }
};

/// Scalar or vector grid function. Values are stored grid-major with the
/// component index fastest, matching the snapshot file layout.
struct Field {
  Grid grid;
  int components = 1;
  std::vector<double> values;

  Field() = default;
  Field(const Grid& g, int comps, double fill = 0.0)
      : grid(g), components(comps),
        values(g.size() * static_cast<std::size_t>(comps), fill) {
    if (comps < 1) throw argument_error("field component count must be >= 1");
  }

  double& operator()(std::size_t flat, int comp = 0) {
    return values[flat * components + comp];
  }
  double operator()(std::size_t flat, int comp = 0) const {
    return values[flat * components + comp];
  }

  double& at(int ix, int iy, int comp = 0) {
    return values[grid.wrap_index(ix, iy) * components + comp];
  }
  double at(int ix, int iy, int comp = 0) const {
    return values[grid.wrap_index(ix, iy) * components + comp];
  }

  std::size_t size() const { return grid.size(); }

  bool is_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Builds a field by sampling fn(x) (1D) or fn(x, y) (2D) at grid points.
template <typename Fn>
Field make_field(const Grid& g, int comps, Fn&& fn) {
  Field f(g, comps);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto p = g.point(i);
    for (int c = 0; c < comps; ++c) f(i, c) = fn(p, c);
  }
  return f;
}

inline double field_min(const Field& f, int comp = 0) {
  double m = f(0, comp);
  for (std::size_t i = 1; i < f.size(); ++i) m = std::min(m, f(i, comp));
  return m;
}

inline double field_max(const Field& f, int comp = 0) {
  double m = f(0, comp);
  for (std::size_t i = 1; i < f.size(); ++i) m = std::max(m, f(i, comp));
  return m;
}

inline double field_mean(const Field& f, int comp = 0) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f(i, comp);
  return s / static_cast<double>(f.size());
}

/// Sup norm over all components.
inline double linf_norm(const Field& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

/// Mean-square root sqrt((1/N^n) sum f^2) over all components; this is the
/// grid realization of ||f||_{L^2} / L^{n/2}, the normalization that makes
/// ||.||^2 = seminorm(.,0)^2 + mean^2.
inline double l2_mean_norm(const Field& f) {
  double s = 0.0;
  for (double v : f.values) s += v * v;
  return std::sqrt(s / static_cast<double>(f.size()));
}

inline Field operator*(double a, const Field& f) {
  Field r = f;
  for (double& v : r.values) v *= a;
  return r;
}

inline Field& operator+=(Field& a, const Field& b) {
  for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] += b.values[i];
  return a;
}

inline Field& operator-=(Field& a, const Field& b) {
  for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] -= b.values[i];
  return a;
}

inline Field operator+(Field a, const Field& b) { return a += b; }
inline Field operator-(Field a, const Field& b) { return a -= b; }

} // namespace topoflock
