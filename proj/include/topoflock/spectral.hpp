#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "topoflock/grid.hpp"

namespace topoflock {

using complexd = std::complex<double>;

namespace detail {

/// Process-wide cache of FFTW plans keyed by (dim, N). FFTW planning is not
/// thread-safe, so every entry owns its buffers and a lock serializing use.
class FftPlan {
public:
  FftPlan(int dim, int n) : n_(n), size_(dim == 1 ? n : static_cast<std::size_t>(n) * n) {
    buf_in_ = fftw_alloc_complex(size_);
    buf_out_ = fftw_alloc_complex(size_);
    if (dim == 1) {
      fwd_ = fftw_plan_dft_1d(n, buf_in_, buf_out_, FFTW_FORWARD, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_1d(n, buf_in_, buf_out_, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
      fwd_ = fftw_plan_dft_2d(n, n, buf_in_, buf_out_, FFTW_FORWARD, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_2d(n, n, buf_in_, buf_out_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
  }

  ~FftPlan() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_in_);
    fftw_free(buf_out_);
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void execute(const complexd* in, complexd* out, bool forward) {
    std::lock_guard<std::mutex> lk(mu_);
    for (std::size_t i = 0; i < size_; ++i) {
      buf_in_[i][0] = in[i].real();
      buf_in_[i][1] = in[i].imag();
    }
    fftw_execute(forward ? fwd_ : bwd_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = complexd(buf_out_[i][0], buf_out_[i][1]);
  }

private:
  int n_;
  std::size_t size_;
  fftw_complex* buf_in_;
  fftw_complex* buf_out_;
  fftw_plan fwd_;
  fftw_plan bwd_;
  std::mutex mu_;
};

inline FftPlan& plan_for(const Grid& g) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<FftPlan>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_pair(g.dim, g.points);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<FftPlan>(g.dim, g.points)).first;
  return *it->second;
}

/// Signed integer wavevector of FFT bin m; the Nyquist bin maps to +N/2.
inline int k_of_bin(int m, int n) { return m <= n / 2 ? m : m - n; }

} // namespace detail

/// Fourier coefficients of a (componentwise) grid function, normalized so
/// that mode 0 is the mean. Layout mirrors Field: grid-major, component fastest.
struct SpectralCoefficients {
  Grid grid;
  int components = 1;
  std::vector<complexd> modes;

  SpectralCoefficients() = default;
  SpectralCoefficients(const Grid& g, int comps)
      : grid(g), components(comps), modes(g.size() * comps, complexd(0.0, 0.0)) {}

  complexd& operator()(std::size_t flat, int comp = 0) {
    return modes[flat * components + comp];
  }
  complexd operator()(std::size_t flat, int comp = 0) const {
    return modes[flat * components + comp];
  }

  /// Signed integer wavevector of flat mode index.
  std::array<int, 2> wavevector(std::size_t flat) const {
    int n = grid.points;
    if (grid.dim == 1) return {detail::k_of_bin(static_cast<int>(flat), n), 0};
    return {detail::k_of_bin(static_cast<int>(flat) / n, n),
            detail::k_of_bin(static_cast<int>(flat) % n, n)};
  }

  /// Physical wavenumber 2*pi*k/L per axis.
  std::array<double, 2> kappa(std::size_t flat) const {
    auto k = wavevector(flat);
    double s = kTwoPi / grid.length;
    return {s * k[0], s * k[1]};
  }
};

inline SpectralCoefficients transform(const Field& f) {
  SpectralCoefficients c(f.grid, f.components);
  auto& plan = detail::plan_for(f.grid);
  std::size_t n = f.size();
  std::vector<complexd> in(n), out(n);
  double scale = 1.0 / static_cast<double>(n);
  for (int comp = 0; comp < f.components; ++comp) {
    for (std::size_t i = 0; i < n; ++i) in[i] = complexd(f(i, comp), 0.0);
    plan.execute(in.data(), out.data(), true);
    for (std::size_t i = 0; i < n; ++i) c(i, comp) = out[i] * scale;
  }
  return c;
}

inline Field inverse_transform(const SpectralCoefficients& c) {
  Field f(c.grid, c.components);
  auto& plan = detail::plan_for(c.grid);
  std::size_t n = c.grid.size();
  std::vector<complexd> in(n), out(n);
  for (int comp = 0; comp < c.components; ++comp) {
    for (std::size_t i = 0; i < n; ++i) in[i] = c(i, comp);
    plan.execute(in.data(), out.data(), false);
    for (std::size_t i = 0; i < n; ++i) f(i, comp) = out[i].real();
  }
  return f;
}

/// Applies a per-mode multiplier fn(kvec, kappa) -> complexd.
template <typename Fn>
Field apply_multiplier(const Field& f, Fn&& fn) {
  SpectralCoefficients c = transform(f);
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    complexd m = fn(c.wavevector(i), c.kappa(i));
    for (int comp = 0; comp < c.components; ++comp) c(i, comp) *= m;
  }
  return inverse_transform(c);
}

/// order-th partial derivative along axis by Fourier multiplier (i kappa)^order.
/// The Nyquist mode of odd-order derivatives is zeroed to keep outputs real.
inline Field spectral_derivative(const Field& f, int axis, int order = 1) {
  if (axis < 0 || axis >= f.grid.dim)
    throw argument_error("spectral_derivative: axis out of range");
  if (order < 1) throw argument_error("spectral_derivative: order must be >= 1");
  int nyq = f.grid.points / 2;
  bool odd = (order % 2) != 0;
  return apply_multiplier(f, [&](std::array<int, 2> k, std::array<double, 2> kap) {
    if (odd && k[axis] == nyq) return complexd(0.0, 0.0);
    return std::pow(complexd(0.0, kap[axis]), order);
  });
}

inline Field component(const Field& f, int comp);

/// Divergence of a velocity field (c == dim components).
inline Field spectral_divergence(const Field& u) {
  Field d = spectral_derivative(component(u, 0), 0, 1);
  if (u.grid.dim == 2) d += spectral_derivative(component(u, 1), 1, 1);
  return d;
}

/// Homogeneous Sobolev seminorm: sqrt(sum_{k != 0} |kappa|^{2s} |f_hat|^2),
/// components summed. With the mean-normalized transform this satisfies
/// seminorm(f, 0)^2 + mean^2 == mean-square of f.
inline double sobolev_seminorm(const Field& f, double s) {
  if (s < 0.0) throw argument_error("sobolev_seminorm: s must be >= 0");
  SpectralCoefficients c = transform(f);
  double acc = 0.0;
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    auto kap = c.kappa(i);
    double k2 = kap[0] * kap[0] + kap[1] * kap[1];
    if (k2 == 0.0) continue;
    double w = (s == 0.0) ? 1.0 : std::pow(k2, s);
    for (int comp = 0; comp < c.components; ++comp) acc += w * std::norm(c(i, comp));
  }
  return std::sqrt(acc);
}

/// Reference fractional Laplacian with multiplier -|kappa|^alpha (dissipative
/// sign, matching the alignment operator on single modes).
inline Field fractional_laplacian(const Field& f, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw argument_error("fractional_laplacian: alpha must lie in (0,2)");
  return apply_multiplier(f, [&](std::array<int, 2>, std::array<double, 2> kap) {
    double k2 = kap[0] * kap[0] + kap[1] * kap[1];
    return complexd(k2 == 0.0 ? 0.0 : -std::pow(k2, 0.5 * alpha), 0.0);
  });
}

/// Heat semigroup e^{nu t Laplacian}: multiplies each mode by exp(-nu |kappa|^2 dt).
/// nu == 0 or dt == 0 returns the input unchanged.
inline Field heat_semigroup(const Field& f, double nu, double dt) {
  if (nu < 0.0 || dt < 0.0) throw argument_error("heat_semigroup: nu, dt must be >= 0");
  if (nu == 0.0 || dt == 0.0) return f;
  return apply_multiplier(f, [&](std::array<int, 2>, std::array<double, 2> kap) {
    double k2 = kap[0] * kap[0] + kap[1] * kap[1];
    return complexd(std::exp(-nu * k2 * dt), 0.0);
  });
}

/// 2/3-rule dealiasing: zeroes every mode with |k_j| > N/3 on some axis.
inline Field dealias(const Field& f) {
  int cut = f.grid.points / 3;
  return apply_multiplier(f, [&](std::array<int, 2> k, std::array<double, 2>) {
    bool keep = std::abs(k[0]) <= cut && (f.grid.dim == 1 || std::abs(k[1]) <= cut);
    return complexd(keep ? 1.0 : 0.0, 0.0);
  });
}

/// Pointwise product of two scalar fields (or component comp_a of a with
/// comp_b of b), with 2/3 truncation applied to the result.
inline Field dealiased_product(const Field& a, int comp_a, const Field& b, int comp_b) {
  Field p(a.grid, 1);
  for (std::size_t i = 0; i < a.size(); ++i) p(i) = a(i, comp_a) * b(i, comp_b);
  return dealias(p);
}

/// Exact trigonometric interpolation of f at grid points shifted by v:
/// returns g with g(x_i) = f(x_i + v). Used for off-grid evaluation.
inline Field shifted_field(const Field& f, std::array<double, 2> v) {
  return apply_multiplier(f, [&](std::array<int, 2>, std::array<double, 2> kap) {
    double phase = kap[0] * v[0] + kap[1] * v[1];
    return complexd(std::cos(phase), std::sin(phase));
  });
}

/// Extracts one component as a scalar field.
inline Field component(const Field& f, int comp) {
  Field r(f.grid, 1);
  for (std::size_t i = 0; i < f.size(); ++i) r(i) = f(i, comp);
  return r;
}

} // namespace topoflock
