#pragma once

#include <deque>
#include <functional>
#include <optional>

#include "topoflock/diagnostics.hpp"

namespace topoflock {

/// Streaming consumers for a run. Either callback may be empty.
struct RunSink {
  std::function<void(const DiagnosticsRecord&)> on_diagnostics;
  std::function<void(const std::string& tag, const SimState&)> on_snapshot;
};

struct RunResult {
  int exit_code = 0; // 0 completed, 2 blow-up or vacuum
  std::string message;
  SimState final_state;
  std::vector<DiagnosticsRecord> records;
  std::size_t steps = 0;
};

inline void validate_initial_state(const SimConfig& config, const SimState& state) {
  Grid g = config.to_grid();
  if (!(state.rho.grid == g) || !(state.u.grid == g))
    throw argument_error("initial state grid does not match the configuration");
  if (state.rho.components != 1)
    throw argument_error("initial density must be scalar");
  if (state.u.components != g.dim)
    throw argument_error("initial velocity must have n components");
  if (!state.rho.is_finite() || !state.u.is_finite())
    throw argument_error("initial state contains non-finite values");
  double mn = field_min(state.rho);
  if (!(mn > config.domain.rho_floor))
    throw vacuum_error("initial density touches the vacuum floor (min rho = " +
                       std::to_string(mn) + ")");
}

/// Advances the state to t_final, emitting diagnostics every diag_stride
/// steps (plus the initial and final states) and snapshots at the ends.
/// Mathematical breakdown (vacuum, non-finite values) ends the run with
/// exit code 2 after flushing everything produced so far.
inline RunResult run(const SimConfig& config, SimState state, const RunSink& sink = {}) {
  validate_initial_state(config, state);
  DomainShape shape = config.to_shape();
  KernelParams params = config.to_kernel_params();
  double floor = config.domain.rho_floor;
  double t_final = config.evolution.t_final;
  int stride = config.output.diag_stride;
  bool want_resid = config.output.e_residual && config.to_grid().dim == 1;

  RunResult result;

  // One-record delay line so each emitted row can carry the transport-law
  // residual centered at its own sample time.
  struct Sample {
    double t;
    Field e;
    Field u;
  };
  std::deque<Sample> window;
  std::optional<DiagnosticsRecord> pending;

  auto flush_pending = [&](bool fill_residual) {
    if (!pending) return;
    if (fill_residual && window.size() == 3) {
      double dt1 = window[1].t - window[0].t;
      double dt2 = window[2].t - window[1].t;
      if (dt1 > 0.0 && std::abs(dt2 - dt1) <= 1e-9 * dt1)
        pending->e_transport_residual = e_transport_residual(
            window[0].e, window[1].e, window[2].e, window[1].u, dt1);
    }
    result.records.push_back(*pending);
    if (sink.on_diagnostics) sink.on_diagnostics(*pending);
    pending.reset();
  };

  auto emit = [&](const SimState& s, const KernelCache& cache) {
    DiagnosticsRecord rec = make_diagnostics(s, cache, config.output.ym);
    if (want_resid) {
      window.push_back({s.t, e_field(s, cache), s.u});
      if (window.size() > 3) window.pop_front();
      flush_pending(true);
      pending = rec;
    } else {
      result.records.push_back(rec);
      if (sink.on_diagnostics) sink.on_diagnostics(rec);
    }
  };

  if (sink.on_snapshot && config.output.write_snapshots)
    sink.on_snapshot("initial", state);

  try {
    {
      KernelCache cache(state.rho, shape, params, floor);
      emit(state, cache);
    }
    while (state.t < t_final * (1.0 - 1e-14) && t_final > 0.0) {
      KernelCache cache(state.rho, shape, params, floor);
      double dt = config.evolution.dt_override > 0.0
                      ? config.evolution.dt_override
                      : cfl_dt(state, config, cache);
      dt = std::min(dt, t_final - state.t);
      state = step(state, dt, config, shape, &cache);
      ++result.steps;
      bool due = result.steps % static_cast<std::size_t>(stride) == 0;
      bool last = !(state.t < t_final * (1.0 - 1e-14));
      if (due || last) {
        KernelCache dcache(state.rho, shape, params, floor);
        emit(state, dcache);
      }
    }
    flush_pending(true);
    result.final_state = state;
    if (sink.on_snapshot && config.output.write_snapshots)
      sink.on_snapshot("final", state);
  } catch (const vacuum_error& e) {
    flush_pending(false);
    result.exit_code = 2;
    result.message = e.what();
    result.final_state = state;
    if (sink.on_snapshot && config.output.write_snapshots)
      sink.on_snapshot("last_valid", state);
  } catch (const blowup_error& e) {
    flush_pending(false);
    result.exit_code = 2;
    result.message = e.what();
    result.final_state = state;
    if (sink.on_snapshot && config.output.write_snapshots)
      sink.on_snapshot("last_valid", state);
  }
  return result;
}

} // namespace topoflock
