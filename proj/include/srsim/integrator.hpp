#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "srsim/params.hpp"
#include "srsim/state.hpp"

namespace srsim {

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();  // s
  double initial_step = 0.0;  // s; 0 selects a step from the local derivative scale
  std::size_t max_steps = 1'000'000;

  /// Throws std::invalid_argument unless rtol, atol, max_step > 0.
  void validate() const;
  bool operator==(const IntegratorConfig&) const = default;
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

using RhsFunction = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;
using SampleObserver = std::function<void(double t, std::span<const double> y)>;

/// Adaptive Dormand-Prince 5(4) integration of y' = f(t, y) from t0 to t1 with
/// dense output. `y` holds the initial value on entry and the value at t1 on
/// return. `sample_times` must be sorted and inside [t0, t1]; the observer is
/// called once per sample, in order. A sample coinciding with a step end
/// receives the stepper's own value, otherwise the 4th-order continuous
/// extension is used. Local error per step is bounded componentwise by
/// atol + rtol * max(|y_old|, |y_new|).
///
/// Throws StepLimitExceeded or NonFiniteState.
IntegrationStats integrate_samples(const RhsFunction& f, std::vector<double>& y, double t0, double t1,
                                   const IntegratorConfig& config, std::span<const double> sample_times,
                                   const SampleObserver& observer);

/// t0, t0 + k*dt for every k with t0 + k*dt < t1 (up to a relative slack), and t1.
std::vector<double> uniform_grid(double t0, double t1, double dt);

/// Sample grid aligned to a global clock: t0, every origin + k*dt strictly inside
/// (t0, t1), and t1.
std::vector<double> aligned_grid(double t0, double t1, double dt, double origin = 0.0);

/// Time-stamped mean-field samples. segment_marks holds the sample index at
/// which each protocol segment starts.
struct Trajectory {
  std::vector<double> times;
  std::vector<MeanFieldState> states;
  std::vector<std::size_t> segment_marks;
  IntegrationStats stats;

  std::size_t size() const { return times.size(); }
};

/// Integrates the mean-field equations with a fixed drive setting.
Trajectory integrate(const SystemParams& params, const DriveSetting& drive, const MeanFieldState& state0,
                     double t0, double t1, const IntegratorConfig& config, double sample_dt);

/// Generic variant for an arbitrary mean-field right-hand side.
using MeanFieldRhs = std::function<MeanFieldState(double t, const MeanFieldState&)>;
Trajectory integrate(const MeanFieldRhs& f, const MeanFieldState& state0, double t0, double t1,
                     const IntegratorConfig& config, double sample_dt);

}  // namespace srsim
