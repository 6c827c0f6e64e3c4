#pragma once

#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "srsim/integrator.hpp"
#include "srsim/observables.hpp"
#include "srsim/params.hpp"
#include "srsim/pulse_fit.hpp"
#include "srsim/state.hpp"

namespace srsim {

/// One piecewise-constant stretch of drive settings.
struct PulseSegment {
  double duration = 0.0;  // s
  DriveSetting drive;
  std::string label;
};

struct Protocol {
  std::vector<PulseSegment> segments;
  /// Relative to protocol start; defaults to the last readout-labelled segment,
  /// else the span after the last driven segment.
  std::optional<Window> readout_window;

  double duration() const;
  /// End time of the last segment with a non-zero drive (0 if none).
  double drive_end() const;
  Window readout() const;
  void validate() const;
};

/// Sampling and tolerance settings shared by every protocol run.
struct RunSettings {
  IntegratorConfig integrator;
  double sample_dt = 1e-9;  // s
  ObservableTolerances tolerances;
};

struct ProtocolRun {
  Trajectory trajectory;
  std::vector<CollectiveObservables> observables;

  std::vector<double> photon_numbers() const;
};

/// Integrates the segments back to back, sampling on a grid aligned to the
/// protocol clock. Segment boundaries appear once in the sample list;
/// trajectory.segment_marks holds the index of each segment's first sample.
ProtocolRun run_protocol(const SystemParams& params, const Protocol& protocol, const RunSettings& run,
                         const std::optional<MeanFieldState>& initial = std::nullopt);

/// pi/(4 Omega): area 2 Omega t = pi/2 for the single-atom Rabi problem. Uses
/// |Omega_1|; throws ZeroDrive if it vanishes.
double pi_half_duration(const SystemParams& params);

struct RamseyOptions {
  double readout_duration = 2e-6;  // s
  double detection_threshold = 0.0;  // photons, absolute
};

/// pi/2 - free(T) - pi/2 - readout. The drive laser is detuned by `delta` from
/// both the atoms and the cavity in every segment.
Protocol ramsey_protocol(const SystemParams& params, double t_free, double delta,
                         const RamseyOptions& options = {});

struct RamseyResult {
  ProtocolRun run;
  PulseCharacteristics pulse;
  std::string error;  // non-empty when the readout pulse could not be fitted
};

/// Runs and fits one Ramsey sequence. Fit failures are reported in `error`
/// with best-effort pulse numbers and detected = false; integration failures
/// propagate.
RamseyResult ramsey(const SystemParams& params, double t_free, double delta, const RunSettings& run,
                    const RamseyOptions& options = {});

/// Fitted I_max of the resonant pi pulse (T = 0, delta = 0) followed by decay:
/// the reference for the detection threshold.
double reference_pulse_max(const SystemParams& params, const RunSettings& run,
                           const RamseyOptions& options = {});

struct SweepPoint {
  double delta = 0.0;  // rad/s
  double phi = 0.0;    // delta * T
  PulseCharacteristics pulse;
  std::string error;
};

struct SweepOptions {
  RamseyOptions ramsey;
  double threshold_frac = 1e-3;  // detection threshold relative to the reference I_max
  unsigned jobs = 1;
};

/// Independent Ramsey runs for each detuning. Results keep the input order
/// and do not depend on `jobs`. Per-point failures are recorded, not thrown.
std::vector<SweepPoint> spectroscopy_sweep(const SystemParams& params, double t_free,
                                           const std::vector<double>& deltas, const RunSettings& run,
                                           const SweepOptions& options = {});

struct LockConfig {
  double t_free = 4.7e-6;        // s
  double delta_probe = 0.0;      // rad/s; 0 selects pi / (4 T)
  double atom_offset = 0.0;      // rad/s
  int cycles = 25;
  double cycle_period = 4e-3;    // s
  double n0 = 4.47e7;            // total atoms, split equally between ensembles
  double gamma_loss = 3.45;      // 1/s (0.00345 per ms)
  bool normalized_error = false;

  double probe() const { return delta_probe != 0.0 ? delta_probe : std::numbers::pi / (4.0 * t_free); }
  void validate() const;
};

struct LockSample {
  int cycle = 0;
  double time = 0.0;  // s
  int sign = 0;       // +1 probes atom_offset + delta_probe, -1 the other side
  double i_int = 0.0;
  double n_atoms = 0.0;
  double error_signal = 0.0;  // same value on both samples of a cycle
  std::string error;
};

/// Two Ramsey runs per cycle at atom_offset +- delta_probe. The atom number
/// N0 exp(-gamma_loss t) is evaluated at the start of each cycle and held for
/// both runs of that cycle; the second run is stamped half a period later.
std::vector<LockSample> frequency_lock_run(const SystemParams& params, const LockConfig& lock,
                                           const RunSettings& run, const SweepOptions& options = {});

/// Evaluates `task(i)` for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& task);

}  // namespace srsim
