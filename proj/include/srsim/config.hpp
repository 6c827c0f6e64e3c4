#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "srsim/oracle.hpp"
#include "srsim/params.hpp"
#include "srsim/protocol.hpp"

namespace srsim {

// Run configuration as written by the user: ordinary frequencies in Hz, times
// with unit-suffixed keys. Conversion to angular units happens only in the
// to_* functions below.

struct EnsembleConfig {
  double n_atoms = 1e7;
  double delta_hz = 0.0;
  double g_hz = 0.61e3;
  double gamma_hz = 7.5e3;
  double chi_hz = 0.0;
  double omega_hz = 4.16e5;
  bool operator==(const EnsembleConfig&) const = default;
};

struct SystemConfig {
  double delta_c_hz = 0.0;
  double kappa_hz = 0.78e6;
  std::array<EnsembleConfig, 2> ensembles{EnsembleConfig{}, EnsembleConfig{.omega_hz = -4.16e5}};
  bool operator==(const SystemConfig&) const = default;
};

struct IntegratorSection {
  double rtol = 1e-8;
  double atol = 1e-12;
  double max_step_us = 0.0;  // 0: unlimited
  double initial_step_us = 0.0;
  long long max_steps = 1000000;
  double sample_dt_ns = 1.0;
  double hermiticity_tol = 1e-9;
  bool operator==(const IntegratorSection&) const = default;
};

/// Either an explicit segment or one of the symbolic forms "pi_half", "pi",
/// "free:<T_us>", "readout:<W_us>" (kept verbatim in `symbol`).
struct SegmentSpec {
  std::string symbol;
  double duration_us = 0.0;
  double omega1_hz = 0.0;
  double omega2_hz = 0.0;
  double delta_hz = 0.0;  // drive detuning from atoms and cavity
  std::string label;
  bool operator==(const SegmentSpec&) const = default;
};

struct ProtocolSection {
  std::vector<SegmentSpec> segments{
      SegmentSpec{"", 0.427, 4.16e5, -4.16e5, 0.0, "drive"}, SegmentSpec{"readout:2", 0.0, 0.0, 0.0, 0.0, ""}};
  std::optional<std::array<double, 2>> readout_window_us;
  bool operator==(const ProtocolSection&) const = default;
};

struct RamseySection {
  double t_free_us = 4.7;
  double delta_hz = 0.0;
  double readout_us = 2.0;
  bool operator==(const RamseySection&) const = default;
};

struct SweepSection {
  double t_free_us = 4.7;
  double delta_min_hz = -1.3e6;
  double delta_max_hz = 1.3e6;
  int points = 200;
  double threshold_frac = 1e-3;
  bool operator==(const SweepSection&) const = default;
};

struct LockSection {
  double t_free_us = 4.7;
  double delta_probe_hz = 0.0;  // 0: quarter-fringe probe pi / (4 T)
  double atom_offset_hz = 0.0;
  int cycles = 25;
  double cycle_period_ms = 4.0;
  double n0 = 4.47e7;
  double gamma_loss_per_ms = 0.00345;
  bool normalized_error = false;
  bool operator==(const LockSection&) const = default;
};

struct OracleSection {
  int n1 = 1;
  int n2 = 1;
  int fock_cutoff = 6;
  double tolerance = 0.02;
  double floor = 1e-8;
  bool check_cutoff = true;
  bool operator==(const OracleSection&) const = default;
};

struct OutputSection {
  std::string directory;  // empty: $SRSIM_OUTPUT_DIR, else the working directory
  std::vector<std::string> formats{"csv", "json"};
  bool operator==(const OutputSection&) const = default;
};

struct RunConfig {
  SystemConfig system;
  IntegratorSection integrator;
  ProtocolSection protocol;
  RamseySection ramsey;
  SweepSection sweep;
  LockSection lock;
  OracleSection oracle;
  OutputSection output;
  bool operator==(const RunConfig&) const = default;
};

/// Strict parsing: unknown keys, wrong types and invalid values raise ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

SystemParams to_system_params(const SystemConfig& s);
RunSettings to_run_settings(const IntegratorSection& i);
Protocol to_protocol(const ProtocolSection& p, const SystemParams& params);
LockConfig to_lock_config(const LockSection& l);
OracleConfig to_oracle_config(const RunConfig& c);

}  // namespace srsim
