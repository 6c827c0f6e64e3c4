#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "srsim/config.hpp"

namespace srsim {

inline constexpr const char* kVersion = "0.1.0";

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kUnexpected = 1;
inline constexpr int kConfig = 2;
inline constexpr int kNumeric = 3;
inline constexpr int kFit = 4;
}  // namespace exit_code

struct CommandOptions {
  std::string config_path;  // empty: built-in defaults
  std::string out_dir;      // overrides output.directory and $SRSIM_OUTPUT_DIR
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;  // reserved; the dynamics are deterministic
  std::ostream* log = nullptr;        // human-readable summary, std::cout when null
};

/// Output directory precedence: --out, output.directory, $SRSIM_OUTPUT_DIR, ".".
std::filesystem::path resolve_output_dir(const CommandOptions& opts, const RunConfig& cfg);

// Each command returns a process exit status and leaves run_record.json in the
// output directory, also on failure when the directory is writable.

int cmd_simulate(const CommandOptions& opts);
int cmd_ramsey(const CommandOptions& opts, std::optional<double> t_free_us, std::optional<double> delta_hz);
int cmd_sweep(const CommandOptions& opts);
int cmd_lock(const CommandOptions& opts);
/// Exit 3 on a failed comparison only when `strict`; otherwise report only.
int cmd_validate(const CommandOptions& opts, bool strict);
int cmd_fit(const CommandOptions& opts, const std::string& trace_csv, double t0_us,
            std::optional<double> window_end_us);
/// Writes the effective configuration (defaults filled in) to stdout.
int cmd_show_config(const CommandOptions& opts);

}  // namespace srsim
