#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "srsim/oracle.hpp"
#include "srsim/protocol.hpp"
#include "srsim/pulse_fit.hpp"

namespace srsim {

/// Shortest decimal string that parses back to the same double.
std::string format_shortest(double v);
/// %.17g.
std::string format_17g(double v);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file. Creates missing parent directories.
void write_atomic(const std::filesystem::path& path, const std::string& content);

inline constexpr const char* kTrajectoryHeader =
    "t_s,n_phot,re_a,im_a,s22_1,s22_2,jbar_plus,mbar_plus,jbar_minus,mbar_minus,"
    "ax_plus,ay_plus,az_plus,ax_minus,ay_minus,az_minus";

std::string trajectory_csv(const ProtocolRun& run);
/// delta and phi are written in Hz and rad; the last column carries per-point
/// failure notes.
std::string sweep_csv(const std::vector<SweepPoint>& points);
std::string lock_csv(const std::vector<LockSample>& samples);
/// Every stored field (re/im pairs) against time.
std::string state_csv(const std::vector<double>& times, const std::vector<MeanFieldState>& states);

nlohmann::json to_json(const PulseCharacteristics& p);
nlohmann::json to_json(const ComparisonReport& r);

/// Two columns of a CSV file with a header row; `time_column` and
/// `value_column` select them by name. Throws ConfigError on malformed input.
struct Trace {
  std::vector<double> times;
  std::vector<double> values;
};

Trace read_trace_csv(const std::filesystem::path& path, const std::string& time_column = "t_s",
                     const std::string& value_column = "n_phot");

}  // namespace srsim
