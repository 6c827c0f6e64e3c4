#include "srsim/output.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "srsim/errors.hpp"

namespace srsim {

using nlohmann::json;

std::string format_shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string format_17g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, path);
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' ? ' ' : c;
  }
  return q + '"';
}

}  // namespace

std::string trajectory_csv(const ProtocolRun& run) {
  std::ostringstream os;
  os << kTrajectoryHeader << '\n';
  const auto& tr = run.trajectory;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const auto& s = tr.states[i];
    const auto& o = run.observables[i];
    const double row[] = {tr.times[i],
                          o.n_phot,
                          s(Field::A).real(),
                          s(Field::A).imag(),
                          s(Field::S22, 0).real(),
                          s(Field::S22, 1).real(),
                          o.jbar_plus,
                          o.mbar_plus,
                          o.jbar_minus,
                          o.mbar_minus,
                          o.bloch_plus[0],
                          o.bloch_plus[1],
                          o.bloch_plus[2],
                          o.bloch_minus[0],
                          o.bloch_minus[1],
                          o.bloch_minus[2]};
    bool first = true;
    for (double v : row) {
      if (!first) os << ',';
      os << format_17g(v);
      first = false;
    }
    os << '\n';
  }
  return os.str();
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  os << "delta_hz,phi_rad,i_int,i_max,t_delay_s,tau_s,detected,error\n";
  for (const auto& p : points) {
    os << format_shortest(rad_to_hz(p.delta)) << ',' << format_shortest(p.phi) << ','
       << format_shortest(p.pulse.i_int) << ',' << format_shortest(p.pulse.i_max) << ','
       << format_shortest(p.pulse.t_delay) << ',' << format_shortest(p.pulse.tau) << ','
       << (p.pulse.detected ? 1 : 0) << ',' << csv_quote(p.error) << '\n';
  }
  return os.str();
}

std::string lock_csv(const std::vector<LockSample>& samples) {
  std::ostringstream os;
  os << "cycle,t_ms,sign,i_int,n_atoms,error_signal,error\n";
  for (const auto& s : samples) {
    os << s.cycle << ',' << format_shortest(s.time * 1e3) << ',' << s.sign << ',' << format_shortest(s.i_int)
       << ',' << format_shortest(s.n_atoms) << ',' << format_shortest(s.error_signal) << ','
       << csv_quote(s.error) << '\n';
  }
  return os.str();
}

std::string state_csv(const std::vector<double>& times, const std::vector<MeanFieldState>& states) {
  std::ostringstream os;
  os << "t_s";
  for (std::size_t k = 0; k < kFieldCount; ++k) os << ",re_" << slot_name(k) << ",im_" << slot_name(k);
  os << '\n';
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << format_shortest(times[i]);
    for (std::size_t k = 0; k < kFieldCount; ++k) {
      os << ',' << format_shortest(states[i][k].real()) << ',' << format_shortest(states[i][k].imag());
    }
    os << '\n';
  }
  return os.str();
}

json to_json(const PulseCharacteristics& p) {
  return {{"i_max", p.i_max},
          {"i_int", p.i_int},
          {"i_int_numeric", p.i_int_numeric},
          {"t_delay_s", p.t_delay},
          {"tau_s", p.tau},
          {"t0_s", p.t0},
          {"residual_rms", p.residual_rms},
          {"detected", p.detected},
          {"fit_window_s", {p.fit_window.begin, p.fit_window.end}},
          {"iterations", p.iterations}};
}

json to_json(const ComparisonReport& r) {
  json fields = json::array();
  for (const auto& f : r.fields) {
    fields.push_back({{"name", f.name},
                      {"max_abs_error", f.max_abs_error},
                      {"peak_exact", f.peak_exact},
                      {"rel_error", f.rel_error},
                      {"first_divergence_s", f.first_divergence},
                      {"skipped", f.skipped},
                      {"pass", f.pass}});
  }
  return {{"pass", r.pass},
          {"tolerance", r.tolerance},
          {"floor", r.floor},
          {"max_rel_error", r.max_rel_error},
          {"first_divergence_s", r.first_divergence},
          {"oracle",
           {{"max_trace_error", r.exact.max_trace_error},
            {"max_hermiticity_error", r.exact.max_hermiticity_error},
            {"min_eigenvalue", r.exact.min_eigenvalue},
            {"cutoff_endpoint_change", r.exact.cutoff_endpoint_change}}},
          {"fields", fields}};
}

Trace read_trace_csv(const std::filesystem::path& path, const std::string& time_column,
                     const std::string& value_column) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file '" + path.string() + "'");
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace file '" + path.string() + "' is empty");
  const auto header = split(line);
  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ConfigError("trace file has no column '" + name + "'");
  };
  const std::size_t ct = column(time_column), cv = column(value_column);

  Trace tr;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    auto parse = [&](std::size_t c) {
      if (c >= cells.size()) throw ConfigError("trace row " + std::to_string(row) + " is short");
      double v = 0.0;
      const auto& s = cells[c];
      const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
        throw ConfigError("trace row " + std::to_string(row) + ": bad number '" + s + "'");
      }
      return v;
    };
    tr.times.push_back(parse(ct));
    tr.values.push_back(parse(cv));
  }
  for (std::size_t i = 1; i < tr.times.size(); ++i) {
    if (!(tr.times[i] > tr.times[i - 1])) throw ConfigError("trace times must be strictly increasing");
  }
  return tr;
}

}  // namespace srsim
