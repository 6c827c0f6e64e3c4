#include "srsim/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "srsim/errors.hpp"
#include "srsim/output.hpp"

namespace srsim {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path resolve_output_dir(const CommandOptions& opts, const RunConfig& cfg) {
  if (!opts.out_dir.empty()) return opts.out_dir;
  if (!cfg.output.directory.empty()) return cfg.output.directory;
  if (const char* env = std::getenv("SRSIM_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

namespace {

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

bool has_format(const RunConfig& cfg, const char* f) {
  for (const auto& x : cfg.output.formats) {
    if (x == f) return true;
  }
  return false;
}

struct Session {
  const CommandOptions& opts;
  RunConfig cfg;
  fs::path out;
  std::ostream& log;
  json results = json::object();
  json outputs = json::array();
  json errors = json::array();

  unsigned jobs() const { return opts.jobs ? opts.jobs : std::max(1u, std::thread::hardware_concurrency()); }
  bool csv() const { return has_format(cfg, "csv"); }
  bool json_out() const { return has_format(cfg, "json"); }

  void emit(const std::string& name, const std::string& content) {
    write_atomic(out / name, content);
    outputs.push_back(name);
  }
  void note(const std::string& where, const std::string& what) {
    errors.push_back({{"where", where}, {"message", what}});
  }
};

template <class Body>
int run_command(const std::string& command, const CommandOptions& opts, Body body) {
  std::ostream& log = opts.log ? *opts.log : std::cout;
  json record = {{"tool", "srsim"}, {"version", kVersion}, {"command", command}, {"started_utc", now_utc()}};
  if (opts.seed) record["seed"] = *opts.seed;
  fs::path out = resolve_output_dir(opts, RunConfig{});
  json errors = json::array();
  int code = exit_code::kOk;
  std::string failure;
  try {
    Session s{opts, opts.config_path.empty() ? RunConfig{} : load_config(opts.config_path), {}, log};
    s.out = out = resolve_output_dir(opts, s.cfg);
    record["config"] = to_json(s.cfg);
    try {
      code = body(s);
    } catch (...) {
      record["outputs"] = s.outputs;
      errors = s.errors;
      throw;
    }
    record["results"] = s.results;
    record["outputs"] = s.outputs;
    errors = s.errors;
  } catch (const ConfigError& e) {
    code = exit_code::kConfig, failure = e.what();
  } catch (const std::invalid_argument& e) {
    code = exit_code::kConfig, failure = e.what();
  } catch (const std::out_of_range& e) {
    code = exit_code::kConfig, failure = e.what();
  } catch (const NumericError& e) {
    code = exit_code::kNumeric, failure = e.what();
  } catch (const FitError& e) {
    code = exit_code::kFit, failure = e.what();
  } catch (const std::exception& e) {
    code = exit_code::kUnexpected, failure = e.what();
  }
  if (!failure.empty()) {
    errors.push_back({{"where", command}, {"message", failure}});
    std::cerr << "srsim " << command << ": " << failure << '\n';
  }
  record["errors"] = errors;
  record["exit_status"] = code;
  record["finished_utc"] = now_utc();
  try {
    write_atomic(out / "run_record.json", record.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "srsim " << command << ": could not write run record: " << e.what() << '\n';
  }
  return code;
}

RamseyOptions ramsey_options(const RunConfig& cfg) {
  RamseyOptions o;
  o.readout_duration = cfg.ramsey.readout_us * 1e-6;
  return o;
}

void print_pulse(std::ostream& log, const PulseCharacteristics& p) {
  log << "  I_max   " << p.i_max << " photons\n"
      << "  I_int   " << p.i_int << " photon s (trapezoid " << p.i_int_numeric << ")\n"
      << "  t_delay " << p.t_delay * 1e6 << " us after " << p.t0 * 1e6 << " us\n"
      << "  tau     " << p.tau * 1e6 << " us FWHM\n";
}

}  // namespace

int cmd_simulate(const CommandOptions& opts) {
  return run_command("simulate", opts, [](Session& s) {
    const auto params = to_system_params(s.cfg.system);
    const auto protocol = to_protocol(s.cfg.protocol, params);
    const auto run = run_protocol(params, protocol, to_run_settings(s.cfg.integrator));
    if (s.csv()) s.emit("trajectory.csv", trajectory_csv(run));

    const auto& st = run.trajectory.stats;
    s.results["samples"] = run.trajectory.times.size();
    s.results["steps_accepted"] = st.accepted;
    s.results["steps_rejected"] = st.rejected;
    const double t_drive = protocol.drive_end();
    s.results["n_eff_at_drive_end"] = effective_atom_number(run.trajectory.times, run.observables, t_drive);
    s.log << "simulate: " << run.trajectory.times.size() << " samples, " << st.accepted << " steps\n";

    int code = exit_code::kOk;
    PulseCharacteristics pulse;
    try {
      pulse = fit_gaussian_pulse(run.trajectory.times, run.photon_numbers(), t_drive, protocol.readout());
    } catch (const FitDiverged& e) {
      pulse = e.best_effort;
      s.note("pulse fit", e.what());
      code = exit_code::kFit;
    } catch (const FitError& e) {
      s.note("pulse fit", e.what());
      code = exit_code::kFit;
    }
    s.results["pulse"] = to_json(pulse);
    if (s.json_out()) s.emit("pulse.json", to_json(pulse).dump(2) + "\n");
    if (code == exit_code::kOk) print_pulse(s.log, pulse);
    return code;
  });
}

int cmd_ramsey(const CommandOptions& opts, std::optional<double> t_free_us, std::optional<double> delta_hz) {
  return run_command("ramsey", opts, [&](Session& s) {
    const auto params = to_system_params(s.cfg.system);
    const double t_free = t_free_us.value_or(s.cfg.ramsey.t_free_us) * 1e-6;
    const double delta = hz_to_rad(delta_hz.value_or(s.cfg.ramsey.delta_hz));
    if (!(t_free >= 0.0)) throw ConfigError("ramsey: free time must be >= 0");
    const auto r = ramsey(params, t_free, delta, to_run_settings(s.cfg.integrator), ramsey_options(s.cfg));
    if (s.csv()) s.emit("ramsey_trajectory.csv", trajectory_csv(r.run));
    json pj = to_json(r.pulse);
    pj["t_free_s"] = t_free;
    pj["delta_hz"] = rad_to_hz(delta);
    pj["phi_rad"] = delta * t_free;
    s.results["pulse"] = pj;
    if (s.json_out()) s.emit("ramsey_pulse.json", pj.dump(2) + "\n");
    s.log << "ramsey: T = " << t_free * 1e6 << " us, delta = " << rad_to_hz(delta) << " Hz\n";
    if (!r.error.empty()) {
      s.note("pulse fit", r.error);
      return exit_code::kFit;
    }
    print_pulse(s.log, r.pulse);
    return exit_code::kOk;
  });
}

int cmd_sweep(const CommandOptions& opts) {
  return run_command("sweep", opts, [](Session& s) {
    const auto params = to_system_params(s.cfg.system);
    const auto& sw = s.cfg.sweep;
    std::vector<double> deltas(sw.points);
    for (int i = 0; i < sw.points; ++i) {
      const double f = sw.points == 1 ? 0.0 : static_cast<double>(i) / (sw.points - 1);
      deltas[i] = hz_to_rad(sw.delta_min_hz + f * (sw.delta_max_hz - sw.delta_min_hz));
    }
    SweepOptions so;
    so.ramsey = ramsey_options(s.cfg);
    so.threshold_frac = sw.threshold_frac;
    so.jobs = s.jobs();
    const auto points = spectroscopy_sweep(params, sw.t_free_us * 1e-6, deltas, to_run_settings(s.cfg.integrator), so);
    if (s.csv()) s.emit("sweep.csv", sweep_csv(points));

    std::size_t detected = 0;
    json pts = json::array();
    for (const auto& p : points) {
      detected += p.pulse.detected;
      if (!p.error.empty()) s.note("delta_hz=" + format_shortest(rad_to_hz(p.delta)), p.error);
      json pj = to_json(p.pulse);
      pj["delta_hz"] = rad_to_hz(p.delta);
      pj["phi_rad"] = p.phi;
      pj["error"] = p.error;
      pts.push_back(pj);
    }
    if (s.json_out()) s.emit("sweep.json", pts.dump(1) + "\n");
    s.results["points"] = points.size();
    s.results["detected"] = detected;
    s.log << "sweep: " << points.size() << " points, " << detected << " detected\n";
    return exit_code::kOk;
  });
}

int cmd_lock(const CommandOptions& opts) {
  return run_command("lock", opts, [](Session& s) {
    const auto params = to_system_params(s.cfg.system);
    SweepOptions so;
    so.ramsey = ramsey_options(s.cfg);
    so.jobs = s.jobs();
    const auto lc = to_lock_config(s.cfg.lock);
    const auto samples = frequency_lock_run(params, lc, to_run_settings(s.cfg.integrator), so);
    if (s.csv()) s.emit("lock.csv", lock_csv(samples));
    json arr = json::array();
    for (const auto& x : samples) {
      if (!x.error.empty()) s.note("cycle " + std::to_string(x.cycle), x.error);
      arr.push_back({{"cycle", x.cycle}, {"t_ms", x.time * 1e3}, {"sign", x.sign}, {"i_int", x.i_int},
                     {"n_atoms", x.n_atoms}, {"error_signal", x.error_signal}, {"error", x.error}});
    }
    if (s.json_out()) s.emit("lock.json", arr.dump(1) + "\n");
    s.results["cycles"] = lc.cycles;
    s.results["probe_hz"] = rad_to_hz(lc.probe());
    s.log << "lock: " << lc.cycles << " cycles, probe +-" << rad_to_hz(lc.probe()) << " Hz\n";
    return exit_code::kOk;
  });
}

int cmd_validate(const CommandOptions& opts, bool strict) {
  return run_command("validate", opts, [strict](Session& s) {
    const auto oc = to_oracle_config(s.cfg);
    const auto rep = compare_meanfield(oc, s.cfg.oracle.tolerance, s.cfg.oracle.floor);
    const json rj = to_json(rep);
    s.results["comparison"] = rj;
    if (s.json_out()) s.emit("validation_report.json", rj.dump(2) + "\n");
    if (s.csv()) {
      s.emit("oracle_exact.csv", state_csv(rep.exact.times, rep.exact.states));
      s.emit("oracle_meanfield.csv", state_csv(rep.meanfield.times, rep.meanfield.states));
    }
    s.log << "validate: n1=" << oc.n1 << " n2=" << oc.n2 << " cutoff=" << oc.fock_cutoff << ", tolerance "
          << rep.tolerance * 100 << "% of peak + " << rep.floor << '\n';
    for (const auto& f : rep.fields) {
      if (f.skipped) continue;
      s.log << "  " << std::left << std::setw(8) << f.name << std::right << " rel " << std::setw(12)
            << f.rel_error << "  " << (f.pass ? "ok" : "DIVERGED") << '\n';
    }
    s.log << (rep.pass ? "PASS" : "FAIL") << ": max relative error " << rep.max_rel_error << '\n';
    return strict && !rep.pass ? exit_code::kNumeric : exit_code::kOk;
  });
}

int cmd_fit(const CommandOptions& opts, const std::string& trace_csv_path, double t0_us,
            std::optional<double> window_end_us) {
  return run_command("fit", opts, [&](Session& s) {
    const auto tr = read_trace_csv(trace_csv_path);
    if (tr.times.size() < 4) throw ConfigError("trace needs at least 4 samples");
    const double t0 = t0_us * 1e-6;
    const Window w{t0, window_end_us ? *window_end_us * 1e-6 : tr.times.back()};
    const auto pulse = fit_gaussian_pulse(tr.times, tr.values, t0, w);
    s.results["pulse"] = to_json(pulse);
    if (s.json_out()) s.emit("fit.json", to_json(pulse).dump(2) + "\n");
    print_pulse(s.log, pulse);
    return exit_code::kOk;
  });
}

int cmd_show_config(const CommandOptions& opts) {
  try {
    const RunConfig cfg = opts.config_path.empty() ? RunConfig{} : load_config(opts.config_path);
    (opts.log ? *opts.log : std::cout) << to_json(cfg).dump(2) << '\n';
    return exit_code::kOk;
  } catch (const ConfigError& e) {
    std::cerr << "srsim config: " << e.what() << '\n';
    return exit_code::kConfig;
  }
}

}  // namespace srsim
