// Command-line driver for the two-ensemble superradiance simulator.

#include <CLI11.hpp>

#include "srsim/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Delayed-superradiance simulator: mean-field cavity QED with two atomic ensembles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", srsim::kVersion);

  srsim::CommandOptions opts;
  std::uint64_t seed = 0;
  auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", opts.config_path, "JSON run configuration (defaults when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--out", opts.out_dir, "output directory");
    sub->add_option("-j,--jobs", opts.jobs, "worker threads for sweeps and locks (0: all cores)");
    sub->add_option("--seed", seed, "reserved; the dynamics are deterministic");
  };

  auto* simulate = app.add_subcommand("simulate", "run the configured protocol, write the trace and pulse fit");
  common(simulate);

  auto* ramsey = app.add_subcommand("ramsey", "single Ramsey sequence");
  common(ramsey);
  std::optional<double> t_free_us, delta_hz;
  ramsey->add_option("--t-free-us", t_free_us, "free-evolution time (us)");
  ramsey->add_option("--delta-hz", delta_hz, "drive detuning (Hz)");

  auto* sweep = app.add_subcommand("sweep", "Ramsey spectroscopy over the configured detuning range");
  common(sweep);

  auto* lock = app.add_subcommand("lock", "two-point frequency-lock sequence with atom loss");
  common(lock);

  auto* validate = app.add_subcommand("validate", "compare the mean-field run with the exact master equation");
  common(validate);
  bool strict = false;
  validate->add_flag("--strict", strict, "exit with status 3 when the comparison fails");

  auto* fit = app.add_subcommand("fit", "Gaussian fit of a photon-number trace");
  common(fit);
  std::string trace;
  double t0_us = 0.0;
  std::optional<double> window_end_us;
  fit->add_option("trace", trace, "CSV with t_s and n_phot columns")->required()->check(CLI::ExistingFile);
  fit->add_option("--t0-us", t0_us, "reference time (drive end), also the window start (us)")->required();
  fit->add_option("--window-end-us", window_end_us, "end of the fit window (us)");

  auto* show = app.add_subcommand("config", "print the effective configuration");
  show->add_option("-c,--config", opts.config_path, "JSON run configuration")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : srsim::exit_code::kConfig;
  }
  for (auto* sub : {simulate, ramsey, sweep, lock, validate, fit}) {
    if (sub->parsed() && sub->count("--seed")) opts.seed = seed;
  }

  if (simulate->parsed()) return srsim::cmd_simulate(opts);
  if (ramsey->parsed()) return srsim::cmd_ramsey(opts, t_free_us, delta_hz);
  if (sweep->parsed()) return srsim::cmd_sweep(opts);
  if (lock->parsed()) return srsim::cmd_lock(opts);
  if (validate->parsed()) return srsim::cmd_validate(opts, strict);
  if (fit->parsed()) return srsim::cmd_fit(opts, trace, t0_us, window_end_us);
  return srsim::cmd_show_config(opts);
}
