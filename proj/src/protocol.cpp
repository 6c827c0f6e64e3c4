#include "srsim/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "srsim/errors.hpp"
#include "srsim/meanfield.hpp"

namespace srsim {

double Protocol::duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

double Protocol::drive_end() const {
  double t = 0.0, end = 0.0;
  for (const auto& s : segments) {
    t += s.duration;
    if (s.drive.omega[0] != 0.0 || s.drive.omega[1] != 0.0) end = t;
  }
  return end;
}

Window Protocol::readout() const {
  if (readout_window) return *readout_window;
  double t = 0.0;
  std::optional<Window> labelled;
  for (const auto& s : segments) {
    if (s.label == "readout") labelled = Window{t, t + s.duration};
    t += s.duration;
  }
  if (labelled) return *labelled;
  return {drive_end(), duration()};
}

void Protocol::validate() const {
  if (segments.empty()) throw std::invalid_argument("protocol has no segments");
  for (const auto& s : segments) {
    if (!(s.duration > 0.0) || !std::isfinite(s.duration)) {
      throw std::invalid_argument("segment '" + s.label + "' must have a positive duration");
    }
    const auto& d = s.drive;
    for (double v : {d.omega[0], d.omega[1], d.delta[0], d.delta[1], d.delta_c}) {
      if (!std::isfinite(v)) throw std::invalid_argument("segment '" + s.label + "' has a non-finite drive");
    }
  }
  if (readout_window) {
    const auto w = *readout_window;
    if (!(w.begin >= 0.0 && w.end > w.begin && w.end <= duration() * (1.0 + 1e-12))) {
      throw std::invalid_argument("readout window outside the protocol");
    }
  }
}

std::vector<double> ProtocolRun::photon_numbers() const {
  std::vector<double> n(observables.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = observables[i].n_phot;
  return n;
}

ProtocolRun run_protocol(const SystemParams& params, const Protocol& protocol, const RunSettings& run,
                         const std::optional<MeanFieldState>& initial) {
  params.validate();
  protocol.validate();
  ProtocolRun out;
  auto& traj = out.trajectory;
  const MeanFieldState s0 = initial.value_or(ground_state(params));
  std::vector<double> y(s0.reals().begin(), s0.reals().end());

  double t = 0.0;
  for (std::size_t k = 0; k < protocol.segments.size(); ++k) {
    const auto& seg = protocol.segments[k];
    const double t_end = k + 1 == protocol.segments.size() ? protocol.duration() : t + seg.duration;
    const auto grid = aligned_grid(t, t_end, run.sample_dt);
    const bool skip_first = k > 0;
    traj.segment_marks.push_back(k == 0 ? 0 : traj.times.size() - 1);

    const DriveSetting drive = seg.drive;
    RhsFunction f = [&params, drive](double, std::span<const double> yy, std::span<double> dy) {
      const auto d = rhs(MeanFieldState::from_reals(yy), params, drive);
      std::copy(d.reals().begin(), d.reals().end(), dy.begin());
    };
    bool first = true;
    try {
      const auto stats = integrate_samples(
          f, y, t, t_end, run.integrator, grid, [&](double ts, std::span<const double> yy) {
            if (first && skip_first) {
              first = false;
              return;
            }
            first = false;
            const auto s = MeanFieldState::from_reals(yy);
            traj.times.push_back(ts);
            traj.states.push_back(s);
            out.observables.push_back(collective_observables(s, params, run.tolerances));
          });
      traj.stats.accepted += stats.accepted;
      traj.stats.rejected += stats.rejected;
      traj.stats.rhs_evaluations += stats.rhs_evaluations;
    } catch (const NumericError& e) {
      throw NumericError("segment " + std::to_string(k) + " ('" + seg.label + "'): " + e.what());
    }
    t = t_end;
  }
  return out;
}

double pi_half_duration(const SystemParams& params) {
  const double om = std::abs(params.ens[0].omega);
  if (om == 0.0) throw ZeroDrive();
  return std::numbers::pi / (4.0 * om);
}

Protocol ramsey_protocol(const SystemParams& params, double t_free, double delta,
                         const RamseyOptions& options) {
  if (!(t_free >= 0.0)) throw std::invalid_argument("Ramsey free time must be >= 0");
  const double tp = pi_half_duration(params);
  DriveSetting on = baseline_drive(params);
  for (auto& d : on.delta) d += delta;
  on.delta_c += delta;
  DriveSetting off = on;
  off.omega = {0.0, 0.0};

  Protocol p;
  p.segments.push_back({tp, on, "pi/2"});
  if (t_free > 0.0) p.segments.push_back({t_free, off, "free"});
  p.segments.push_back({tp, on, "pi/2"});
  p.segments.push_back({options.readout_duration, off, "readout"});
  return p;
}

RamseyResult ramsey(const SystemParams& params, double t_free, double delta, const RunSettings& run,
                    const RamseyOptions& options) {
  const Protocol p = ramsey_protocol(params, t_free, delta, options);
  RamseyResult r;
  r.run = run_protocol(params, p, run);
  const auto n = r.run.photon_numbers();
  const Window w = p.readout();
  FitOptions fo;
  fo.detection_threshold = options.detection_threshold;
  try {
    r.pulse = fit_gaussian_pulse(r.run.trajectory.times, n, w.begin, w, fo);
  } catch (const FitDiverged& e) {
    r.pulse = e.best_effort;
    r.pulse.detected = false;
    r.error = e.what();
  } catch (const FitError& e) {
    r.pulse = PulseCharacteristics{};
    r.pulse.t0 = w.begin;
    r.pulse.i_int_numeric = numeric_integral(r.run.trajectory.times, n, w);
    r.error = e.what();
  }
  return r;
}

double reference_pulse_max(const SystemParams& params, const RunSettings& run,
                           const RamseyOptions& options) {
  const auto r = ramsey(params, 0.0, 0.0, run, options);
  if (!r.error.empty()) throw FitError("reference pulse: " + r.error);
  return r.pulse.i_max;
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& task) {
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(m);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<SweepPoint> spectroscopy_sweep(const SystemParams& params, double t_free,
                                           const std::vector<double>& deltas, const RunSettings& run,
                                           const SweepOptions& options) {
  if (deltas.empty()) throw std::invalid_argument("sweep needs at least one detuning");
  RamseyOptions ro = options.ramsey;
  ro.detection_threshold = options.threshold_frac * reference_pulse_max(params, run, options.ramsey);

  std::vector<SweepPoint> out(deltas.size());
  parallel_for(deltas.size(), options.jobs, [&](std::size_t i) {
    SweepPoint& pt = out[i];
    pt.delta = deltas[i];
    pt.phi = deltas[i] * t_free;
    try {
      auto r = ramsey(params, t_free, deltas[i], run, ro);
      pt.pulse = r.pulse;
      pt.error = std::move(r.error);
    } catch (const std::exception& e) {
      pt.pulse.detected = false;
      pt.error = e.what();
    }
  });
  return out;
}

void LockConfig::validate() const {
  if (cycles < 1) throw std::invalid_argument("lock: cycles must be >= 1");
  if (!(cycle_period > 0.0)) throw std::invalid_argument("lock: cycle period must be > 0");
  if (!(n0 > 0.0)) throw std::invalid_argument("lock: n0 must be > 0");
  if (!(t_free >= 0.0)) throw std::invalid_argument("lock: free time must be >= 0");
  if (!(probe() > 0.0) || !std::isfinite(probe())) throw std::invalid_argument("lock: probe detuning must be > 0");
  if (!std::isfinite(gamma_loss) || !std::isfinite(atom_offset)) throw std::invalid_argument("lock: non-finite value");
}

std::vector<LockSample> frequency_lock_run(const SystemParams& params, const LockConfig& lock,
                                           const RunSettings& run, const SweepOptions& options) {
  lock.validate();
  const auto n = static_cast<std::size_t>(2 * lock.cycles);
  std::vector<LockSample> out(n);
  parallel_for(n, options.jobs, [&](std::size_t i) {
    LockSample& s = out[i];
    s.cycle = static_cast<int>(i / 2);
    s.sign = i % 2 == 0 ? 1 : -1;
    const double t_cycle = s.cycle * lock.cycle_period;
    s.time = t_cycle + (s.sign > 0 ? 0.0 : 0.5 * lock.cycle_period);
    s.n_atoms = lock.n0 * std::exp(-lock.gamma_loss * t_cycle);
    SystemParams p = params;
    p.ens[0].n_atoms = p.ens[1].n_atoms = 0.5 * s.n_atoms;
    try {
      const auto r = ramsey(p, lock.t_free, lock.atom_offset + s.sign * lock.probe(), run, options.ramsey);
      s.i_int = r.pulse.i_int;
      s.error = r.error;
    } catch (const std::exception& e) {
      s.error = e.what();
    }
  });
  for (std::size_t c = 0; c + 1 < n; c += 2) {
    double e = out[c].i_int - out[c + 1].i_int;
    if (lock.normalized_error) {
      const double sum = out[c].i_int + out[c + 1].i_int;
      e = sum != 0.0 ? e / sum : 0.0;
    }
    out[c].error_signal = out[c + 1].error_signal = e;
  }
  return out;
}

}  // namespace srsim
