#include "srsim/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "srsim/errors.hpp"
#include "srsim/meanfield.hpp"

namespace srsim {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Difference between the 5th- and embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// Continuous extension: y(t + theta h) = y + h * sum_j (sum_i k_i P[i][j]) theta^(j+1).
constexpr std::array<std::array<double, 4>, 7> kDense = {{
    {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0},
    {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0},
    {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0},
    {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0},
    {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0},
}};

double scaled_max(std::span<const double> v, std::span<const double> y, const IntegratorConfig& c) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    m = std::max(m, std::abs(v[i]) / (c.atol + c.rtol * std::abs(y[i])));
  }
  return m;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0) || !(max_step > 0.0) || !(initial_step >= 0.0) ||
      max_steps == 0) {
    throw std::invalid_argument("integrator config: rtol, atol, max_step must be > 0");
  }
}

std::vector<double> uniform_grid(double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_dt must be > 0");
  std::vector<double> g{t0};
  const double slack = 1e-9 * dt;
  for (std::size_t k = 1;; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    if (t >= t1 - slack) break;
    g.push_back(t);
  }
  if (t1 > t0) g.push_back(t1);
  return g;
}

std::vector<double> aligned_grid(double t0, double t1, double dt, double origin) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_dt must be > 0");
  std::vector<double> g{t0};
  const double slack = 1e-9 * dt;
  auto k = static_cast<long long>(std::floor((t0 - origin) / dt)) + 1;
  for (;; ++k) {
    const double t = origin + static_cast<double>(k) * dt;
    if (t <= t0 + slack) continue;
    if (t >= t1 - slack) break;
    g.push_back(t);
  }
  if (t1 > t0) g.push_back(t1);
  return g;
}

IntegrationStats integrate_samples(const RhsFunction& f, std::vector<double>& y, double t0, double t1,
                                   const IntegratorConfig& cfg, std::span<const double> samples,
                                   const SampleObserver& observer) {
  cfg.validate();
  if (!(t1 > t0)) throw std::invalid_argument("integration span must be non-degenerate");
  const std::size_t n = y.size();
  IntegrationStats stats;
  std::array<std::vector<double>, 7> k;
  for (auto& ki : k) ki.assign(n, 0.0);
  std::vector<double> ytmp(n), ynew(n), err(n), yout(n);

  auto eval = [&](double t, const std::vector<double>& yy, std::vector<double>& out) {
    f(t, yy, out);
    ++stats.rhs_evaluations;
  };

  std::size_t next_sample = 0;
  auto emit_until = [&](double t_old, double h, double t_new, const std::vector<double>& y_old,
                        const std::vector<double>& y_new, bool final_step) {
    while (next_sample < samples.size()) {
      const double ts = samples[next_sample];
      if (ts > t_new && !(final_step && ts <= t1)) break;
      if (ts == t_old) {
        observer(ts, y_old);
      } else if (ts >= t_new) {
        observer(ts, y_new);
      } else {
        const double th = (ts - t_old) / h;
        const double th2 = th * th, th3 = th2 * th, th4 = th3 * th;
        for (std::size_t i = 0; i < n; ++i) {
          double q = 0.0;
          for (std::size_t s = 0; s < 7; ++s) {
            const auto& P = kDense[s];
            if (s == 1) continue;
            q += k[s][i] * (P[0] * th + P[1] * th2 + P[2] * th3 + P[3] * th4);
          }
          yout[i] = y_old[i] + h * q;
        }
        observer(ts, yout);
      }
      ++next_sample;
    }
  };

  double t = t0;
  while (next_sample < samples.size() && samples[next_sample] <= t0) {
    observer(samples[next_sample], y);
    ++next_sample;
  }

  eval(t, y, k[0]);
  const double span = t1 - t0;

  double h = cfg.initial_step;
  if (h <= 0.0) {
    const double d0 = scaled_max(y, y, cfg);
    const double d1 = scaled_max(k[0], y, cfg);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
    h0 = std::min({h0, span, cfg.max_step});
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h0 * k[0][i];
    eval(t + h0, ytmp, k[1]);
    for (std::size_t i = 0; i < n; ++i) err[i] = (k[1][i] - k[0][i]) / h0;
    const double d2 = scaled_max(err, y, cfg);
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6 * span, h0 * 1e-3)
                                                  : std::pow(0.01 / std::max(d1, d2), 0.2);
    h = std::min(100.0 * h0, h1);
  }
  h = std::min({h, span, cfg.max_step});

  bool last_rejected = false;
  while (t < t1) {
    if (stats.accepted + stats.rejected >= cfg.max_steps) throw StepLimitExceeded(t, cfg.max_steps);
    bool final_step = false;
    if (t + h >= t1 || t1 - (t + h) < 1e-12 * span) {
      h = t1 - t;
      final_step = true;
    }
    const double t_new = final_step ? t1 : t + h;

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k[0][i];
    eval(t + c2 * h, ytmp, k[1]);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
    eval(t + c3 * h, ytmp, k[2]);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
    eval(t + c4 * h, ytmp, k[3]);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
    eval(t + c5 * h, ytmp, k[4]);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] +
                            a65 * k[4][i]);
    eval(t + h, ytmp, k[5]);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] + b5 * k[4][i] +
                            b6 * k[5][i]);
    eval(t_new, ynew, k[6]);

    double enorm = 0.0;
    bool finite = true;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(ynew[i])) {
        finite = false;
        bad = i;
        break;
      }
      const double e = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                            e6 * k[5][i] + e7 * k[6][i]);
      const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      enorm = std::max(enorm, std::abs(e) / sc);
    }
    if (!finite) {
      if (h > 1e-14 * span) {
        // Overflow inside a too-large step: retry smaller before giving up.
        h *= 0.1;
        ++stats.rejected;
        last_rejected = true;
        if (h > 1e-12 * span) continue;
      }
      throw NonFiniteState(t_new, bad);
    }

    if (enorm <= 1.0) {
      emit_until(t, h, t_new, y, ynew, final_step);
      t = t_new;
      y.swap(ynew);
      std::swap(k[0], k[6]);
      ++stats.accepted;
      double fac = enorm == 0.0 ? 5.0 : 0.9 * std::pow(enorm, -0.2);
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
      h = std::min(h * fac, cfg.max_step);
      last_rejected = false;
    } else {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(enorm, -0.2));
      last_rejected = true;
      if (h < 1e-15 * span) throw NonFiniteState(t, 0);
    }
  }
  return stats;
}

Trajectory integrate(const MeanFieldRhs& f, const MeanFieldState& state0, double t0, double t1,
                     const IntegratorConfig& config, double sample_dt) {
  const auto grid = uniform_grid(t0, t1, sample_dt);
  Trajectory traj;
  traj.times.reserve(grid.size());
  traj.states.reserve(grid.size());
  traj.segment_marks.push_back(0);
  std::vector<double> y(state0.reals().begin(), state0.reals().end());
  RhsFunction raw = [&f](double t, std::span<const double> yy, std::span<double> dy) {
    const auto d = f(t, MeanFieldState::from_reals(yy));
    std::copy(d.reals().begin(), d.reals().end(), dy.begin());
  };
  traj.stats = integrate_samples(raw, y, t0, t1, config, grid, [&](double t, std::span<const double> yy) {
    traj.times.push_back(t);
    traj.states.push_back(MeanFieldState::from_reals(yy));
  });
  return traj;
}

Trajectory integrate(const SystemParams& params, const DriveSetting& drive, const MeanFieldState& state0,
                     double t0, double t1, const IntegratorConfig& config, double sample_dt) {
  return integrate([&](double, const MeanFieldState& s) { return rhs(s, params, drive); }, state0, t0,
                   t1, config, sample_dt);
}

}  // namespace srsim
