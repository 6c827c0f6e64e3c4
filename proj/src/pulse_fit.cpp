#include "srsim/pulse_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace srsim {

namespace {

const double kFour_ln2 = 4.0 * std::numbers::ln2;

struct Samples {
  std::vector<double> t, y;
};

Samples slice(std::span<const double> times, std::span<const double> values, std::size_t lo,
              std::size_t hi) {
  Samples s;
  s.t.assign(times.begin() + lo, times.begin() + hi);
  s.y.assign(values.begin() + lo, values.begin() + hi);
  return s;
}

bool local_min(std::span<const double> v, std::size_t j) {
  const bool left = j == 0 || v[j] <= v[j - 1];
  const bool right = j + 1 == v.size() || v[j] <= v[j + 1];
  return left && right;
}

// FWHM read off the samples by linear interpolation of the half-maximum crossings.
double half_width(std::span<const double> t, std::span<const double> y, std::size_t peak) {
  const double half = 0.5 * y[peak];
  auto crossing = [&](int dir) -> double {
    std::size_t j = peak;
    while (true) {
      if ((dir < 0 && j == 0) || (dir > 0 && j + 1 == y.size())) return t[j];
      const std::size_t k = dir < 0 ? j - 1 : j + 1;
      if (y[k] < half) {
        const double w = (y[j] - half) / (y[j] - y[k]);
        return t[j] + w * (t[k] - t[j]);
      }
      j = k;
    }
  };
  return crossing(+1) - crossing(-1);
}

struct LmResult {
  std::array<double, 3> p{};
  double cost = 0.0;
  int iterations = 0;
  bool ok = false;
};

// Levenberg-Marquardt on the normalized model
//   f(u) = p0 exp(-4 ln2 (u - p1)^2 / p2^2),  u = (t - tc0) / w0,  y / y0.
LmResult levenberg_marquardt(const std::vector<double>& u, const std::vector<double>& y,
                             std::array<double, 3> p, const FitOptions& opt) {
  const std::size_t n = u.size();
  auto cost_of = [&](const std::array<double, 3>& q) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = (u[i] - q[1]) / q[2];
      const double r = q[0] * std::exp(-kFour_ln2 * z * z) - y[i];
      c += r * r;
    }
    return c;
  };

  LmResult res;
  double cost = cost_of(p);
  double lambda = 1e-3;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    res.iterations = it;
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const double z = (u[i] - p[1]) / p[2];
      const double e = std::exp(-kFour_ln2 * z * z);
      const double r = p[0] * e - y[i];
      const Eigen::Vector3d j{e, p[0] * e * 2.0 * kFour_ln2 * z / p[2],
                              p[0] * e * 2.0 * kFour_ln2 * z * z / p[2]};
      jtj += j * j.transpose();
      jtr += j * r;
    }
    if (cost == 0.0) {
      res.ok = true;
      break;
    }
    bool converged = false;
    while (true) {
      Eigen::Matrix3d a = jtj;
      for (int k = 0; k < 3; ++k) a(k, k) += lambda * jtj(k, k);
      const Eigen::Vector3d step = a.ldlt().solve(-jtr);
      std::array<double, 3> q{p[0] + step[0], p[1] + step[1], p[2] + step[2]};
      double rel = 0.0;
      for (int k = 0; k < 3; ++k) rel = std::max(rel, std::abs(step[k]) / std::max(std::abs(p[k]), 1.0));
      const double c = (q[0] > 0.0 && q[2] > 0.0 && step.allFinite()) ? cost_of(q)
                                                                        : std::numeric_limits<double>::infinity();
      if (c <= cost) {
        p = q;
        cost = c;
        lambda = std::max(lambda / 10.0, 1e-12);
        converged = rel < opt.rel_tolerance;
        break;
      }
      lambda *= 10.0;
      if (rel < opt.rel_tolerance || lambda > 1e16) {
        converged = true;
        break;
      }
    }
    if (converged) {
      res.ok = true;
      break;
    }
  }
  res.p = p;
  res.cost = cost;
  res.ok = res.ok && std::isfinite(cost) && p[0] > 0.0 && p[2] > 0.0;
  return res;
}

}  // namespace

double gaussian_area(double i_max, double tau) {
  return 0.5 * std::sqrt(std::numbers::pi / std::numbers::ln2) * i_max * tau;
}

double numeric_integral(std::span<const double> times, std::span<const double> values, Window window) {
  double sum = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i - 1] < window.begin || times[i] > window.end) continue;
    sum += 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
  }
  return sum;
}

PulseCharacteristics fit_gaussian_pulse(std::span<const double> times, std::span<const double> values,
                                        double t0, Window window, const FitOptions& opt) {
  if (times.size() != values.size()) throw std::invalid_argument("times and values differ in length");
  const auto lo = static_cast<std::size_t>(
      std::lower_bound(times.begin(), times.end(), window.begin) - times.begin());
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(times.begin(), times.end(), window.end) - times.begin());
  if (hi < lo + 10) throw FitError("fewer than 10 samples inside the fit window");

  const std::span<const double> tw = times.subspan(lo, hi - lo);
  const std::span<const double> yw = values.subspan(lo, hi - lo);
  const auto peak = static_cast<std::size_t>(std::max_element(yw.begin(), yw.end()) - yw.begin());
  const double ymax = yw[peak];
  if (!(ymax >= opt.peak_floor)) throw NoPeak("trace maximum below the detection floor");

  // Restrict to the dominant pulse: nearest local minima under 10% of the peak.
  std::size_t a = 0, b = yw.size() - 1;
  for (std::size_t j = peak; j-- > 0;) {
    if (yw[j] < 0.1 * ymax && local_min(yw, j)) {
      a = j;
      break;
    }
  }
  for (std::size_t j = peak + 1; j < yw.size(); ++j) {
    if (yw[j] < 0.1 * ymax && local_min(yw, j)) {
      b = j;
      break;
    }
  }
  if (b + 1 < a + 10) {
    a = 0;
    b = yw.size() - 1;
  }
  const Samples s = slice(tw, yw, a, b + 1);
  const std::size_t speak = peak - a;

  PulseCharacteristics pc;
  pc.t0 = t0;
  pc.fit_window = {s.t.front(), s.t.back()};
  pc.i_int_numeric = numeric_integral(times, values, window);

  const double tc0 = s.t[speak];
  double w0 = half_width(s.t, s.y, speak);
  if (!(w0 > 0.0)) w0 = 10.0 * (s.t.back() - s.t.front()) / static_cast<double>(s.t.size());

  std::vector<double> u(s.t.size()), y(s.t.size());
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    u[i] = (s.t[i] - tc0) / w0;
    y[i] = s.y[i] / ymax;
  }

  const std::array<std::array<double, 3>, 4> seeds = {
      {{1.0, 0.0, 1.0}, {1.0, 0.0, 0.6}, {1.0, 0.0, 1.6}, {0.8, 0.3, 1.0}}};
  LmResult best;
  best.cost = std::numeric_limits<double>::infinity();
  int total_iterations = 0;
  for (const auto& seed : seeds) {
    const LmResult r = levenberg_marquardt(u, y, seed, opt);
    total_iterations += r.iterations;
    if (r.ok) {
      best = r;
      break;
    }
    if (std::isfinite(r.cost) && r.cost < best.cost) best = r;
  }

  if (!best.ok) {
    pc.i_max = ymax;
    pc.tau = w0;
    pc.t_delay = tc0 - t0;
    pc.i_int = gaussian_area(pc.i_max, pc.tau);
    pc.iterations = total_iterations;
    throw FitDiverged("Gaussian fit did not converge from any seed", pc);
  }

  pc.i_max = best.p[0] * ymax;
  pc.t_delay = tc0 + best.p[1] * w0 - t0;
  pc.tau = best.p[2] * w0;
  pc.i_int = gaussian_area(pc.i_max, pc.tau);
  pc.residual_rms = ymax * std::sqrt(best.cost / static_cast<double>(u.size()));
  pc.iterations = total_iterations;
  pc.detected = pc.i_max >= opt.detection_threshold;
  return pc;
}

const char* to_string(ScalingModel m) {
  switch (m) {
    case ScalingModel::Linear: return "linear_in_r";
    case ScalingModel::Quadratic: return "quadratic_in_r";
    case ScalingModel::LogOverR: return "log_over_r";
    case ScalingModel::InverseR: return "inverse_r";
  }
  return "?";
}

namespace {

double basis(ScalingModel m, double r) {
  switch (m) {
    case ScalingModel::Linear: return r;
    case ScalingModel::Quadratic: return r * r;
    case ScalingModel::LogOverR: return std::log(r) / r;
    case ScalingModel::InverseR: return 1.0 / r;
  }
  return r;
}

}  // namespace

double ScalingFit::operator()(double r) const { return slope * basis(model, r) + intercept; }

ScalingFit fit_scaling(std::span<const ScalingPoint> points, ScalingModel model) {
  if (points.size() < 3) throw std::invalid_argument("scaling fit needs at least 3 points");
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    if (!(p.r > 0.0 && p.r <= 1.0)) throw std::invalid_argument("scaling fit: r outside (0, 1]");
    mx += basis(model, p.r);
    my += p.value;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    const double dx = basis(model, p.r) - mx, dy = p.value - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 1e-14 * std::max(1.0, mx * mx) * n)) throw SingularDesign("degenerate scaling design");
  ScalingFit f;
  f.model = model;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (const auto& p : points) {
    const double r = p.value - f(p.r);
    sse += r * r;
  }
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : (sse == 0.0 ? 1.0 : 0.0);
  return f;
}

}  // namespace srsim
