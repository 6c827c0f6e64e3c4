#pragma once

#include <span>
#include <string>
#include <vector>

#include "srsim/errors.hpp"

namespace srsim {

/// Time interval [begin, end] in seconds.
struct Window {
  double begin = 0.0;
  double end = 0.0;
};

/// Gaussian description of one superradiant pulse,
/// f(t) = i_max * exp(-4 ln2 (t - t0 - t_delay)^2 / tau^2).
struct PulseCharacteristics {
  double i_max = 0.0;          // photons
  double i_int = 0.0;          // photons * s, sqrt(pi / ln2) / 2 * i_max * tau
  double t_delay = 0.0;        // s, fitted centre minus t0
  double tau = 0.0;            // s, FWHM
  double t0 = 0.0;             // s, end of the drive
  double residual_rms = 0.0;   // photons
  bool detected = false;
  double i_int_numeric = 0.0;  // photons * s, trapezoid over the readout window
  Window fit_window;
  int iterations = 0;
};

/// LM failure on every seed; carries estimates read directly off the samples.
class FitDiverged : public FitError {
 public:
  FitDiverged(const std::string& what, PulseCharacteristics best)
      : FitError(what), best_effort(best) {}
  PulseCharacteristics best_effort;
};

struct FitOptions {
  double detection_threshold = 0.0;  // photons; detected when i_max >= threshold
  double peak_floor = 1e-20;         // photons; NoPeak below this
  int max_iterations = 200;
  double rel_tolerance = 1e-9;
};

/// sqrt(pi / ln2) / 2 * i_max * tau.
double gaussian_area(double i_max, double tau);

/// Least-squares Gaussian fit of the dominant pulse inside `window`. The fit
/// range is narrowed to the neighbourhood of the peak, bounded on each side by
/// the nearest local minimum that falls below 10% of the peak.
PulseCharacteristics fit_gaussian_pulse(std::span<const double> times, std::span<const double> values,
                                        double t0, Window window, const FitOptions& options = {});

/// Trapezoidal integral of the samples whose times lie inside `window`.
double numeric_integral(std::span<const double> times, std::span<const double> values, Window window);

enum class ScalingModel { Linear, Quadratic, LogOverR, InverseR };

const char* to_string(ScalingModel m);

/// value = coefficients[0] * basis(r) + coefficients[1], basis one of
/// r, r^2, ln(r)/r, 1/r.
struct ScalingFit {
  ScalingModel model = ScalingModel::Linear;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;

  double operator()(double r) const;
};

struct ScalingPoint {
  double r = 0.0;
  double value = 0.0;
};

/// Ordinary least squares in the model basis. Throws SingularDesign when the
/// basis values are (numerically) identical, std::invalid_argument for fewer
/// than three points or r outside (0, 1].
ScalingFit fit_scaling(std::span<const ScalingPoint> points, ScalingModel model);

}  // namespace srsim
