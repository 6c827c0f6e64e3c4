#pragma once

#include <array>
#include <numbers>

namespace srsim {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Converts an ordinary frequency in Hz to an angular frequency in rad/s.
constexpr double hz_to_rad(double hz) { return kTwoPi * hz; }
constexpr double rad_to_hz(double rad) { return rad / kTwoPi; }

/// Per-sub-ensemble parameters. All rates are angular frequencies (rad/s).
struct EnsembleParams {
  double n_atoms = 1.0;  // real-valued so that atom-loss schedules stay smooth
  double delta = 0.0;    // atomic detuning from the drive
  double g = 0.0;        // single-atom cavity coupling
  double gamma = 0.0;    // spontaneous emission
  double chi = 0.0;      // dephasing (enters the master equation as 2*chi*D[s22])
  double omega = 0.0;    // baseline drive amplitude

  bool operator==(const EnsembleParams&) const = default;
};

/// Physical parameters of the two-ensemble cavity model, in the drive frame.
struct SystemParams {
  double delta_c = 0.0;  // cavity detuning from the drive
  double kappa = 0.0;    // cavity photon loss
  std::array<EnsembleParams, 2> ens{};

  double total_atoms() const { return ens[0].n_atoms + ens[1].n_atoms; }

  /// Throws std::invalid_argument when a rate is negative, an atom number is
  /// below one, or a value is not finite.
  void validate() const;

  bool operator==(const SystemParams&) const = default;

  /// Experimental operating point: 1e7 atoms per ensemble, resonant drive with
  /// opposite amplitudes on the two ensembles and equal cavity couplings.
  static SystemParams reference_operating_point();
};

/// Instantaneous, piecewise-constant drive values handed to the right-hand side.
struct DriveSetting {
  std::array<double, 2> omega{};
  std::array<double, 2> delta{};
  double delta_c = 0.0;

  bool operator==(const DriveSetting&) const = default;
};

/// Drive at the baseline amplitudes and detunings stored in params.
DriveSetting baseline_drive(const SystemParams& params);
/// Same detunings as the baseline, drive amplitude switched off.
DriveSetting drive_off(const SystemParams& params);

/// In-phase (+) and out-of-phase (-) combinations of the two ensembles'
/// detunings, drive amplitudes and cavity couplings.
struct SuperpositionCoefficients {
  double xi_plus = 0.0;
  double xi_minus = 0.0;
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  double g_plus = 0.0;
  double g_minus = 0.0;
};

SuperpositionCoefficients superposition_coefficients(const SystemParams& params);

}  // namespace srsim
