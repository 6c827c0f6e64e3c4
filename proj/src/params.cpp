#include "srsim/params.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace srsim {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("invalid system parameters: " + what);
}

}  // namespace

void SystemParams::validate() const {
  require(std::isfinite(delta_c), "delta_c not finite");
  require(std::isfinite(kappa) && kappa >= 0.0, "kappa must be >= 0");
  for (int e = 0; e < 2; ++e) {
    const auto& p = ens[e];
    const std::string tag = "ensemble " + std::to_string(e + 1) + ": ";
    require(std::isfinite(p.n_atoms) && p.n_atoms >= 1.0, tag + "n_atoms must be >= 1");
    require(std::isfinite(p.delta), tag + "delta not finite");
    require(std::isfinite(p.g), tag + "g not finite");
    require(std::isfinite(p.gamma) && p.gamma >= 0.0, tag + "gamma must be >= 0");
    require(std::isfinite(p.chi) && p.chi >= 0.0, tag + "chi must be >= 0");
    require(std::isfinite(p.omega), tag + "omega not finite");
  }
}

SystemParams SystemParams::reference_operating_point() {
  SystemParams p;
  p.delta_c = 0.0;
  p.kappa = hz_to_rad(0.78e6);
  for (int e = 0; e < 2; ++e) {
    p.ens[e].n_atoms = 1.0e7;
    p.ens[e].delta = 0.0;
    p.ens[e].g = hz_to_rad(0.61e3);
    p.ens[e].gamma = hz_to_rad(7.50e3);
    p.ens[e].chi = 0.0;
  }
  p.ens[0].omega = hz_to_rad(4.16e5);
  p.ens[1].omega = -hz_to_rad(4.16e5);
  return p;
}

DriveSetting baseline_drive(const SystemParams& params) {
  DriveSetting d;
  d.delta_c = params.delta_c;
  for (int e = 0; e < 2; ++e) {
    d.omega[e] = params.ens[e].omega;
    d.delta[e] = params.ens[e].delta;
  }
  return d;
}

DriveSetting drive_off(const SystemParams& params) {
  DriveSetting d = baseline_drive(params);
  d.omega = {0.0, 0.0};
  return d;
}

SuperpositionCoefficients superposition_coefficients(const SystemParams& params) {
  const auto& a = params.ens[0];
  const auto& b = params.ens[1];
  const double r = 1.0 / std::numbers::sqrt2;
  return {0.5 * (a.delta + b.delta), 0.5 * (a.delta - b.delta), r * (a.omega + b.omega),
          r * (a.omega - b.omega),   r * (a.g + b.g),            r * (a.g - b.g)};
}

}  // namespace srsim
