#pragma once

#include <array>
#include <vector>

#include "srsim/params.hpp"
#include "srsim/state.hpp"

namespace srsim {

using Vec3 = std::array<double, 3>;

/// Tolerances used when mapping a closed mean-field state to real observables.
struct ObservableTolerances {
  double hermiticity = 1e-9;  // allowed imaginary residue of physically real fields
  double casimir_rel = 1e-6;  // closure slack on the Casimir, relative to N1 + N2
};

/// <J_x>, <J_y>, <J_z> of each ensemble.
std::array<Vec3, 2> first_moments(const MeanFieldState& s, const SystemParams& p,
                                  const ObservableTolerances& tol = {});

struct SecondMoments {
  std::array<Vec3, 2> squares{};  // <J_{a,i}^2>, i = x, y, z
  Vec3 cross{};                   // <J_{1,i} J_{2,i}>
};

SecondMoments second_moments(const MeanFieldState& s, const SystemParams& p,
                             const ObservableTolerances& tol = {});

enum class Branch { Plus, Minus };

struct DickeNumbers {
  double jbar = 0.0;
  double mbar = 0.0;
  double casimir = 0.0;  // sum_i <(J_i^pm)^2>
};

/// Average Dicke numbers of the in-phase (plus) or out-of-phase (minus)
/// collective spin. Throws NegativeCasimir when the assembled Casimir is
/// below -tol.
DickeNumbers dicke_numbers(const MeanFieldState& s, const SystemParams& p, Branch branch,
                           const ObservableTolerances& tol = {});

/// Collective Bloch vectors A+ and A-.
std::pair<Vec3, Vec3> bloch_vectors(const MeanFieldState& s, const SystemParams& p,
                                    const ObservableTolerances& tol = {});

struct CollectiveObservables {
  double n_phot = 0.0;
  Vec3 bloch_plus{};
  Vec3 bloch_minus{};
  double jbar_plus = 0.0, mbar_plus = 0.0;
  double jbar_minus = 0.0, mbar_minus = 0.0;
  double total_j2_plus = 0.0, total_j2_minus = 0.0;
};

CollectiveObservables collective_observables(const MeanFieldState& s, const SystemParams& p,
                                             const ObservableTolerances& tol = {});

/// N_eff = 2 * jbar_plus at t0, linearly interpolated between samples.
/// Throws OutOfRange when t0 lies outside the sampled span.
double effective_atom_number(const std::vector<double>& times,
                             const std::vector<CollectiveObservables>& obs, double t0);

/// The two population-based shortcuts for N_eff found in the literature,
/// N |2 s22 - 1/2| and N |2 s22 - 1|, evaluated with the ensemble-averaged s22.
struct EffectiveNumberDiagnostics {
  double exact = 0.0;
  double half_offset_form = 0.0;
  double unit_offset_form = 0.0;
};

EffectiveNumberDiagnostics effective_number_diagnostics(const MeanFieldState& s,
                                                        const SystemParams& p,
                                                        const ObservableTolerances& tol = {});

}  // namespace srsim
