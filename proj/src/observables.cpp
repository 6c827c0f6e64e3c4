#include "srsim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "srsim/errors.hpp"

namespace srsim {

namespace {

void check_real(const MeanFieldState& s, std::size_t i, double eps) {
  if (std::abs(s[i].imag()) > eps) {
    throw HermiticityViolation("field " + std::string(slot_name(i)) + " has imaginary part " +
                               std::to_string(s[i].imag()));
  }
}

}  // namespace

std::array<Vec3, 2> first_moments(const MeanFieldState& s, const SystemParams& p,
                                  const ObservableTolerances& tol) {
  std::array<Vec3, 2> out{};
  for (int e = 0; e < 2; ++e) {
    check_real(s, slot(Field::S22, e), tol.hermiticity);
    const double n = p.ens[e].n_atoms;
    const cd c = s(Field::S12, e);
    // Jx = N/2 (s12 + s21), Jy = i N/2 (s12 - s21)
    out[e] = {n * c.real(), -n * c.imag(), 0.5 * n * (2.0 * s(Field::S22, e).real() - 1.0)};
  }
  return out;
}

SecondMoments second_moments(const MeanFieldState& s, const SystemParams& p,
                             const ObservableTolerances& tol) {
  SecondMoments m;
  for (int e = 0; e < 2; ++e) {
    check_real(s, slot(Field::S22, e), tol.hermiticity);
    check_real(s, slot(Field::P21_12, e), tol.hermiticity);
    check_real(s, slot(Field::P22_22, e), tol.hermiticity);
    const double n = p.ens[e].n_atoms;
    const double pairs = 0.25 * n * (n - 1.0);
    const double p1212 = s(Field::P12_12, e).real();
    const double p2112 = s(Field::P21_12, e).real();
    m.squares[e][0] = 0.25 * n + pairs * (2.0 * p1212 + 2.0 * p2112);
    m.squares[e][1] = 0.25 * n - pairs * (2.0 * p1212 - 2.0 * p2112);
    m.squares[e][2] =
        0.25 * n + pairs * (4.0 * s(Field::P22_22, e).real() - 4.0 * s(Field::S22, e).real() + 1.0);
  }
  check_real(s, slot(Field::X22_22), tol.hermiticity);
  const double n12 = p.ens[0].n_atoms * p.ens[1].n_atoms;
  const double x1212 = s(Field::X12_12).real();
  const double x2112 = s(Field::X21_12).real();
  m.cross[0] = 0.5 * n12 * (x1212 + x2112);
  m.cross[1] = -0.5 * n12 * (x1212 - x2112);
  m.cross[2] = 0.25 * n12 *
               (4.0 * s(Field::X22_22).real() - 2.0 * s(Field::S22, 0).real() -
                2.0 * s(Field::S22, 1).real() + 1.0);
  return m;
}

DickeNumbers dicke_numbers(const MeanFieldState& s, const SystemParams& p, Branch branch,
                           const ObservableTolerances& tol) {
  const auto m = second_moments(s, p, tol);
  const auto f = first_moments(s, p, tol);
  const double sign = branch == Branch::Plus ? 1.0 : -1.0;
  double casimir = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double si = i == 2 ? 1.0 : sign;
    casimir += m.squares[0][i] + m.squares[1][i] + 2.0 * si * m.cross[i];
  }
  const double slack = tol.casimir_rel * p.total_atoms();
  if (casimir < -slack) throw NegativeCasimir(casimir);
  const double c = std::max(casimir, 0.0);
  return {0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * c)), f[0][2] + f[1][2], casimir};
}

std::pair<Vec3, Vec3> bloch_vectors(const MeanFieldState& s, const SystemParams& p,
                                    const ObservableTolerances& tol) {
  const auto f = first_moments(s, p, tol);
  const Vec3 plus{f[0][0] + f[1][0], f[0][1] + f[1][1], f[0][2] + f[1][2]};
  const Vec3 minus{f[0][0] - f[1][0], f[0][1] - f[1][1], f[0][2] + f[1][2]};
  return {plus, minus};
}

CollectiveObservables collective_observables(const MeanFieldState& s, const SystemParams& p,
                                             const ObservableTolerances& tol) {
  check_real(s, slot(Field::NPhot), tol.hermiticity);
  CollectiveObservables o;
  o.n_phot = s(Field::NPhot).real();
  std::tie(o.bloch_plus, o.bloch_minus) = bloch_vectors(s, p, tol);
  const auto plus = dicke_numbers(s, p, Branch::Plus, tol);
  const auto minus = dicke_numbers(s, p, Branch::Minus, tol);
  o.jbar_plus = plus.jbar;
  o.mbar_plus = plus.mbar;
  o.total_j2_plus = plus.casimir;
  o.jbar_minus = minus.jbar;
  o.mbar_minus = minus.mbar;
  o.total_j2_minus = minus.casimir;
  return o;
}

double effective_atom_number(const std::vector<double>& times,
                             const std::vector<CollectiveObservables>& obs, double t0) {
  if (times.empty() || times.size() != obs.size() || t0 < times.front() || t0 > times.back()) {
    throw OutOfRange("t0 outside the sampled trajectory");
  }
  const auto it = std::lower_bound(times.begin(), times.end(), t0);
  const auto k = static_cast<std::size_t>(it - times.begin());
  if (times[k] == t0 || k == 0) return 2.0 * obs[k].jbar_plus;
  const double w = (t0 - times[k - 1]) / (times[k] - times[k - 1]);
  return 2.0 * ((1.0 - w) * obs[k - 1].jbar_plus + w * obs[k].jbar_plus);
}

EffectiveNumberDiagnostics effective_number_diagnostics(const MeanFieldState& s,
                                                        const SystemParams& p,
                                                        const ObservableTolerances& tol) {
  const double n = p.total_atoms();
  const double s22 =
      (p.ens[0].n_atoms * s(Field::S22, 0).real() + p.ens[1].n_atoms * s(Field::S22, 1).real()) / n;
  return {2.0 * dicke_numbers(s, p, Branch::Plus, tol).jbar, n * std::abs(2.0 * s22 - 0.5),
          n * std::abs(2.0 * s22 - 1.0)};
}

}  // namespace srsim
