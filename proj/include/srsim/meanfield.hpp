#pragma once

#include <complex>

#include "srsim/params.hpp"
#include "srsim/state.hpp"

namespace srsim {

/// Moments read from a mean-field state. Conjugate moments are rebuilt from the
/// stored slots, and third moments use the second-order cumulant closure
///   <opq> = <o><pq> + <p><oq> + <q><op> - 2<o><p><q>.
/// Factors must sit on distinct subsystems, except for cavity pairs, whose
/// order is kept as given.
class ClosureMoments {
 public:
  explicit ClosureMoments(const MeanFieldState& s) : s_(s) {}

  cd first(Op x) const;
  cd second(Op x, Op y) const;
  cd third(Op x, Op y, Op z) const {
    const cd fx = first(x), fy = first(y), fz = first(z);
    return fx * second(y, z) + fy * second(x, z) + fz * second(x, y) - 2.0 * fx * fy * fz;
  }

 private:
  cd intra(int ens, OpKind k1, OpKind k2) const;
  cd cross(OpKind k1, OpKind k2) const;
  cd cavity_atom(OpKind cav, Op atom) const;

  const MeanFieldState& s_;
};

namespace detail {

inline constexpr cd kI{0.0, 1.0};

/// Heisenberg derivative terms of the mean-field equations, written against a
/// generic moment provider so that the same equations can be evaluated with
/// closed moments (production) or exact density-matrix moments (tests).
template <class Moments>
class Equations {
 public:
  Equations(const Moments& m, const SystemParams& p, const DriveSetting& d) : m_(m), p_(p), d_(d) {}

  /// <P' Q> for an atomic operator P and any operator Q on a different atom.
  cd atom_dot_times(Op P, Op Q) const {
    const int e = P.ens;
    const auto& ep = p_.ens[e];
    const double g = ep.g, om = d_.omega[e], de = d_.delta[e];
    const double dephase = 0.5 * ep.gamma + ep.chi;
    const Op S12 = s12(e, P.atom), S21 = s21(e, P.atom), S22 = s22(e, P.atom);
    switch (P.kind) {
      case OpKind::S12:
        return (-kI * de - dephase) * m_.second(S12, Q) +
               kI * g * (2.0 * m_.third(kA, S22, Q) - m_.second(kA, Q)) +
               kI * om * (2.0 * m_.second(S22, Q) - m_.first(Q));
      case OpKind::S21:
        return (kI * de - dephase) * m_.second(S21, Q) -
               kI * g * (2.0 * m_.third(kAd, S22, Q) - m_.second(kAd, Q)) -
               kI * om * (2.0 * m_.second(S22, Q) - m_.first(Q));
      case OpKind::S22:
        return -ep.gamma * m_.second(S22, Q) +
               kI * g * (m_.third(kAd, S12, Q) - m_.third(kA, S21, Q)) +
               kI * om * (m_.second(S12, Q) - m_.second(S21, Q));
      default: break;
    }
    return {};
  }

  /// d/dt <P Q> for two atomic operators on distinct atoms.
  cd pair(Op P, Op Q) const { return atom_dot_times(P, Q) + atom_dot_times(Q, P); }

  /// d/dt <a S> for an atomic operator S on atom 0 of its ensemble.
  cd cavity_atom(Op S) const {
    const int e = S.ens, o = 1 - e;
    const auto& ep = p_.ens[e];
    const auto& op = p_.ens[o];
    const double g = ep.g, om = d_.omega[e], de = d_.delta[e];
    const double dephase = 0.5 * ep.gamma + ep.chi;
    const Op S12 = s12(e), S21 = s21(e), S22 = s22(e);

    // <a' S>: the cavity field is driven by every atom; the same-atom product
    // s12*S collapses to a single-atom operator.
    cd same_atom{};
    switch (S.kind) {
      case OpKind::S12: same_atom = 0.0; break;
      case OpKind::S21: same_atom = 1.0 - m_.first(S22); break;
      case OpKind::S22: same_atom = m_.first(S12); break;
      default: break;
    }
    cd r = (-kI * d_.delta_c - 0.5 * p_.kappa) * m_.second(kA, S) - kI * g * same_atom -
           kI * g * (ep.n_atoms - 1.0) * m_.second(s12(e, 1), S) -
           kI * op.g * op.n_atoms * m_.second(s12(o), S);

    // <a S'>, normal ordered with a a^dag = a^dag a + 1.
    switch (S.kind) {
      case OpKind::S12:
        r += (-kI * de - dephase) * m_.second(kA, S12) +
             kI * g * (2.0 * m_.third(kA, kA, S22) - m_.second(kA, kA)) +
             kI * om * (2.0 * m_.second(kA, S22) - m_.first(kA));
        break;
      case OpKind::S21:
        r += (kI * de - dephase) * m_.second(kA, S21) -
             kI * g *
                 (2.0 * (m_.third(kAd, kA, S22) + m_.first(S22)) - (m_.second(kAd, kA) + 1.0)) -
             kI * om * (2.0 * m_.second(kA, S22) - m_.first(kA));
        break;
      case OpKind::S22:
        r += -ep.gamma * m_.second(kA, S22) +
             kI * g * (m_.third(kAd, kA, S12) + m_.first(S12) - m_.third(kA, kA, S21)) +
             kI * om * (m_.second(kA, S12) - m_.second(kA, S21));
        break;
      default: break;
    }
    return r;
  }

  MeanFieldState evaluate() const {
    MeanFieldState out;
    const double kappa = p_.kappa, dc = d_.delta_c;
    cd da = (-kI * dc - 0.5 * kappa) * m_.first(kA);
    cd dn = -kappa * m_.second(kAd, kA);
    cd daa = (-2.0 * kI * dc - kappa) * m_.second(kA, kA);
    for (int e = 0; e < 2; ++e) {
      const double ng = p_.ens[e].n_atoms * p_.ens[e].g;
      da += -kI * ng * m_.first(s12(e));
      dn += kI * ng * (m_.second(kA, s21(e)) - m_.second(kAd, s12(e)));
      daa += -2.0 * kI * ng * m_.second(kA, s12(e));
    }
    out(Field::A) = da;
    out(Field::AA) = daa;
    out(Field::NPhot) = dn;

    for (int e = 0; e < 2; ++e) {
      const auto& ep = p_.ens[e];
      const double g = ep.g, om = d_.omega[e], de = d_.delta[e];
      const double dephase = 0.5 * ep.gamma + ep.chi;
      out(Field::S12, e) = (-kI * de - dephase) * m_.first(s12(e)) +
                           kI * g * (2.0 * m_.second(kA, s22(e)) - m_.first(kA)) +
                           kI * om * (2.0 * m_.first(s22(e)) - 1.0);
      out(Field::S22, e) = -ep.gamma * m_.first(s22(e)) +
                           kI * g * (m_.second(kAd, s12(e)) - m_.second(kA, s21(e))) +
                           kI * om * (m_.first(s12(e)) - m_.first(s21(e)));
      out(Field::AS12, e) = cavity_atom(s12(e));
      out(Field::AS21, e) = cavity_atom(s21(e));
      out(Field::AS22, e) = cavity_atom(s22(e));
      out(Field::P12_12, e) = pair(s12(e, 0), s12(e, 1));
      out(Field::P21_12, e) = pair(s21(e, 0), s12(e, 1));
      out(Field::P22_12, e) = pair(s22(e, 0), s12(e, 1));
      out(Field::P22_22, e) = pair(s22(e, 0), s22(e, 1));
    }
    out(Field::X12_12) = pair(s12(0), s12(1));
    out(Field::X21_12) = pair(s21(0), s12(1));
    out(Field::X22_12) = pair(s22(0), s12(1));
    out(Field::X21_22) = pair(s21(0), s22(1));
    out(Field::X22_22) = pair(s22(0), s22(1));
    return out;
  }

 private:
  const Moments& m_;
  const SystemParams& p_;
  const DriveSetting& d_;
};

}  // namespace detail

/// Right-hand side of the mean-field equations with an arbitrary moment
/// provider. Used directly by tests that feed exact moments.
template <class Moments>
MeanFieldState evaluate_rhs(const Moments& m, const SystemParams& params, const DriveSetting& drive) {
  return detail::Equations<Moments>(m, params, drive).evaluate();
}

/// Time derivative of every stored field under the second-order cumulant
/// closure. Sign convention: the coherent part is -i[H, rho] with
/// H = delta_c a^dag a + sum delta s22 + ..., so an isolated cavity field obeys
/// d<a>/dt = (-i delta_c - kappa/2) <a>.
MeanFieldState rhs(const MeanFieldState& state, const SystemParams& params, const DriveSetting& drive);

/// All atoms in the ground state, empty cavity: every field is zero.
MeanFieldState ground_state(const SystemParams& params);

/// Applies the U(1) phase rotation a -> a e^{i theta}, s12 -> s12 e^{i theta}
/// to every stored moment.
MeanFieldState phase_rotate(const MeanFieldState& s, double theta);

/// Relabels ensemble 1 <-> ensemble 2 in a state.
MeanFieldState swap_ensembles(const MeanFieldState& s);
SystemParams swap_ensembles(const SystemParams& p);
DriveSetting swap_ensembles(const DriveSetting& d);

}  // namespace srsim
