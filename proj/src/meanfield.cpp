#include "srsim/meanfield.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace srsim {

cd ClosureMoments::first(Op x) const {
  switch (x.kind) {
    case OpKind::A: return s_(Field::A);
    case OpKind::Ad: return std::conj(s_(Field::A));
    case OpKind::S12: return s_(Field::S12, x.ens);
    case OpKind::S21: return std::conj(s_(Field::S12, x.ens));
    case OpKind::S22: return s_(Field::S22, x.ens);
  }
  return {};
}

cd ClosureMoments::cavity_atom(OpKind cav, Op atom) const {
  const int e = atom.ens;
  if (cav == OpKind::A) {
    switch (atom.kind) {
      case OpKind::S12: return s_(Field::AS12, e);
      case OpKind::S21: return s_(Field::AS21, e);
      case OpKind::S22: return s_(Field::AS22, e);
      default: break;
    }
  } else {
    switch (atom.kind) {
      case OpKind::S12: return std::conj(s_(Field::AS21, e));
      case OpKind::S21: return std::conj(s_(Field::AS12, e));
      case OpKind::S22: return std::conj(s_(Field::AS22, e));
      default: break;
    }
  }
  throw std::logic_error("cavity_atom: bad operator pair");
}

cd ClosureMoments::intra(int e, OpKind k1, OpKind k2) const {
  using K = OpKind;
  if (k1 == K::S12 && k2 == K::S12) return s_(Field::P12_12, e);
  if (k1 == K::S21 && k2 == K::S21) return std::conj(s_(Field::P12_12, e));
  if (k1 == K::S22 && k2 == K::S22) return s_(Field::P22_22, e);
  if ((k1 == K::S21 && k2 == K::S12) || (k1 == K::S12 && k2 == K::S21))
    return s_(Field::P21_12, e);
  if ((k1 == K::S22 && k2 == K::S12) || (k1 == K::S12 && k2 == K::S22))
    return s_(Field::P22_12, e);
  return std::conj(s_(Field::P22_12, e));  // {s22, s21}
}

cd ClosureMoments::cross(OpKind k1, OpKind k2) const {
  using K = OpKind;
  switch (k1) {
    case K::S12:
      if (k2 == K::S12) return s_(Field::X12_12);
      if (k2 == K::S21) return std::conj(s_(Field::X21_12));
      return std::conj(s_(Field::X21_22));
    case K::S21:
      if (k2 == K::S12) return s_(Field::X21_12);
      if (k2 == K::S21) return std::conj(s_(Field::X12_12));
      return s_(Field::X21_22);
    case K::S22:
      if (k2 == K::S12) return s_(Field::X22_12);
      if (k2 == K::S21) return std::conj(s_(Field::X22_12));
      return s_(Field::X22_22);
    default: break;
  }
  throw std::logic_error("cross: bad operator pair");
}

cd ClosureMoments::second(Op x, Op y) const {
  if (x.is_cavity() && y.is_cavity()) {
    const bool xa = x.kind == OpKind::A, ya = y.kind == OpKind::A;
    if (xa && ya) return s_(Field::AA);
    if (!xa && !ya) return std::conj(s_(Field::AA));
    if (!xa && ya) return s_(Field::NPhot);
    return s_(Field::NPhot) + 1.0;  // a a^dag
  }
  if (x.is_cavity()) return cavity_atom(x.kind, y);
  if (y.is_cavity()) return cavity_atom(y.kind, x);
  if (x.ens == y.ens) {
    if (x.atom == y.atom) throw std::logic_error("second: same-atom product");
    return intra(x.ens, x.kind, y.kind);
  }
  return x.ens == 0 ? cross(x.kind, y.kind) : cross(y.kind, x.kind);
}

MeanFieldState rhs(const MeanFieldState& state, const SystemParams& params, const DriveSetting& drive) {
  return evaluate_rhs(ClosureMoments(state), params, drive);
}

MeanFieldState ground_state(const SystemParams&) { return MeanFieldState{}; }

MeanFieldState phase_rotate(const MeanFieldState& s, double theta) {
  MeanFieldState out;
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    const auto so = slot_operators(i);
    int charge = 0;
    for (int k = 0; k < so.count; ++k) {
      switch (so.ops[k].kind) {
        case OpKind::A:
        case OpKind::S12: ++charge; break;
        case OpKind::Ad:
        case OpKind::S21: --charge; break;
        case OpKind::S22: break;
      }
    }
    out[i] = s[i] * std::polar(1.0, charge * theta);
  }
  return out;
}

MeanFieldState swap_ensembles(const MeanFieldState& s) {
  MeanFieldState out = s;
  for (Field f : {Field::S12, Field::S22, Field::AS12, Field::AS21, Field::AS22, Field::P12_12,
                  Field::P21_12, Field::P22_12, Field::P22_22}) {
    std::swap(out(f, 0), out(f, 1));
  }
  out(Field::X21_12) = std::conj(s(Field::X21_12));
  out(Field::X22_12) = std::conj(s(Field::X21_22));
  out(Field::X21_22) = std::conj(s(Field::X22_12));
  return out;
}

SystemParams swap_ensembles(const SystemParams& p) {
  SystemParams q = p;
  std::swap(q.ens[0], q.ens[1]);
  return q;
}

DriveSetting swap_ensembles(const DriveSetting& d) {
  DriveSetting q = d;
  std::swap(q.omega[0], q.omega[1]);
  std::swap(q.delta[0], q.delta[1]);
  return q;
}

}  // namespace srsim
