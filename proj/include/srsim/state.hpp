#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace srsim {

using cd = std::complex<double>;

/// Slot map of the mean-field state. Per-ensemble fields occupy two adjacent
/// slots (ensemble 1 first). Notation: s12 is the lowering operator |g><e|,
/// s21 raising, s22 the excited-state projector. Intra-ensemble pairs refer to
/// two distinct atoms of one ensemble; cross pairs put the ensemble-1 atom first.
enum class Field : std::size_t {
  A,         // <a>
  AA,        // <a a>
  NPhot,     // <a^dag a>
  S12,       // <s12>            x2
  S22 = S12 + 2,  // <s22>       x2
  AS12 = S22 + 2,  // <a s12>    x2
  AS21 = AS12 + 2,  // <a s21>   x2
  AS22 = AS21 + 2,  // <a s22>   x2
  P12_12 = AS22 + 2,  // <s12_1 s12_2>  x2
  P21_12 = P12_12 + 2,  // <s21_1 s12_2>  x2
  P22_12 = P21_12 + 2,  // <s22_1 s12_2>  x2
  P22_22 = P22_12 + 2,  // <s22_1 s22_2>  x2
  X12_12 = P22_22 + 2,
  X21_12,
  X22_12,
  X21_22,
  X22_22,
  Count
};

inline constexpr std::size_t kFieldCount = static_cast<std::size_t>(Field::Count);
inline constexpr std::size_t kStateReals = 2 * kFieldCount;
static_assert(kFieldCount == 26);

/// Slot index of a field; `ens` selects the ensemble for per-ensemble fields.
constexpr std::size_t slot(Field f, int ens = 0) { return static_cast<std::size_t>(f) + ens; }

/// Name of a slot ("s12_1", "x21_22", ...).
std::string_view slot_name(std::size_t slot);
/// Fields whose expectation value is real for any physical state.
bool slot_is_real(std::size_t slot);
/// Ensemble index (0/1) of a per-ensemble slot, -1 for cavity and cross slots.
int slot_ensemble(std::size_t slot);

/// The independent first- and second-order expectation values. Conjugate
/// moments are never stored; they are reconstructed when needed.
struct MeanFieldState {
  std::array<cd, kFieldCount> v{};

  cd& operator[](std::size_t i) { return v[i]; }
  const cd& operator[](std::size_t i) const { return v[i]; }
  cd& operator()(Field f, int ens = 0) { return v[slot(f, ens)]; }
  const cd& operator()(Field f, int ens = 0) const { return v[slot(f, ens)]; }

  /// Interleaved (re, im) view of the 52 reals.
  std::span<double, kStateReals> reals() {
    return std::span<double, kStateReals>(reinterpret_cast<double*>(v.data()), kStateReals);
  }
  std::span<const double, kStateReals> reals() const {
    return std::span<const double, kStateReals>(reinterpret_cast<const double*>(v.data()),
                                                kStateReals);
  }

  static MeanFieldState from_reals(std::span<const double> r);

  bool operator==(const MeanFieldState&) const = default;
};

/// Single-subsystem operators used to name moments: the cavity annihilation and
/// creation operators and the transition operators of representative atom
/// `atom` (0 or 1) of ensemble `ens`.
enum class OpKind { A, Ad, S12, S21, S22 };

struct Op {
  OpKind kind = OpKind::A;
  int ens = -1;
  int atom = 0;

  constexpr bool is_cavity() const { return kind == OpKind::A || kind == OpKind::Ad; }
  constexpr Op dagger() const {
    switch (kind) {
      case OpKind::A: return {OpKind::Ad, ens, atom};
      case OpKind::Ad: return {OpKind::A, ens, atom};
      case OpKind::S12: return {OpKind::S21, ens, atom};
      case OpKind::S21: return {OpKind::S12, ens, atom};
      case OpKind::S22: return *this;
    }
    return *this;
  }
};

inline constexpr Op kA{OpKind::A};
inline constexpr Op kAd{OpKind::Ad};
constexpr Op s12(int ens, int atom = 0) { return {OpKind::S12, ens, atom}; }
constexpr Op s21(int ens, int atom = 0) { return {OpKind::S21, ens, atom}; }
constexpr Op s22(int ens, int atom = 0) { return {OpKind::S22, ens, atom}; }

/// Operator product whose expectation value a slot stores (one or two factors).
struct SlotOperators {
  std::array<Op, 2> ops{};
  int count = 1;
};

SlotOperators slot_operators(std::size_t slot);

/// Builds a state by evaluating every slot's operator product with a moment
/// provider (anything with first(Op) and second(Op, Op)).
template <class Moments>
MeanFieldState state_from_moments(const Moments& m) {
  MeanFieldState s;
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    const auto so = slot_operators(i);
    s[i] = so.count == 1 ? m.first(so.ops[0]) : m.second(so.ops[0], so.ops[1]);
  }
  return s;
}

}  // namespace srsim
