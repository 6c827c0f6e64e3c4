#include "srsim/state.hpp"

#include <algorithm>
#include <stdexcept>

namespace srsim {

namespace {

constexpr std::array<std::string_view, kFieldCount> kNames = {
    "a",        "aa",       "n_phot",   "s12_1",    "s12_2",    "s22_1",    "s22_2",
    "a_s12_1",  "a_s12_2",  "a_s21_1",  "a_s21_2",  "a_s22_1",  "a_s22_2",  "p12_12_1",
    "p12_12_2", "p21_12_1", "p21_12_2", "p22_12_1", "p22_12_2", "p22_22_1", "p22_22_2",
    "x12_12",   "x21_12",   "x22_12",   "x21_22",   "x22_22"};

}  // namespace

std::string_view slot_name(std::size_t i) { return kNames.at(i); }

bool slot_is_real(std::size_t i) {
  return i == slot(Field::NPhot) || i == slot(Field::S22) || i == slot(Field::S22, 1) ||
         i == slot(Field::P21_12) || i == slot(Field::P21_12, 1) || i == slot(Field::P22_22) ||
         i == slot(Field::P22_22, 1) || i == slot(Field::X22_22);
}

int slot_ensemble(std::size_t i) {
  if (i < slot(Field::S12) || i >= slot(Field::X12_12)) return -1;
  return static_cast<int>((i - slot(Field::S12)) % 2);
}

MeanFieldState MeanFieldState::from_reals(std::span<const double> r) {
  if (r.size() != kStateReals) throw std::invalid_argument("mean-field state needs 52 reals");
  MeanFieldState s;
  std::copy(r.begin(), r.end(), s.reals().begin());
  return s;
}

SlotOperators slot_operators(std::size_t i) {
  const int e = slot_ensemble(i);
  const auto one = [](Op a) { return SlotOperators{{a, a}, 1}; };
  const auto two = [](Op a, Op b) { return SlotOperators{{a, b}, 2}; };
  switch (static_cast<Field>(i - (e > 0 ? 1 : 0))) {
    case Field::A: return one(kA);
    case Field::AA: return two(kA, kA);
    case Field::NPhot: return two(kAd, kA);
    case Field::S12: return one(s12(e));
    case Field::S22: return one(s22(e));
    case Field::AS12: return two(kA, s12(e));
    case Field::AS21: return two(kA, s21(e));
    case Field::AS22: return two(kA, s22(e));
    case Field::P12_12: return two(s12(e, 0), s12(e, 1));
    case Field::P21_12: return two(s21(e, 0), s12(e, 1));
    case Field::P22_12: return two(s22(e, 0), s12(e, 1));
    case Field::P22_22: return two(s22(e, 0), s22(e, 1));
    case Field::X12_12: return two(s12(0), s12(1));
    case Field::X21_12: return two(s21(0), s12(1));
    case Field::X22_12: return two(s22(0), s12(1));
    case Field::X21_22: return two(s21(0), s22(1));
    case Field::X22_22: return two(s22(0), s22(1));
    default: break;
  }
  throw std::out_of_range("bad state slot");
}

}  // namespace srsim
