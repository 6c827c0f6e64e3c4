#include <doctest.h>

#include <cmath>
#include <numbers>

#include "srsim/errors.hpp"
#include "srsim/meanfield.hpp"
#include "srsim/protocol.hpp"

using namespace srsim;

namespace {

SystemParams lossless_rabi(double omega) {
  SystemParams p;
  for (auto& e : p.ens) e = {1e6, 0.0, 0.0, 0.0, 0.0, omega};
  p.ens[1].omega = -omega;
  return p;
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("segment bookkeeping") {
  const auto p = SystemParams::reference_operating_point();
  Protocol pr;
  pr.segments = {{1e-7, baseline_drive(p), "a"}, {2e-7, drive_off(p), "b"}, {1e-7, baseline_drive(p), "c"},
                 {5e-7, drive_off(p), "tail"}};
  CHECK(pr.duration() == doctest::Approx(9e-7));
  CHECK(pr.drive_end() == doctest::Approx(4e-7));
  CHECK(pr.readout().begin == doctest::Approx(4e-7));
  CHECK(pr.readout().end == doctest::Approx(9e-7));
  pr.segments.back().label = "readout";
  pr.segments.push_back({1e-7, drive_off(p), "after"});
  CHECK(pr.readout().end == doctest::Approx(9e-7));
  pr.readout_window = Window{1e-7, 2e-7};
  CHECK(pr.readout().begin == 1e-7);

  Protocol bad;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.segments = {{-1.0, drive_off(p), "neg"}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("trajectory samples are aligned, ordered and unique across segments") {
  const auto p = SystemParams::reference_operating_point();
  Protocol pr;
  pr.segments = {{0.1234e-6, baseline_drive(p), "drive"}, {0.3e-6, drive_off(p), "free"}};
  RunSettings rs;
  rs.sample_dt = 1e-8;
  const auto run = run_protocol(p, pr, rs);
  const auto& t = run.trajectory.times;
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
  REQUIRE(run.trajectory.segment_marks.size() == 2);
  CHECK(t[run.trajectory.segment_marks[1]] == doctest::Approx(0.1234e-6));
  CHECK(t.front() == 0.0);
  CHECK(t.back() == doctest::Approx(0.4234e-6));
  CHECK(t[1] == doctest::Approx(1e-8));
  CHECK(run.observables.size() == t.size());
}

TEST_CASE("resonant lossless drive follows the Rabi formula") {
  const double om = hz_to_rad(4.16e5);
  const auto p = lossless_rabi(om);
  Protocol pr;
  pr.segments = {{2e-6, baseline_drive(p), "drive"}};
  RunSettings rs;
  rs.integrator.rtol = 1e-10;
  rs.integrator.atol = 1e-13;
  const auto run = run_protocol(p, pr, rs);
  for (std::size_t i = 0; i < run.trajectory.size(); i += 97) {
    const double t = run.trajectory.times[i];
    const double expected = std::pow(std::sin(om * t), 2);
    for (int e = 0; e < 2; ++e) CHECK(std::abs(run.trajectory.states[i](Field::S22, e).real() - expected) < 1e-8);
  }
}

TEST_CASE("pi/2 duration and Ramsey layout") {
  const auto p = SystemParams::reference_operating_point();
  CHECK(pi_half_duration(p) == doctest::Approx(std::numbers::pi / (4 * hz_to_rad(4.16e5))));
  auto zero = p;
  zero.ens[0].omega = 0.0;
  CHECK_THROWS_AS(pi_half_duration(zero), ZeroDrive);

  const double d = hz_to_rad(1e5);
  const auto pr = ramsey_protocol(p, 4.7e-6, d);
  REQUIRE(pr.segments.size() == 4);
  CHECK(pr.segments[1].label == "free");
  CHECK(pr.segments[1].drive.omega[0] == 0.0);
  for (const auto& s : pr.segments) {
    CHECK(s.drive.delta[0] == doctest::Approx(p.ens[0].delta + d));
    CHECK(s.drive.delta_c == doctest::Approx(p.delta_c + d));
  }
  CHECK(pr.readout().end - pr.readout().begin == doctest::Approx(2e-6));
  CHECK(ramsey_protocol(p, 0.0, 0.0).segments.size() == 3);
}

TEST_CASE("opposite detunings give mirror-image readout signals") {
  const auto p = SystemParams::reference_operating_point();
  RunSettings rs;
  for (double khz : {50.0, 160.0, 420.0}) {
    const double d = hz_to_rad(khz * 1e3);
    const auto a = ramsey(p, 4.7e-6, d, rs);
    const auto b = ramsey(p, 4.7e-6, -d, rs);
    CHECK(a.pulse.i_int_numeric == doctest::Approx(b.pulse.i_int_numeric).epsilon(1e-6));
  }
}

TEST_CASE("sweep results do not depend on the thread count") {
  const auto p = SystemParams::reference_operating_point();
  RunSettings rs;
  std::vector<double> deltas;
  for (int k = 0; k < 6; ++k) deltas.push_back(hz_to_rad(-300e3 + 120e3 * k));
  SweepOptions serial, parallel;
  parallel.jobs = 4;
  const auto a = spectroscopy_sweep(p, 4.7e-6, deltas, rs, serial);
  const auto b = spectroscopy_sweep(p, 4.7e-6, deltas, rs, parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].delta == deltas[i]);
    CHECK(a[i].pulse.i_int == b[i].pulse.i_int);
    CHECK(a[i].pulse.detected == b[i].pulse.detected);
    CHECK(a[i].error == b[i].error);
  }
}

TEST_CASE("lock without atom loss repeats identical cycles") {
  const auto p = SystemParams::reference_operating_point();
  LockConfig lc;
  lc.cycles = 3;
  lc.gamma_loss = 0.0;
  lc.atom_offset = hz_to_rad(5e3);
  const auto s = frequency_lock_run(p, lc, RunSettings{});
  REQUIRE(s.size() == 6);
  for (int c = 1; c < 3; ++c) {
    CHECK(s[2 * c].i_int == s[0].i_int);
    CHECK(s[2 * c + 1].i_int == s[1].i_int);
    CHECK(s[2 * c].error_signal == s[0].error_signal);
  }
  CHECK(s[1].time == doctest::Approx(2e-3));
  CHECK(s[2].time == doctest::Approx(4e-3));
  CHECK(s[0].error_signal != 0.0);

  lc.cycles = 0;
  CHECK_THROWS_AS(frequency_lock_run(p, lc, RunSettings{}), std::invalid_argument);
}

}  // TEST_SUITE
