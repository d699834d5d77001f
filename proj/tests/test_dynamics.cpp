#include <doctest.h>

#include <cmath>

#include "qdot_erasure/dynamics.hpp"
#include "qdot_erasure/erasure.hpp"
#include "qdot_erasure/errors.hpp"

using namespace qdot;

namespace {

DotSystem make(double kt_s, double kt_d, double mu_s, double mu_d, double rate_s, double rate_d,
               BroadeningKernel k = BroadeningKernel::delta()) {
  return {{kt_s, mu_s}, {kt_d, mu_d}, {rate_s, rate_d}, k};
}

ProtocolSchedule single(double a, double b, double duration, InitialOccupation init = InitialOccupation::steady()) {
  ProtocolSchedule s;
  s.initial = init;
  s.segments.push_back({a, b, duration, duration > 0 ? SegmentShape::Linear : SegmentShape::Instantaneous});
  return s;
}

}  // namespace

TEST_CASE("relaxation_rate") {
  const NumericsConfig cfg;
  const auto sys = make(1, 1, 4, 0, 1, 3);
  CHECK(relaxation_rate(occupation(2.0, sys, cfg), 2.0, sys, cfg) == 0.0);
  CHECK(relaxation_rate(0.0, -100.0, sys, cfg) == doctest::Approx(4.0));
  CHECK(relaxation_rate(0.9, 2.0, sys, cfg) < 0.0);
}

TEST_CASE("constant level: exponential relaxation, no work") {
  const NumericsConfig cfg;
  const auto sys = make(1, 1, 0, 0, 0.5, 1.5);
  const double p_ss = occupation(0.7, sys, cfg);
  const Trajectory tr = simulate(sys, single(0.7, 0.7, 5.0, InitialOccupation::fixed(0.95)), 0.05, cfg);
  for (const auto& s : tr.samples) {
    CHECK(std::abs(s.p - (p_ss + (0.95 - p_ss) * std::exp(-2.0 * s.t))) < 1e-7);
    CHECK(s.work == 0.0);
  }
  CHECK(tr.back().t == doctest::Approx(5.0));
}

TEST_CASE("quench work is exact and linear in distance") {
  const NumericsConfig cfg;
  const auto sys = make(1, 0.5, 3, 0, 1, 2, BroadeningKernel::gaussian(0.7));
  const double p = occupation(-1.0, sys, cfg);
  const Trajectory a = simulate(sys, single(-1.0, 4.0, 0.0), 0.01, cfg);
  CHECK(a.back().work == doctest::Approx(5.0 * p).epsilon(1e-14));
  CHECK(a.back().p == p);
  const Trajectory b = simulate(sys, single(-1.0, 9.0, 0.0), 0.01, cfg);
  CHECK(b.back().work == doctest::Approx(2.0 * a.back().work).epsilon(1e-14));
}

TEST_CASE("simulate: validation") {
  const NumericsConfig cfg;
  const auto sys = make(1, 1, 0, 0, 1, 1);
  CHECK_THROWS_AS(simulate(sys, single(0, 1, 1), 0.06, cfg), StepTooLarge);
  CHECK_THROWS_AS(simulate(sys, single(0, 1, 1), 0.0, cfg), StepTooLarge);
  CHECK_NOTHROW(simulate(sys, single(0, 1, 1), 0.05, cfg));
  ProtocolSchedule gap = single(0, 1, 1);
  gap.segments.push_back({2, 3, 1, SegmentShape::Linear});
  CHECK_THROWS_AS(simulate(sys, gap, 0.05, cfg), InvalidSchedule);
  ProtocolSchedule bad = single(0, 1, 1);
  bad.segments.push_back({1, 3, 1, SegmentShape::Instantaneous});
  CHECK_THROWS_AS(bad.validate(), InvalidSchedule);
  CHECK_THROWS_AS(single(0, 1, 1, InitialOccupation::fixed(1.5)).validate(), InvalidSchedule);
}

TEST_CASE("trajectory invariants") {
  const NumericsConfig cfg;
  const auto sys = make(1, 1, 10, 0, 1, 2);
  const ProtocolSchedule sched = make_erasure_schedule(sys, ErasureTarget::Zero, 20.0, RampProfile::Linear, cfg);
  const Trajectory tr = simulate(sys, sched, max_stable_step(sys), cfg);
  CHECK(tr.samples.front().work == 0.0);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) {
    const auto& prev = tr.samples[i - 1];
    const auto& s = tr.samples[i];
    CHECK(s.p >= 0.0);
    CHECK(s.p <= 1.0);
    if (s.segment == prev.segment) {
      CHECK(s.t > prev.t);
    } else {
      CHECK(s.t >= prev.t);
    }
  }
}

TEST_CASE("work is additive over segments") {
  const NumericsConfig cfg;
  const auto sys = make(1, 1, 5, 0, 1, 1);
  ProtocolSchedule whole;
  whole.segments = {{0, 3, 4, SegmentShape::Linear}, {3, 8, 0, SegmentShape::Instantaneous}, {8, 1, 6, SegmentShape::Linear}};
  const Trajectory all = simulate(sys, whole, 0.05, cfg);

  double work = 0.0;
  double p = occupation(0.0, sys, cfg);
  for (const auto& seg : whole.segments) {
    ProtocolSchedule part;
    part.initial = InitialOccupation::fixed(p);
    part.segments = {seg};
    const Trajectory t = simulate(sys, part, 0.05, cfg);
    work += t.back().work;
    p = t.back().p;
  }
  // Local error 1e-9 per step (work measured in units of the energy scale),
  // accumulated over every step of either run.
  const double steps = static_cast<double>(all.samples.size());
  CHECK(std::abs(all.back().work - work) <= 2.0 * steps * 1e-9 * sys.tolerance_scale());
  CHECK(std::abs(all.back().p - p) <= 2.0 * steps * 1e-9);
}

TEST_CASE("erasure schedule construction") {
  const NumericsConfig cfg;
  const auto sys = make(1, 1, 0, 0, 1, 1);
  const ProtocolSchedule s = make_erasure_schedule(sys, ErasureTarget::Zero, 10.0, 40.0, RampProfile::Linear, cfg);
  REQUIRE(s.segments.size() == 2);
  CHECK(s.segments[0].mu_start == doctest::Approx(0.0));
  CHECK(s.segments[0].mu_end == doctest::Approx(40.0));
  CHECK(s.segments[1].shape == SegmentShape::Instantaneous);
  CHECK(s.segments[1].mu_end == doctest::Approx(0.0));
  const ProtocolSchedule down = make_erasure_schedule(sys, ErasureTarget::One, 10.0, 40.0, RampProfile::Linear, cfg);
  CHECK(down.segments[0].mu_end == doctest::Approx(-40.0));

  const ProtocolSchedule shaped = make_erasure_schedule(sys, ErasureTarget::Zero, 10.0, 40.0);
  CHECK(shaped.total_duration() == doctest::Approx(10.0));
  CHECK(shaped.segments.back().shape == SegmentShape::Instantaneous);

  const auto gauss = make(0.01, 0.01, 0, 0, 1, 1, BroadeningKernel::gaussian(1));
  CHECK(default_cutoff_multiplier(gauss) == 12.0);
  CHECK(default_cutoff_multiplier(sys) == 40.0);

  // Bias window wider than the cutoff: the ramp still clears the source.
  const auto biased = make(1, 1, 100, 0, 0.35, 0.65);
  const ProtocolSchedule wide = make_erasure_schedule(biased, ErasureTarget::Zero, 1.0, 40.0, RampProfile::Linear, cfg);
  CHECK(wide.segments[0].mu_end == doctest::Approx(140.0));
}

TEST_CASE("erasure to zero: final state and quasistatic limit") {
  const NumericsConfig cfg;
  const auto sys = make(1, 1, 0, 0, 1, 1);
  const double w0 = erasure_costs(sys, cfg).w_zero.value();
  const ProtocolSchedule s = make_erasure_schedule(sys, ErasureTarget::Zero, 200.0);
  const Trajectory tr = simulate(sys, s, max_stable_step(sys), cfg);
  CHECK(tr.back().mu == doctest::Approx(s.segments.front().mu_start));
  CHECK(tr.back().p < 1e-4);
  CHECK(std::abs(tr.back().work / w0 - 1.0) < 0.02);
}

TEST_CASE("quasistatic convergence is monotone in duration") {
  const NumericsConfig cfg;
  const auto sys = make(1, 1, 0, 0, 1, 1);
  const double w0 = erasure_costs(sys, cfg).w_zero.value();
  double previous = INFINITY;
  for (double duration : {20.0, 50.0, 100.0, 200.0}) {
    const Trajectory tr =
        simulate(sys, make_erasure_schedule(sys, ErasureTarget::Zero, duration), max_stable_step(sys), cfg);
    const double error = std::abs(tr.back().work - w0);
    CHECK(error < previous);
    previous = error;
  }
}

TEST_CASE("symmetric device: both targets cost the same") {
  const NumericsConfig cfg;
  const auto sys = make(1, 1, 6, 0, 1, 1);
  for (double duration : {5.0, 50.0}) {
    const double up =
        simulate(sys, make_erasure_schedule(sys, ErasureTarget::Zero, duration), max_stable_step(sys), cfg).back().work;
    const double down =
        simulate(sys, make_erasure_schedule(sys, ErasureTarget::One, duration), max_stable_step(sys), cfg).back().work;
    CHECK(up == doctest::Approx(down).epsilon(1e-3));
  }
}

TEST_CASE("zero duration: two quenches, nothing erased") {
  const NumericsConfig cfg;
  const auto sys = make(1, 1, 0, 0, 1, 1);
  const Trajectory tr = simulate(sys, make_erasure_schedule(sys, ErasureTarget::Zero, 0.0), max_stable_step(sys), cfg);
  CHECK(tr.back().p == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(tr.back().work) < 1e-12);
}

TEST_CASE("reversibility") {
  const NumericsConfig cfg;
  const double kt = 1.0;
  const auto sys = make(kt, kt, 0, 0, 1, 1);
  const ReversibilityReport slow = reversibility_check(sys, 500.0, RampProfile::ThermodynamicLength, cfg);
  CHECK(std::abs(slow.net_work) < 0.01 * kt);
  const ReversibilityReport none = reversibility_check(sys, 0.0, RampProfile::ThermodynamicLength, cfg);
  CHECK(std::abs(none.net_work) < 1e-12);
  CHECK(none.p_error < 1e-15);
  const ReversibilityReport fast = reversibility_check(sys, 1.0, RampProfile::ThermodynamicLength, cfg);
  CHECK(fast.net_work > 0.0);
}
