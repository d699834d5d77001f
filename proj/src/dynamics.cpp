#include "qdot_erasure/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "qdot_erasure/errors.hpp"

namespace qdot {

namespace odeint = boost::numeric::odeint;

namespace {

// p and work / energy scale, so one absolute tolerance fits both.
using State = std::array<double, 2>;

constexpr double kLocalError = 1e-9;
constexpr int kLengthPieces = 256;

}  // namespace

void ProtocolSchedule::validate() const {
  if (!initial.steady_state && !(initial.value >= 0.0 && initial.value <= 1.0)) {
    throw InvalidSchedule("fixed initial occupation must lie in [0, 1]");
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!std::isfinite(s.mu_start) || !std::isfinite(s.mu_end) || !(s.duration >= 0.0) ||
        !std::isfinite(s.duration)) {
      throw InvalidSchedule("segment " + std::to_string(i) + " has a non-finite endpoint or negative duration");
    }
    if (s.shape == SegmentShape::Instantaneous && s.duration != 0.0) {
      throw InvalidSchedule("instantaneous segment " + std::to_string(i) + " must have zero duration");
    }
    if (i > 0 && s.mu_start != segments[i - 1].mu_end) {
      throw InvalidSchedule("segment " + std::to_string(i) + " does not start where the previous one ends");
    }
  }
}

double ProtocolSchedule::total_duration() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration;
  return total;
}

double max_stable_step(const DotSystem& sys) { return 0.1 / sys.rates.total(); }

double relaxation_rate(double p, double mu, const DotSystem& sys, const NumericsConfig& cfg) {
  return sys.rates.total() * (occupation(mu, sys, cfg) - p);
}

Trajectory simulate(const DotSystem& sys, const ProtocolSchedule& schedule, double dt_max,
                    const NumericsConfig& cfg) {
  sys.rates.validate();
  schedule.validate();
  if (!(dt_max > 0.0) || dt_max > max_stable_step(sys) * (1.0 + 1e-12)) {
    throw StepTooLarge("dt_max must lie in (0, 0.1 / Gamma_tot]");
  }

  const double rate = sys.rates.total();
  const double energy = sys.tolerance_scale();
  Trajectory out;
  if (schedule.segments.empty()) return out;

  const double mu0 = schedule.segments.front().mu_start;
  State x{schedule.initial.steady_state ? occupation(mu0, sys, cfg) : schedule.initial.value, 0.0};
  double t_abs = 0.0;
  out.samples.push_back({0.0, mu0, x[0], 0.0, 0});

  auto stepper = odeint::make_controlled(kLocalError, 0.0, odeint::runge_kutta_dopri5<State>());

  for (std::size_t k = 0; k < schedule.segments.size(); ++k) {
    const auto& seg = schedule.segments[k];
    const int index = static_cast<int>(k);
    if (seg.shape == SegmentShape::Instantaneous || seg.duration == 0.0) {
      x[1] += (seg.mu_end - seg.mu_start) * x[0] / energy;
      out.samples.push_back({t_abs, seg.mu_end, x[0], x[1] * energy, index});
      continue;
    }

    const double speed = (seg.mu_end - seg.mu_start) / seg.duration;
    const auto mu_at = [&](double t) { return seg.mu_start + speed * t; };
    const auto rhs = [&](const State& s, State& dsdt, double t) {
      dsdt[0] = rate * (occupation(mu_at(t), sys, cfg) - s[0]);
      dsdt[1] = s[0] * speed / energy;
    };

    double t = 0.0;
    double dt = std::min(dt_max, seg.duration);
    while (t < seg.duration) {
      double h = std::min({dt, dt_max, seg.duration - t});
      double t_next = t;
      State trial = x;
      if (stepper.try_step(rhs, trial, t_next, h) == odeint::success) {
        if (seg.duration - t_next <= 1e-12 * seg.duration) t_next = seg.duration;
        t = t_next;
        x = trial;
        x[0] = std::clamp(x[0], 0.0, 1.0);
        out.samples.push_back({t_abs + t, mu_at(t), x[0], x[1] * energy, index});
      } else if (h < 1e-14 * seg.duration) {
        throw NonConvergence("step size underflow in segment " + std::to_string(k));
      }
      dt = h;
    }
    t_abs += seg.duration;
  }
  return out;
}

double default_cutoff_multiplier(const DotSystem& sys) {
  const bool gaussian_dominated = sys.kernel.kind() == KernelKind::Gaussian &&
                                  sys.kernel.width() >= std::max(sys.source.thermal_energy, sys.drain.thermal_energy);
  return gaussian_dominated ? 12.0 : 40.0;
}

ProtocolSchedule make_erasure_schedule(const DotSystem& sys, ErasureTarget target, double ramp_duration,
                                       double cutoff_multiplier, RampProfile profile,
                                       const NumericsConfig& cfg) {
  if (!(ramp_duration >= 0.0) || !std::isfinite(ramp_duration)) {
    throw InvalidSchedule("ramp duration must be finite and non-negative");
  }
  if (!(cutoff_multiplier > 0.0)) throw InvalidSchedule("cutoff multiplier must be positive");
  sys.validate();

  const double mu_half = half_occupation_level(sys, cfg).value;
  const double reach = cutoff_multiplier * sys.dominant_scale();
  const bool raise = target == ErasureTarget::Zero;
  const double mu_far = raise ? std::max(mu_half, sys.source.chemical_potential) + reach
                              : std::min(mu_half, sys.drain.chemical_potential) - reach;

  ProtocolSchedule schedule;
  // The erasure starts from (mu_1/2, p = 1/2); for step-function systems the
  // steady state exactly at the jump is not 1/2, so pin it.
  schedule.initial = sys.is_atomic() ? InitialOccupation::fixed(0.5) : InitialOccupation::steady();

  const auto leg = [](double a, double b, double duration) {
    return ProtocolSegment{a, b, duration, duration > 0.0 ? SegmentShape::Linear : SegmentShape::Instantaneous};
  };

  if (profile == RampProfile::Linear || ramp_duration == 0.0) {
    schedule.segments.push_back(leg(mu_half, mu_far, ramp_duration));
  } else {
    // Equal-width pieces; piece k gets time proportional to
    // sqrt(|dmu_k| |dp_k|), the optimum for constant speed within a piece.
    const auto population = [&](double mu) { return raise ? occupation(mu, sys, cfg) : vacancy(mu, sys, cfg); };
    std::array<double, kLengthPieces + 1> edges{};
    std::array<double, kLengthPieces> weights{};
    for (int i = 0; i <= kLengthPieces; ++i) {
      edges[i] = mu_half + (mu_far - mu_half) * static_cast<double>(i) / kLengthPieces;
    }
    edges[kLengthPieces] = mu_far;
    double previous = 0.5;
    double total = 0.0;
    for (int i = 0; i < kLengthPieces; ++i) {
      const double next = population(edges[i + 1]);
      weights[i] = std::sqrt(std::abs(edges[i + 1] - edges[i]) * std::abs(previous - next));
      total += weights[i];
      previous = next;
    }
    for (int i = 0; i < kLengthPieces; ++i) {
      const double share = total > 0.0 ? weights[i] / total : 1.0 / kLengthPieces;
      schedule.segments.push_back(leg(edges[i], edges[i + 1], ramp_duration * share));
    }
  }
  schedule.segments.push_back(leg(mu_far, mu_half, 0.0));
  return schedule;
}

ProtocolSchedule make_erasure_schedule(const DotSystem& sys, ErasureTarget target, double ramp_duration,
                                       RampProfile profile, const NumericsConfig& cfg) {
  return make_erasure_schedule(sys, target, ramp_duration, default_cutoff_multiplier(sys), profile, cfg);
}

ProtocolSchedule time_reversed(const ProtocolSchedule& schedule) {
  ProtocolSchedule out;
  out.initial = InitialOccupation::steady();
  for (auto it = schedule.segments.rbegin(); it != schedule.segments.rend(); ++it) {
    out.segments.push_back({it->mu_end, it->mu_start, it->duration, it->shape});
  }
  return out;
}

ReversibilityReport reversibility_check(const DotSystem& sys, double ramp_duration, RampProfile profile,
                                        const NumericsConfig& cfg) {
  ProtocolSchedule round_trip = make_erasure_schedule(sys, ErasureTarget::Zero, ramp_duration, profile, cfg);
  const ProtocolSchedule back = time_reversed(round_trip);
  round_trip.segments.insert(round_trip.segments.end(), back.segments.begin(), back.segments.end());
  const Trajectory trajectory = simulate(sys, round_trip, max_stable_step(sys), cfg);
  const auto& last = trajectory.back();
  return {last.work, std::abs(last.p - 0.5)};
}

}  // namespace qdot
