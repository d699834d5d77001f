#pragma once

#include <vector>

#include "qdot_erasure/dot_model.hpp"

namespace qdot {

enum class SegmentShape { Linear, Instantaneous };

/// One leg of a gate schedule mu(t). Instantaneous legs have zero duration
/// and move mu with the occupation frozen.
struct ProtocolSegment {
  double mu_start;
  double mu_end;
  double duration;
  SegmentShape shape;
};

struct InitialOccupation {
  bool steady_state = true;
  double value = 0.5;

  static InitialOccupation steady() { return {}; }
  static InitialOccupation fixed(double p) { return {false, p}; }
};

struct ProtocolSchedule {
  std::vector<ProtocolSegment> segments;
  InitialOccupation initial;

  /// Contiguity, non-negative durations, Instantaneous => zero duration,
  /// fixed initial occupation in [0, 1].
  void validate() const;
  double total_duration() const;
};

/// State after a completed integrator step or quench. `segment` is the index
/// of the schedule leg that produced it; t is strictly increasing within a
/// leg and a quench repeats the time of the preceding sample.
struct TrajectorySample {
  double t;
  double mu;
  double p;
  double work;
  int segment;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;

  const TrajectorySample& back() const { return samples.back(); }
};

/// dp/dt = Gamma_tot (p_ss(mu) - p), relaxing toward the broadened steady
/// state.
double relaxation_rate(double p, double mu, const DotSystem& sys, const NumericsConfig& cfg = {});

/// Integrates the rate equation through every leg with an adaptive
/// Dormand-Prince stepper (local error <= 1e-9 per step on p and on
/// work / energy scale), accumulating work int p dmu. Throws StepTooLarge
/// unless 0 < dt_max <= 0.1 / Gamma_tot.
Trajectory simulate(const DotSystem& sys, const ProtocolSchedule& schedule, double dt_max,
                    const NumericsConfig& cfg = {});

enum class ErasureTarget { Zero, One };

enum class RampProfile {
  /// A single constant-speed leg.
  Linear,
  /// Piecewise-linear legs whose durations are proportional to
  /// sqrt(dmu * dp), i.e. constant speed in thermodynamic length, which
  /// minimises lag dissipation for a given total duration.
  ThermodynamicLength,
};

/// 40 for thermal/bias dominated devices, 12 when a Gaussian kernel sets the
/// dominant scale.
double default_cutoff_multiplier(const DotSystem& sys);

/// Ramp from mu_1/2 past the far electrode (by cutoff_multiplier times the
/// dominant scale) and quench back. Zero raises the level, One lowers it.
ProtocolSchedule make_erasure_schedule(const DotSystem& sys, ErasureTarget target, double ramp_duration,
                                       double cutoff_multiplier,
                                       RampProfile profile = RampProfile::ThermodynamicLength,
                                       const NumericsConfig& cfg = {});

/// Overload using default_cutoff_multiplier.
ProtocolSchedule make_erasure_schedule(const DotSystem& sys, ErasureTarget target, double ramp_duration,
                                       RampProfile profile = RampProfile::ThermodynamicLength,
                                       const NumericsConfig& cfg = {});

/// The schedule run backwards: legs reversed and endpoints swapped.
ProtocolSchedule time_reversed(const ProtocolSchedule& schedule);

struct ReversibilityReport {
  double net_work;
  double p_error;
};

/// Erasure to zero immediately followed by its time reverse; reports the net
/// work and |p_final - 1/2|.
ReversibilityReport reversibility_check(const DotSystem& sys, double ramp_duration,
                                        RampProfile profile = RampProfile::ThermodynamicLength,
                                        const NumericsConfig& cfg = {});

/// Largest stable step, 0.1 / Gamma_tot.
double max_stable_step(const DotSystem& sys);

}  // namespace qdot
