#pragma once

#include <optional>

#include "qdot_erasure/dot_model.hpp"

namespace qdot {

/// Minimum work of the reversible erasure protocols started from p = 1/2.
struct ErasureCosts {
  FiniteOrDivergent w_zero = 0.0;
  FiniteOrDivergent w_one = 0.0;
  /// (w_zero + w_one) / 2.
  FiniteOrDivergent w_bar = 0.0;
  double mu_half = 0.0;
  bool mu_half_ambiguous = false;
  bool divergent = false;
  /// Half the mean absolute deviation of -dp/dmu about mu_half; an
  /// independent route to w_bar.
  FiniteOrDivergent w_bar_mad = 0.0;
  /// |w_bar - w_bar_mad| / w_bar (absolute when w_bar == 0).
  double mad_discrepancy = 0.0;
};

struct EnergyScales {
  double e_therm = 0.0;
  double e_bias = 0.0;
  FiniteOrDivergent e_broad = 0.0;
};

struct BoundReport {
  double lower;
  double upper;
  double w_bar;
  bool satisfied;
  /// w_bar - lower and upper - w_bar.
  double lower_margin;
  double upper_margin;
};

/// W0 = int_{mu_1/2}^{inf} p, W1 = int_{-inf}^{mu_1/2} (1 - p), their mean,
/// and the MAD-form cross-check. Lorentzian broadening yields divergent
/// costs (mu_half is still computed).
ErasureCosts erasure_costs(const DotSystem& sys, const NumericsConfig& cfg = {});

/// int |mu - reference| (-dp/dmu) dmu, atoms included. Equals 2 W_bar at the
/// median and is larger anywhere else. Throws DivergentTail for Lorentzian
/// broadening.
double deviation_about(const DotSystem& sys, double reference, const NumericsConfig& cfg = {});

/// Closed-form thermal, bias, and broadening scales.
EnergyScales energy_scales(const DotSystem& sys);

/// Checks max(scales) <= w_bar <= sum(scales) with slack 1e-9 * upper.
/// Throws DivergentInput when either argument carries a divergent value.
BoundReport check_bound(const ErasureCosts& costs, const EnergyScales& scales);

struct EtaErasure {
  double work;
  double mu_eta;
  /// Present for zero-bias, zero-temperature, Lorentzian systems.
  std::optional<double> closed_form;
};

/// Work to raise the level quasistatically from mu_1/2 until p = eta and
/// quench back. Throws DomainError unless 0 < eta < 1/2; throws
/// RouteMismatch if the closed form applies and disagrees beyond 1e-8.
EtaErasure eta_erasure_work(const DotSystem& sys, double eta, const NumericsConfig& cfg = {});

/// (w / 2 pi) ln sec^2(pi (1/2 - eta)) for a Lorentzian of half-width w
/// broadening a single zero-temperature step.
double lorentzian_eta_work(double width, double eta);

}  // namespace qdot
