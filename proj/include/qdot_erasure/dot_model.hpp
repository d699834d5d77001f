#pragma once

#include <vector>

#include "qdot_erasure/leads_and_kernels.hpp"
#include "qdot_erasure/numerics.hpp"

namespace qdot {

/// Dot-electrode tunnelling rates (any consistent 1/time unit).
struct TunnelRates {
  double rate_source = 1.0;
  double rate_drain = 1.0;

  void validate() const;
  double total() const { return rate_source + rate_drain; }
  double gamma_source() const { return rate_source / total(); }
  /// Defined as 1 - gamma_source so the pair sums to one exactly.
  double gamma_drain() const { return 1.0 - gamma_source(); }
};

/// The full device. Occupation functions accept any well-formed system;
/// the erasure analysis additionally requires mu_S >= mu_D (`validate`).
struct DotSystem {
  LeadParams source;
  LeadParams drain;
  TunnelRates rates;
  BroadeningKernel kernel;

  /// Leads, rates, and the mu_S >= mu_D convention.
  void validate() const;

  double bias() const { return source.chemical_potential - drain.chemical_potential; }
  /// max(kT_S, kT_D, kernel width), or 1 when all vanish.
  double dominant_scale() const;
  /// max(dominant_scale, bias); the reference for absolute tolerances.
  double tolerance_scale() const;
  /// Both leads at T = 0 and no broadening: p(mu) is a pure step function.
  bool is_atomic() const;
  /// Source and drain exchanged, rates included.
  DotSystem relabeled() const;
};

/// A point mass of the occupation distribution -dp/dmu.
struct Atom {
  double location;
  double weight;
};

/// Result of solving p(mu) = 1/2.
struct MedianLevel {
  double value;
  /// Set when p sits exactly at 1/2 over an interval; value is its midpoint.
  bool ambiguous = false;
};

/// gamma_S f_S(mu) + gamma_D f_D(mu).
double unbroadened_occupation(double mu, const DotSystem& sys);

/// (g * f)(mu) = integral of g(e - mu) f(e) de for one lead.
double lead_occupation(double mu, const LeadParams& lead, const BroadeningKernel& kernel,
                       const NumericsConfig& cfg = {});
/// (g * (1 - f))(mu), computed directly rather than as 1 - lead_occupation.
double lead_vacancy(double mu, const LeadParams& lead, const BroadeningKernel& kernel,
                    const NumericsConfig& cfg = {});
/// Absolutely continuous part of (g * f')(mu), f' = -df/de.
double lead_density(double mu, const LeadParams& lead, const BroadeningKernel& kernel,
                    const NumericsConfig& cfg = {});

/// Broadened steady-state occupation p(mu).
double occupation(double mu, const DotSystem& sys, const NumericsConfig& cfg = {});
/// 1 - p(mu) without cancellation for p near 1.
double vacancy(double mu, const DotSystem& sys, const NumericsConfig& cfg = {});

/// Continuous part of p'(mu) = -dp/dmu, assembled from density
/// cross-correlations. Throws PureStep for atomic systems.
double occupation_derivative_density(double mu, const DotSystem& sys,
                                     const NumericsConfig& cfg = {});

/// Point masses of -dp/dmu: one per zero-temperature lead when the kernel is
/// Delta, empty otherwise.
std::vector<Atom> occupation_atoms(const DotSystem& sys);

/// mu_1/2 with p(mu_1/2) = 1/2. For a discontinuous p this is the median of
/// -dp/dmu (the jump location).
MedianLevel half_occupation_level(const DotSystem& sys, const NumericsConfig& cfg = {});

}  // namespace qdot
