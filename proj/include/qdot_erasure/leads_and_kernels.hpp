#pragma once

#include <variant>

#include "qdot_erasure/numerics.hpp"

namespace qdot {

/// Fermi-Dirac description of one electrode. Energies share whatever unit
/// the caller uses; temperature is carried as k_B*T.
struct LeadParams {
  double thermal_energy = 0.0;
  double chemical_potential = 0.0;

  void validate() const;
  bool is_zero_temperature() const { return thermal_energy == 0.0; }
};

/// An energy that may be infinite because the underlying integral diverges.
class FiniteOrDivergent {
 public:
  constexpr FiniteOrDivergent(double value) : value_(value) {}  // NOLINT(implicit)
  static constexpr FiniteOrDivergent divergent() { return FiniteOrDivergent(); }

  constexpr bool is_divergent() const { return divergent_; }
  constexpr bool is_finite() const { return !divergent_; }
  /// Throws DivergentInput for the divergent marker.
  double value() const;

 private:
  constexpr FiniteOrDivergent() : value_(0.0), divergent_(true) {}
  double value_;
  bool divergent_ = false;
};

/// Occupation 1/(1+exp((e-mu)/kT)); exact step at T = 0 (1/2 at e = mu).
double fermi_occupation(double energy, const LeadParams& lead);

/// 1 - fermi_occupation, evaluated without cancellation.
double fermi_vacancy(double energy, const LeadParams& lead);

/// -d f/d e, a logistic density centred on the chemical potential.
/// Throws ZeroTemperature when thermal_energy == 0.
double fermi_derivative_density(double energy, const LeadParams& lead);

/// Mean absolute deviation of the logistic density, 2 ln2 kT.
double fermi_derivative_mad(const LeadParams& lead);

struct DeltaShape {};
struct GaussianShape {
  double sigma;
};
struct LorentzianShape {
  double scale;
};

enum class KernelKind { Delta, Gaussian, Lorentzian };

/// Symmetric, median-zero lifetime-broadening density g.
class BroadeningKernel {
 public:
  BroadeningKernel() = default;

  static BroadeningKernel delta();
  static BroadeningKernel gaussian(double sigma);
  static BroadeningKernel lorentzian(double scale);

  KernelKind kind() const;
  /// sigma for a Gaussian, half-width for a Lorentzian, 0 for Delta.
  double width() const;
  bool is_delta() const { return kind() == KernelKind::Delta; }

  /// Decay class of the density's tails, for semi-infinite truncation.
  TailDecay tail() const;
  /// Half-width of the region outside which the density is negligible;
  /// infinite for a Lorentzian.
  double support_half_width(const NumericsConfig& cfg) const;

 private:
  using Shape = std::variant<DeltaShape, GaussianShape, LorentzianShape>;
  explicit BroadeningKernel(Shape shape) : shape_(shape) {}
  Shape shape_{DeltaShape{}};
};

/// Pointwise density; throws DeltaKernel for the Delta variant.
double kernel_density(double x, const BroadeningKernel& k);

/// P(X <= x). For Delta this is the unit step with value 1/2 at 0.
double kernel_cdf(double x, const BroadeningKernel& k);

/// P(X > x), accurate deep in the upper tail.
double kernel_survival(double x, const BroadeningKernel& k);

/// Delta -> 0, Gaussian -> sigma sqrt(2/pi), Lorentzian -> divergent.
FiniteOrDivergent kernel_mad(const BroadeningKernel& k);

/// Upper-tail quantile: the x with P(X > x) = p. Throws DomainError for
/// p outside (0, 1) and DeltaKernel for the Delta variant.
double kernel_quantile(double p, const BroadeningKernel& k);

}  // namespace qdot
