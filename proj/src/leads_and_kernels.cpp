#include "qdot_erasure/leads_and_kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qdot_erasure/errors.hpp"

namespace qdot {

namespace {

// exp(-745) is the last subnormal; beyond it the occupation is exactly 0/1.
constexpr double kExpClamp = 745.0;

// 1/(1+exp(t)) without overflow or cancellation.
double logistic_tail(double t) {
  if (t > kExpClamp) return 0.0;
  if (t < -kExpClamp) return 1.0;
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

double step_occupation(double energy, double mu) {
  if (energy < mu) return 1.0;
  if (energy > mu) return 0.0;
  return 0.5;
}

}  // namespace

void LeadParams::validate() const {
  if (!(thermal_energy >= 0.0) || !std::isfinite(thermal_energy)) {
    throw InvalidSystem("thermal_energy must be finite and non-negative");
  }
  if (!std::isfinite(chemical_potential)) {
    throw InvalidSystem("chemical_potential must be finite");
  }
}

double FiniteOrDivergent::value() const {
  if (divergent_) throw DivergentInput("quantity is divergent");
  return value_;
}

double fermi_occupation(double energy, const LeadParams& lead) {
  if (lead.is_zero_temperature()) return step_occupation(energy, lead.chemical_potential);
  return logistic_tail((energy - lead.chemical_potential) / lead.thermal_energy);
}

double fermi_vacancy(double energy, const LeadParams& lead) {
  if (lead.is_zero_temperature()) return 1.0 - step_occupation(energy, lead.chemical_potential);
  return logistic_tail((lead.chemical_potential - energy) / lead.thermal_energy);
}

double fermi_derivative_density(double energy, const LeadParams& lead) {
  if (lead.is_zero_temperature()) {
    throw ZeroTemperature("zero-temperature Fermi derivative is a delta function");
  }
  const double t = std::abs(energy - lead.chemical_potential) / lead.thermal_energy;
  if (t > kExpClamp) return 0.0;
  const double e = std::exp(-t);
  return e / ((1.0 + e) * (1.0 + e) * lead.thermal_energy);
}

double fermi_derivative_mad(const LeadParams& lead) {
  return 2.0 * std::numbers::ln2 * lead.thermal_energy;
}

BroadeningKernel BroadeningKernel::delta() { return BroadeningKernel(DeltaShape{}); }

BroadeningKernel BroadeningKernel::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidSystem("Gaussian kernel needs a finite sigma > 0");
  }
  return BroadeningKernel(GaussianShape{sigma});
}

BroadeningKernel BroadeningKernel::lorentzian(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidSystem("Lorentzian kernel needs a finite scale > 0");
  }
  return BroadeningKernel(LorentzianShape{scale});
}

KernelKind BroadeningKernel::kind() const {
  return static_cast<KernelKind>(shape_.index());
}

double BroadeningKernel::width() const {
  if (const auto* g = std::get_if<GaussianShape>(&shape_)) return g->sigma;
  if (const auto* l = std::get_if<LorentzianShape>(&shape_)) return l->scale;
  return 0.0;
}

TailDecay BroadeningKernel::tail() const {
  switch (kind()) {
    case KernelKind::Gaussian:
      return {TailClass::Gaussian, width()};
    case KernelKind::Lorentzian:
      return {TailClass::Algebraic, width()};
    case KernelKind::Delta:
      break;
  }
  return {TailClass::Gaussian, 0.0};
}

double BroadeningKernel::support_half_width(const NumericsConfig& cfg) const {
  switch (kind()) {
    case KernelKind::Gaussian:
      return cfg.tail_cutoff_gaussian * width();
    case KernelKind::Lorentzian:
      return std::numeric_limits<double>::infinity();
    case KernelKind::Delta:
      break;
  }
  return 0.0;
}

double kernel_density(double x, const BroadeningKernel& k) {
  const double w = k.width();
  switch (k.kind()) {
    case KernelKind::Gaussian: {
      const double z = x / w;
      return std::exp(-0.5 * z * z) / (w * std::sqrt(2.0 * std::numbers::pi));
    }
    case KernelKind::Lorentzian:
      return w / (std::numbers::pi * (w * w + x * x));
    case KernelKind::Delta:
      break;
  }
  throw DeltaKernel("the delta kernel has no pointwise density");
}

double kernel_survival(double x, const BroadeningKernel& k) {
  const double w = k.width();
  switch (k.kind()) {
    case KernelKind::Gaussian:
      return 0.5 * std::erfc(x / (w * std::numbers::sqrt2));
    case KernelKind::Lorentzian:
      // atan(w/x)/pi keeps full relative precision far in the upper tail.
      if (x > 0.0) return std::atan(w / x) / std::numbers::pi;
      return 0.5 - std::atan(x / w) / std::numbers::pi;
    case KernelKind::Delta:
      break;
  }
  return step_occupation(x, 0.0);
}

double kernel_cdf(double x, const BroadeningKernel& k) {
  // Every kernel is symmetric about zero, so P(X <= x) = P(X > -x).
  return kernel_survival(-x, k);
}

FiniteOrDivergent kernel_mad(const BroadeningKernel& k) {
  switch (k.kind()) {
    case KernelKind::Gaussian:
      return k.width() * std::sqrt(2.0 / std::numbers::pi);
    case KernelKind::Lorentzian:
      return FiniteOrDivergent::divergent();
    case KernelKind::Delta:
      break;
  }
  return 0.0;
}

double kernel_quantile(double p, const BroadeningKernel& k) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile probability must lie in (0, 1)");
  if (k.is_delta()) throw DeltaKernel("the delta kernel has no quantile function");
  if (p == 0.5) return 0.0;
  const double w = k.width();
  switch (k.kind()) {
    case KernelKind::Lorentzian:
      return w * std::tan(std::numbers::pi * (0.5 - p));
    case KernelKind::Gaussian: {
      if (p > 0.5) return -kernel_quantile(1.0 - p, k);
      // Survival is decreasing; bisect it on a bracket that covers every
      // representable tail probability.
      double lo = 0.0;
      double hi = 40.0 * w;
      for (int i = 0; i < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (kernel_survival(mid, k) > p) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    case KernelKind::Delta:
      break;
  }
  throw DeltaKernel("the delta kernel has no quantile function");
}

}  // namespace qdot
