#include "qdot_erasure/erasure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "qdot_erasure/errors.hpp"

namespace qdot {

namespace {

// Decay mechanisms acting on both tails of p(mu): the hotter lead's Fermi
// tail and the kernel tail.
std::vector<TailDecay> occupation_tails(const DotSystem& sys) {
  return {{TailClass::Exponential, std::max(sys.source.thermal_energy, sys.drain.thermal_energy)},
          sys.kernel.tail()};
}

struct Span {
  double lower;  // bottom of the finite part; the lower tail extends below it
  double upper;  // top of the finite part; the upper tail extends above it
};

Span finite_span(const DotSystem& sys, double reference) {
  return {std::min({reference, sys.drain.chemical_potential, sys.source.chemical_potential}),
          std::max({reference, sys.drain.chemical_potential, sys.source.chemical_potential})};
}

// int_{from}^{inf} f over [from, top] plus the truncated tail above top.
double upper_integral(const RealFunction& f, double from, double top, const DotSystem& sys,
                      const NumericsConfig& cfg) {
  const std::array<double, 2> breaks{sys.drain.chemical_potential, sys.source.chemical_potential};
  double total = 0.0;
  if (from < top) total += integrate(f, from, top, cfg, breaks).value;
  const auto tails = occupation_tails(sys);
  total += integrate_semi_infinite(f, top, tails, cfg, TailSide::Upper).value;
  return total;
}

double lower_integral(const RealFunction& f, double to, double bottom, const DotSystem& sys,
                      const NumericsConfig& cfg) {
  const std::array<double, 2> breaks{sys.drain.chemical_potential, sys.source.chemical_potential};
  double total = 0.0;
  if (bottom < to) total += integrate(f, bottom, to, cfg, breaks).value;
  const auto tails = occupation_tails(sys);
  total += integrate_semi_infinite(f, bottom, tails, cfg, TailSide::Lower).value;
  return total;
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

}  // namespace

double deviation_about(const DotSystem& sys, double reference, const NumericsConfig& cfg) {
  if (sys.kernel.kind() == KernelKind::Lorentzian) {
    throw DivergentTail("Lorentzian broadening: the absolute deviation diverges");
  }
  double total = 0.0;
  for (const auto& atom : occupation_atoms(sys)) total += atom.weight * std::abs(atom.location - reference);
  if (sys.is_atomic()) return total;

  const NumericsConfig outer = cfg.scaled(sys.tolerance_scale());
  const Span span = finite_span(sys, reference);
  const auto above = [&](double mu) { return (mu - reference) * occupation_derivative_density(mu, sys, cfg); };
  const auto below = [&](double mu) { return (reference - mu) * occupation_derivative_density(mu, sys, cfg); };
  total += upper_integral(above, reference, span.upper, sys, outer);
  total += lower_integral(below, reference, span.lower, sys, outer);
  return total;
}

ErasureCosts erasure_costs(const DotSystem& sys, const NumericsConfig& cfg) {
  sys.validate();
  ErasureCosts costs;
  const MedianLevel median = half_occupation_level(sys, cfg);
  costs.mu_half = median.value;
  costs.mu_half_ambiguous = median.ambiguous;

  if (sys.kernel.kind() == KernelKind::Lorentzian) {
    costs.divergent = true;
    costs.w_zero = costs.w_one = costs.w_bar = costs.w_bar_mad = FiniteOrDivergent::divergent();
    return costs;
  }

  double w_zero = 0.0;
  double w_one = 0.0;
  if (sys.is_atomic()) {
    // p is piecewise constant: each atom contributes its weight times its
    // distance from mu_1/2 to whichever side it lies on.
    for (const auto& atom : occupation_atoms(sys)) {
      w_zero += atom.weight * std::max(atom.location - costs.mu_half, 0.0);
      w_one += atom.weight * std::max(costs.mu_half - atom.location, 0.0);
    }
  } else {
    const NumericsConfig outer = cfg.scaled(sys.tolerance_scale());
    const Span span = finite_span(sys, costs.mu_half);
    w_zero = upper_integral([&](double mu) { return occupation(mu, sys, cfg); }, costs.mu_half, span.upper,
                            sys, outer);
    w_one = lower_integral([&](double mu) { return vacancy(mu, sys, cfg); }, costs.mu_half, span.lower, sys,
                           outer);
  }
  costs.w_zero = w_zero;
  costs.w_one = w_one;
  const double w_bar = 0.5 * (w_zero + w_one);
  costs.w_bar = w_bar;

  const double w_bar_mad = 0.5 * deviation_about(sys, costs.mu_half, cfg);
  costs.w_bar_mad = w_bar_mad;
  costs.mad_discrepancy = w_bar > 0.0 ? std::abs(w_bar - w_bar_mad) / w_bar : std::abs(w_bar_mad);
  return costs;
}

EnergyScales energy_scales(const DotSystem& sys) {
  const double gs = sys.rates.gamma_source();
  const double gd = sys.rates.gamma_drain();
  EnergyScales scales;
  scales.e_therm = std::numbers::ln2 * (gs * sys.source.thermal_energy + gd * sys.drain.thermal_energy);
  scales.e_bias = 0.5 * std::min(gs, gd) * sys.bias();
  const FiniteOrDivergent mad = kernel_mad(sys.kernel);
  scales.e_broad = mad.is_divergent() ? mad : FiniteOrDivergent(0.5 * mad.value());
  return scales;
}

BoundReport check_bound(const ErasureCosts& costs, const EnergyScales& scales) {
  if (costs.w_bar.is_divergent() || scales.e_broad.is_divergent()) {
    throw DivergentInput("bound check needs finite costs and energy scales");
  }
  const double w_bar = costs.w_bar.value();
  const double broad = scales.e_broad.value();
  const double lower = std::max({scales.e_therm, scales.e_bias, broad});
  const double upper = scales.e_therm + scales.e_bias + broad;
  const double slack = 1e-9 * upper;
  return {lower,
          upper,
          w_bar,
          w_bar >= lower - slack && w_bar <= upper + slack,
          w_bar - lower,
          upper - w_bar};
}

double lorentzian_eta_work(double width, double eta) {
  const double t = std::tan(std::numbers::pi * (0.5 - eta));
  return width / (2.0 * std::numbers::pi) * std::log1p(t * t);
}

EtaErasure eta_erasure_work(const DotSystem& sys, double eta, const NumericsConfig& cfg) {
  if (!(eta > 0.0 && eta < 0.5)) throw DomainError("eta must lie in (0, 1/2)");
  sys.validate();

  const double mu_half = half_occupation_level(sys, cfg).value;
  const double scale = sys.dominant_scale();
  const NumericsConfig outer = cfg.scaled(sys.tolerance_scale());
  const auto excess = [&](double mu) { return occupation(mu, sys, cfg) - eta; };

  // Grow the bracket geometrically; Lorentzian tails need mu_eta ~ w / eta.
  double hi = std::max(mu_half, sys.source.chemical_potential) + scale;
  for (int i = 0; excess(hi) > 0.0; ++i) {
    if (i > 200) throw NonConvergence("could not bracket p(mu) = eta");
    hi = mu_half + 2.0 * (hi - mu_half);
  }
  const double mu_eta = excess(mu_half) <= 0.0 ? mu_half : find_root(excess, mu_half, hi, outer);

  // Occupation frozen during the quench back: eta on a continuous curve, the
  // post-jump plateau for step-function systems.
  double p_end = eta;
  if (sys.is_atomic()) {
    p_end = 0.0;
    for (const auto& atom : occupation_atoms(sys)) {
      if (atom.location > mu_eta) p_end += atom.weight;
    }
  }

  double raise = 0.0;
  if (mu_eta > mu_half) {
    const std::array<double, 2> breaks{sys.drain.chemical_potential, sys.source.chemical_potential};
    raise = integrate([&](double mu) { return occupation(mu, sys, cfg); }, mu_half, mu_eta, outer, breaks).value;
  }

  EtaErasure result{raise - (mu_eta - mu_half) * p_end, mu_eta, std::nullopt};
  if (sys.kernel.kind() == KernelKind::Lorentzian && sys.bias() == 0.0 && sys.source.is_zero_temperature() &&
      sys.drain.is_zero_temperature()) {
    const double closed = lorentzian_eta_work(sys.kernel.width(), eta);
    result.closed_form = closed;
    if (relative_gap(closed, result.work) > 1e-8) {
      throw RouteMismatch("eta-erasure work: numeric " + std::to_string(result.work) + " vs closed form " +
                          std::to_string(closed));
    }
  }
  return result;
}

}  // namespace qdot
