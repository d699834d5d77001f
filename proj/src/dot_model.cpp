#include "qdot_erasure/dot_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qdot_erasure/errors.hpp"

namespace qdot {

void TunnelRates::validate() const {
  if (!(rate_source >= 0.0) || !(rate_drain >= 0.0) || !std::isfinite(total())) {
    throw InvalidSystem("tunnelling rates must be finite and non-negative");
  }
  if (!(total() > 0.0)) throw InvalidSystem("at least one tunnelling rate must be positive");
}

void DotSystem::validate() const {
  source.validate();
  drain.validate();
  rates.validate();
  if (source.chemical_potential < drain.chemical_potential) {
    throw InvalidSystem("source chemical potential must not lie below the drain's");
  }
}

double DotSystem::dominant_scale() const {
  const double scale = std::max({source.thermal_energy, drain.thermal_energy, kernel.width()});
  return scale > 0.0 ? scale : 1.0;
}

double DotSystem::tolerance_scale() const {
  return std::max(dominant_scale(), std::abs(bias()));
}

bool DotSystem::is_atomic() const {
  return kernel.is_delta() && source.is_zero_temperature() && drain.is_zero_temperature();
}

DotSystem DotSystem::relabeled() const {
  return {drain, source, {rates.rate_drain, rates.rate_source}, kernel};
}

double unbroadened_occupation(double mu, const DotSystem& sys) {
  return sys.rates.gamma_source() * fermi_occupation(mu, sys.source) +
         sys.rates.gamma_drain() * fermi_occupation(mu, sys.drain);
}

namespace {

double unbroadened_vacancy(double mu, const DotSystem& sys) {
  return sys.rates.gamma_source() * fermi_vacancy(mu, sys.source) +
         sys.rates.gamma_drain() * fermi_vacancy(mu, sys.drain);
}

// Window in the kernel variable x = e - mu outside which the Fermi function
// of `lead` is 0 or 1 to within exp(-cutoff), clipped to the kernel support.
struct Window {
  double fermi_lo;
  double fermi_hi;
  double lo;
  double hi;
  double step;  // location of the Fermi step in x

  bool empty() const { return !(lo < hi); }
};

Window fermi_window(double mu, const LeadParams& lead, const BroadeningKernel& kernel,
                    const NumericsConfig& cfg) {
  const double step = lead.chemical_potential - mu;
  const double reach = cfg.tail_cutoff_exponential * lead.thermal_energy;
  const double support = kernel.support_half_width(cfg);
  return {step - reach, step + reach, std::max(step - reach, -support),
          std::min(step + reach, support), step};
}

}  // namespace

double lead_occupation(double mu, const LeadParams& lead, const BroadeningKernel& kernel,
                       const NumericsConfig& cfg) {
  if (kernel.is_delta()) return fermi_occupation(mu, lead);
  if (lead.is_zero_temperature()) return kernel_cdf(lead.chemical_potential - mu, kernel);

  const Window w = fermi_window(mu, lead, kernel, cfg);
  double total = kernel_cdf(w.fermi_lo, kernel);
  if (!w.empty()) {
    const std::array<double, 2> breaks{0.0, w.step};
    total += integrate([&](double x) { return kernel_density(x, kernel) * fermi_occupation(mu + x, lead); },
                       w.lo, w.hi, cfg, breaks)
                 .value;
  }
  return std::clamp(total, 0.0, 1.0);
}

double lead_vacancy(double mu, const LeadParams& lead, const BroadeningKernel& kernel,
                    const NumericsConfig& cfg) {
  if (kernel.is_delta()) return fermi_vacancy(mu, lead);
  if (lead.is_zero_temperature()) return kernel_survival(lead.chemical_potential - mu, kernel);

  const Window w = fermi_window(mu, lead, kernel, cfg);
  double total = kernel_survival(w.fermi_hi, kernel);
  if (!w.empty()) {
    const std::array<double, 2> breaks{0.0, w.step};
    total += integrate([&](double x) { return kernel_density(x, kernel) * fermi_vacancy(mu + x, lead); },
                       w.lo, w.hi, cfg, breaks)
                 .value;
  }
  return std::clamp(total, 0.0, 1.0);
}

double lead_density(double mu, const LeadParams& lead, const BroadeningKernel& kernel,
                    const NumericsConfig& cfg) {
  if (kernel.is_delta()) {
    return lead.is_zero_temperature() ? 0.0 : fermi_derivative_density(mu, lead);
  }
  if (lead.is_zero_temperature()) return kernel_density(lead.chemical_potential - mu, kernel);

  const Window w = fermi_window(mu, lead, kernel, cfg);
  if (w.empty()) return 0.0;
  NumericsConfig density_cfg = cfg;
  density_cfg.abs_tol = cfg.abs_tol / std::max(lead.thermal_energy, kernel.width());
  const std::array<double, 2> breaks{0.0, w.step};
  const double value =
      integrate([&](double x) { return kernel_density(x, kernel) * fermi_derivative_density(mu + x, lead); },
                w.lo, w.hi, density_cfg, breaks)
          .value;
  return std::max(value, 0.0);
}

double occupation(double mu, const DotSystem& sys, const NumericsConfig& cfg) {
  if (sys.kernel.is_delta()) return unbroadened_occupation(mu, sys);
  const double gs = sys.rates.gamma_source();
  const double gd = sys.rates.gamma_drain();
  double p = 0.0;
  if (gs > 0.0) p += gs * lead_occupation(mu, sys.source, sys.kernel, cfg);
  if (gd > 0.0) p += gd * lead_occupation(mu, sys.drain, sys.kernel, cfg);
  return p;
}

double vacancy(double mu, const DotSystem& sys, const NumericsConfig& cfg) {
  if (sys.kernel.is_delta()) return unbroadened_vacancy(mu, sys);
  const double gs = sys.rates.gamma_source();
  const double gd = sys.rates.gamma_drain();
  double q = 0.0;
  if (gs > 0.0) q += gs * lead_vacancy(mu, sys.source, sys.kernel, cfg);
  if (gd > 0.0) q += gd * lead_vacancy(mu, sys.drain, sys.kernel, cfg);
  return q;
}

double occupation_derivative_density(double mu, const DotSystem& sys, const NumericsConfig& cfg) {
  if (sys.is_atomic()) {
    throw PureStep("occupation is a step function; its derivative is purely atomic");
  }
  const double gs = sys.rates.gamma_source();
  const double gd = sys.rates.gamma_drain();
  double density = 0.0;
  if (gs > 0.0) density += gs * lead_density(mu, sys.source, sys.kernel, cfg);
  if (gd > 0.0) density += gd * lead_density(mu, sys.drain, sys.kernel, cfg);
  return density;
}

std::vector<Atom> occupation_atoms(const DotSystem& sys) {
  std::vector<Atom> atoms;
  if (!sys.kernel.is_delta()) return atoms;
  const auto add = [&atoms](const LeadParams& lead, double weight) {
    if (!lead.is_zero_temperature() || weight == 0.0) return;
    for (auto& a : atoms) {
      if (a.location == lead.chemical_potential) {
        a.weight += weight;
        return;
      }
    }
    atoms.push_back({lead.chemical_potential, weight});
  };
  add(sys.drain, sys.rates.gamma_drain());
  add(sys.source, sys.rates.gamma_source());
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
  return atoms;
}

MedianLevel half_occupation_level(const DotSystem& sys, const NumericsConfig& cfg) {
  const double mu_lo = std::min(sys.source.chemical_potential, sys.drain.chemical_potential);
  const double mu_hi = std::max(sys.source.chemical_potential, sys.drain.chemical_potential);

  if (sys.is_atomic()) {
    // p steps down through the atoms in order; the median is the atom at
    // which the cumulative weight first reaches 1/2.
    const auto atoms = occupation_atoms(sys);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      cumulative += atoms[i].weight;
      if (cumulative == 0.5 && i + 1 < atoms.size()) {
        return {0.5 * (atoms[i].location + atoms[i + 1].location), true};
      }
      if (cumulative > 0.5) return {atoms[i].location, false};
    }
    return {atoms.back().location, false};
  }

  const double scale = sys.dominant_scale();
  const NumericsConfig scaled = cfg.scaled(sys.tolerance_scale());
  // p - 1/2 as (p - (1 - p)) / 2 keeps both tails accurate.
  const auto excess = [&](double mu) { return 0.5 * (occupation(mu, sys, cfg) - vacancy(mu, sys, cfg)); };
  return {find_root(excess, mu_lo - 60.0 * scale, mu_hi + 60.0 * scale, scaled), false};
}

}  // namespace qdot
