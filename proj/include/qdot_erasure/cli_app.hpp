#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qdot_erasure/dynamics.hpp"
#include "qdot_erasure/erasure.hpp"

namespace qdot {

/// Fixed CODATA values; never configurable.
struct Constants {
  static constexpr double boltzmann_ueV_per_K = 86.17333262;
  static constexpr double hbar_eV_s = 6.582119569e-16;
};

/// Thermal energy k_B T in micro-eV.
double thermal_energy_ueV(double kelvin);
/// hbar Gamma in micro-eV for a rate in s^-1.
double hbar_gamma_ueV(double rate_hz);

/// Laboratory description of a device. Energies in micro-eV, temperatures in
/// kelvin, rates in s^-1. The drain is the energy reference (mu_D = 0).
struct DeviceSpec {
  double temperature_source = 0.0;
  double temperature_drain = 0.0;
  double bias = 0.0;
  double rate_source = 0.0;
  double rate_drain = 0.0;
  KernelKind kernel = KernelKind::Delta;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  double hbar_gamma_tot() const { return hbar_gamma_ueV(rate_source + rate_drain); }
  /// Core-unit system with kernel width hbar Gamma_tot. When
  /// unit_rate_time is set the rates are rescaled so Gamma_tot = 1, i.e.
  /// time is measured in units of 1 / Gamma_tot.
  DotSystem to_system(bool unit_rate_time = false) const;
};

std::string_view kernel_name(KernelKind kind);

/// Parses "<number>[ ][prefix][unit]". The prefix is one SI letter
/// (f p n u µ μ m k M G T); the unit, if present, must equal `unit`. For
/// unit "eV" the result is in micro-eV and a bare number is already micro-eV;
/// otherwise a bare number is in the base unit. Throws std::invalid_argument.
double parse_quantity(std::string_view text, std::string_view unit);

/// Flat "key = value" text; '#' starts a comment. All six keys are required
/// exactly once. Throws ParseError (with line and field) or ValidationError.
DeviceSpec parse_config(std::istream& in);
DeviceSpec load_config(const std::string& path);

struct EtaRow {
  double eta;
  double work;
  double mu_eta;
  bool has_closed_form;
  double closed_form;
};

struct AnalysisReport {
  DeviceSpec spec;
  double gamma_source;
  double gamma_drain;
  double hbar_gamma_tot;
  double thermal_source;
  double thermal_drain;
  ErasureCosts costs;
  EnergyScales scales;
  /// Only meaningful when costs are finite.
  BoundReport bound;
  bool bound_checked;
  std::vector<EtaRow> eta;
};

/// Runs the erasure analysis. Lorentzian devices report divergent costs and
/// an eta-erasure table (default eta = 0.1, 0.01, 0.001); explicit etas add a
/// table for any kernel.
AnalysisReport analyze(const DeviceSpec& spec, const std::vector<double>& etas = {},
                       const NumericsConfig& cfg = {});

/// Aligned table followed by a "key: value" section.
void write_report(std::ostream& out, const AnalysisReport& report);

struct SweepRow {
  double bias;
  double hbar_gamma_tot;
  FiniteOrDivergent w_bar = 0.0;
  double e_therm;
  double e_bias;
  FiniteOrDivergent e_broad = 0.0;
  FiniteOrDivergent bound_lower = 0.0;
  FiniteOrDivergent bound_upper = 0.0;
};

/// points x points grid over bias in [0, bias_max] and kernel width in
/// [0, width_max] (micro-eV). Temperatures and the rate ratio come from the
/// spec; the width replaces hbar Gamma_tot. A delta or Gaussian spec sweeps
/// Gaussian widths (width 0 is the delta kernel). Rows are in bias-major
/// order regardless of how they are scheduled.
std::vector<SweepRow> sweep(const DeviceSpec& spec, double bias_max, double width_max, int points,
                            const NumericsConfig& cfg = {});
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct OccupationRow {
  double mu;
  double p_unbroadened;
  double p_broadened;
};

std::vector<OccupationRow> occupation_curve(const DeviceSpec& spec, double mu_min, double mu_max, int points,
                                            const NumericsConfig& cfg = {});
void write_occupation_csv(std::ostream& out, const std::vector<OccupationRow>& rows);

struct ProtocolRun {
  ErasureTarget target;
  double duration;
  /// Time in units of 1 / Gamma_tot, energies in micro-eV.
  Trajectory trajectory;
  double work;
  double final_p;
  /// W0 for target zero, W1 for target one.
  FiniteOrDivergent reference = 0.0;
};

/// Erasure protocol of ramp duration `duration` / Gamma_tot.
ProtocolRun run_protocol(const DeviceSpec& spec, ErasureTarget target, double duration,
                         RampProfile profile = RampProfile::ThermodynamicLength, const NumericsConfig& cfg = {});
void write_protocol_csv(std::ostream& out, const ProtocolRun& run);
std::string protocol_summary(const ProtocolRun& run);

struct LemmaSuiteReport {
  int trials;
  std::uint64_t seed;
  int lemma1_violations;
  int lemma2_violations;
  std::string text;

  bool ok() const { return lemma1_violations == 0 && lemma2_violations == 0; }
};

/// Random-pair sweeps of both MAD lemmas. Trial i draws its densities from a
/// generator seeded by (seed, i), so any failure is reproducible in
/// isolation. With near_delta the Lemma 1 partner is a one-cell spike.
LemmaSuiteReport run_lemma_suite(int trials, std::uint64_t seed, bool near_delta = false);

/// Full command-line entry point. Returns 0 on success (divergent results
/// included), 1 on a property violation or numerical failure, 2 on bad input.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qdot
