#include "qdot_erasure/cli_app.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>

#include "qdot_erasure/errors.hpp"
#include "qdot_erasure/mad_oracle.hpp"

namespace qdot {

namespace {

constexpr std::array<std::string_view, 6> kConfigKeys{"temperature_source", "temperature_drain", "bias",
                                                      "rate_source",        "rate_drain",        "kernel"};

std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string number(const FiniteOrDivergent& x) { return x.is_divergent() ? "divergent" : number(x.value()); }

// Short form for the human-readable table.
std::string brief(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string brief(const FiniteOrDivergent& x) { return x.is_divergent() ? "divergent" : brief(x.value()); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Decimal exponent of a leading SI prefix, consumed from `rest`.
int prefix_exponent(std::string_view& rest) {
  static const std::array<std::pair<std::string_view, int>, 11> prefixes{{{"f", -15},
                                                                         {"p", -12},
                                                                         {"n", -9},
                                                                         {"u", -6},
                                                                         {"\xC2\xB5", -6},  // micro sign
                                                                         {"\xCE\xBC", -6},  // Greek mu
                                                                         {"m", -3},
                                                                         {"k", 3},
                                                                         {"M", 6},
                                                                         {"G", 9},
                                                                         {"T", 12}}};
  for (const auto& [symbol, exponent] : prefixes) {
    if (rest.substr(0, symbol.size()) == symbol) {
      rest.remove_prefix(symbol.size());
      return exponent;
    }
  }
  return 0;
}

// value * 10^exponent, dividing for negative exponents so that e.g. 40m is
// the double nearest 0.04.
double scale_decimal(double value, int exponent) {
  const double p = std::pow(10.0, std::abs(exponent));
  return exponent < 0 ? value / p : value * p;
}

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  }
  if (points > 1) out.back() = hi;
  return out;
}

}  // namespace

double thermal_energy_ueV(double kelvin) { return Constants::boltzmann_ueV_per_K * kelvin; }

double hbar_gamma_ueV(double rate_hz) { return Constants::hbar_eV_s * rate_hz * 1e6; }

std::string_view kernel_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::Delta:
      return "delta";
    case KernelKind::Gaussian:
      return "gaussian";
    case KernelKind::Lorentzian:
      return "lorentzian";
  }
  return "?";
}

void DeviceSpec::validate() const {
  const auto check = [](double v, const char* field) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError(std::string(field) + " must be finite and >= 0", field);
  };
  check(temperature_source, "temperature_source");
  check(temperature_drain, "temperature_drain");
  check(bias, "bias");
  check(rate_source, "rate_source");
  check(rate_drain, "rate_drain");
  if (!(rate_source + rate_drain > 0.0)) {
    throw ValidationError("rate_source + rate_drain must be positive", "rate_source");
  }
}

DotSystem DeviceSpec::to_system(bool unit_rate_time) const {
  validate();
  DotSystem sys;
  sys.source = {thermal_energy_ueV(temperature_source), bias};
  sys.drain = {thermal_energy_ueV(temperature_drain), 0.0};
  const double total = rate_source + rate_drain;
  sys.rates = unit_rate_time ? TunnelRates{rate_source / total, rate_drain / total}
                             : TunnelRates{rate_source, rate_drain};
  const double width = hbar_gamma_tot();
  switch (kernel) {
    case KernelKind::Delta:
      sys.kernel = BroadeningKernel::delta();
      break;
    case KernelKind::Gaussian:
      sys.kernel = BroadeningKernel::gaussian(width);
      break;
    case KernelKind::Lorentzian:
      sys.kernel = BroadeningKernel::lorentzian(width);
      break;
  }
  return sys;
}

double parse_quantity(std::string_view text, std::string_view unit) {
  text = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || !std::isfinite(value)) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  std::string_view rest = trim(std::string_view(end, static_cast<std::size_t>(text.data() + text.size() - end)));
  if (rest.empty()) return value;

  // Energies are returned in micro-eV.
  const int base = unit == "eV" ? 6 : 0;
  // A lone unit ("5 K", "2 Hz") must not have its first letter read as a
  // prefix.
  if (rest == unit) return scale_decimal(value, base);
  std::string_view after_prefix = rest;
  const int exponent = prefix_exponent(after_prefix);
  if (exponent == 0) {
    throw std::invalid_argument("unexpected unit '" + std::string(rest) + "' (expected " + std::string(unit) + ")");
  }
  if (after_prefix.empty()) return scale_decimal(value, exponent);
  if (after_prefix != unit) {
    throw std::invalid_argument("unexpected unit '" + std::string(rest) + "' (expected " + std::string(unit) + ")");
  }
  return scale_decimal(value, exponent + base);
}

DeviceSpec parse_config(std::istream& in) {
  DeviceSpec spec;
  std::map<std::string, int> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no, "");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end()) {
      throw ParseError("unknown key '" + key + "'", line_no, key);
    }
    if (seen.count(key)) throw ParseError("duplicate key '" + key + "'", line_no, key);
    if (value.empty()) throw ParseError("missing value for '" + key + "'", line_no, key);
    seen[key] = line_no;

    try {
      if (key == "kernel") {
        std::string k(value);
        std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::tolower(c); });
        if (k == "delta") {
          spec.kernel = KernelKind::Delta;
        } else if (k == "gaussian") {
          spec.kernel = KernelKind::Gaussian;
        } else if (k == "lorentzian") {
          spec.kernel = KernelKind::Lorentzian;
        } else {
          throw std::invalid_argument("kernel must be delta, gaussian or lorentzian");
        }
      } else if (key == "temperature_source") {
        spec.temperature_source = parse_quantity(value, "K");
      } else if (key == "temperature_drain") {
        spec.temperature_drain = parse_quantity(value, "K");
      } else if (key == "bias") {
        spec.bias = parse_quantity(value, "eV");
      } else if (key == "rate_source") {
        spec.rate_source = parse_quantity(value, "Hz");
      } else {
        spec.rate_drain = parse_quantity(value, "Hz");
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_no, key);
    }
  }
  for (const auto key : kConfigKeys) {
    if (!seen.count(std::string(key))) throw ParseError("missing key '" + std::string(key) + "'", 0, std::string(key));
  }
  spec.validate();
  return spec;
}

DeviceSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'", 0, "");
  return parse_config(in);
}

AnalysisReport analyze(const DeviceSpec& spec, const std::vector<double>& etas, const NumericsConfig& cfg) {
  const DotSystem sys = spec.to_system();
  AnalysisReport r{};
  r.spec = spec;
  r.gamma_source = sys.rates.gamma_source();
  r.gamma_drain = sys.rates.gamma_drain();
  r.hbar_gamma_tot = spec.hbar_gamma_tot();
  r.thermal_source = sys.source.thermal_energy;
  r.thermal_drain = sys.drain.thermal_energy;
  r.costs = erasure_costs(sys, cfg);
  r.scales = energy_scales(sys);
  r.bound_checked = !r.costs.w_bar.is_divergent() && !r.scales.e_broad.is_divergent();
  if (r.bound_checked) r.bound = check_bound(r.costs, r.scales);

  std::vector<double> eta_list = etas;
  if (eta_list.empty() && r.costs.divergent) eta_list = {0.1, 0.01, 0.001};
  for (double eta : eta_list) {
    const EtaErasure e = eta_erasure_work(sys, eta, cfg);
    r.eta.push_back({eta, e.work, e.mu_eta, e.closed_form.has_value(), e.closed_form.value_or(0.0)});
  }
  return r;
}

void write_report(std::ostream& out, const AnalysisReport& r) {
  const std::string divergent_note = "divergent (Lorentzian exact erasure)";
  const auto cost = [&](const FiniteOrDivergent& v) { return v.is_divergent() ? divergent_note : number(v); };
  const auto cost_brief = [&](const FiniteOrDivergent& v) { return v.is_divergent() ? divergent_note : brief(v); };

  std::vector<std::array<std::string, 3>> table{
      {"kernel", std::string(kernel_name(r.spec.kernel)), ""},
      {"gamma_S", brief(r.gamma_source), ""},
      {"gamma_D", brief(r.gamma_drain), ""},
      {"k_B T_S", brief(r.thermal_source), "ueV"},
      {"k_B T_D", brief(r.thermal_drain), "ueV"},
      {"bias", brief(r.spec.bias), "ueV"},
      {"hbar Gamma_tot", brief(r.hbar_gamma_tot), "ueV"},
      {"mu_1/2", brief(r.costs.mu_half) + (r.costs.mu_half_ambiguous ? " (plateau midpoint)" : ""), "ueV"},
      {"E_therm", brief(r.scales.e_therm), "ueV"},
      {"E_bias", brief(r.scales.e_bias), "ueV"},
      {"E_broad", cost_brief(r.scales.e_broad), "ueV"},
      {"W0", cost_brief(r.costs.w_zero), "ueV"},
      {"W1", cost_brief(r.costs.w_one), "ueV"},
      {"W_bar", cost_brief(r.costs.w_bar), "ueV"},
  };
  if (r.bound_checked) {
    table.push_back({"bound", brief(r.bound.lower) + " <= W_bar <= " + brief(r.bound.upper),
                     r.bound.satisfied ? "ok" : "VIOLATED"});
  }
  std::size_t w0 = 8, w1 = 5;
  for (const auto& row : table) {
    w0 = std::max(w0, row[0].size());
    w1 = std::max(w1, row[1].size());
  }
  out << std::left << std::setw(static_cast<int>(w0)) << "quantity" << "  " << std::setw(static_cast<int>(w1))
      << "value" << "  unit\n";
  for (const auto& row : table) {
    out << std::setw(static_cast<int>(w0)) << row[0] << "  " << std::setw(static_cast<int>(w1)) << row[1] << "  "
        << row[2] << '\n';
  }
  if (!r.eta.empty()) {
    out << "\neta-erasure\n" << std::setw(10) << "eta" << "  " << std::setw(14) << "W_eta [ueV]" << "  "
        << std::setw(14) << "mu_eta [ueV]" << "  closed form\n";
    for (const auto& e : r.eta) {
      out << std::setw(10) << brief(e.eta) << "  " << std::setw(14) << brief(e.work) << "  " << std::setw(14)
          << brief(e.mu_eta) << "  " << (e.has_closed_form ? brief(e.closed_form) : "-") << '\n';
    }
  }
  out << std::right;

  out << "\n[report]\n";
  const auto kv = [&](std::string_view key, const std::string& value) { out << key << ": " << value << '\n'; };
  kv("temperature_source", number(r.spec.temperature_source));
  kv("temperature_drain", number(r.spec.temperature_drain));
  kv("bias", number(r.spec.bias));
  kv("rate_source", number(r.spec.rate_source));
  kv("rate_drain", number(r.spec.rate_drain));
  kv("kernel", std::string(kernel_name(r.spec.kernel)));
  kv("gamma_source", number(r.gamma_source));
  kv("gamma_drain", number(r.gamma_drain));
  kv("thermal_energy_source", number(r.thermal_source));
  kv("thermal_energy_drain", number(r.thermal_drain));
  kv("hbar_gamma_tot", number(r.hbar_gamma_tot));
  kv("mu_half", number(r.costs.mu_half));
  kv("mu_half_ambiguous", r.costs.mu_half_ambiguous ? "true" : "false");
  kv("e_therm", number(r.scales.e_therm));
  kv("e_bias", number(r.scales.e_bias));
  kv("e_broad", number(r.scales.e_broad));
  kv("w_zero", cost(r.costs.w_zero));
  kv("w_one", cost(r.costs.w_one));
  kv("w_bar", cost(r.costs.w_bar));
  if (!r.costs.divergent) {
    kv("w_bar_mad", number(r.costs.w_bar_mad));
    kv("mad_discrepancy", number(r.costs.mad_discrepancy));
  }
  if (r.bound_checked) {
    kv("bound_lower", number(r.bound.lower));
    kv("bound_upper", number(r.bound.upper));
    kv("bound_satisfied", r.bound.satisfied ? "true" : "false");
  }
  for (const auto& e : r.eta) {
    const std::string tag = "eta[" + number(e.eta) + "]";
    kv(tag + ".work", number(e.work));
    kv(tag + ".mu_eta", number(e.mu_eta));
    if (e.has_closed_form) kv(tag + ".closed_form", number(e.closed_form));
  }
}

std::vector<SweepRow> sweep(const DeviceSpec& spec, double bias_max, double width_max, int points,
                            const NumericsConfig& cfg) {
  spec.validate();
  if (points < 1) throw ValidationError("points must be at least 1", "points");
  if (!(bias_max >= 0.0) || !std::isfinite(bias_max)) throw ValidationError("bias-max must be >= 0", "bias_max");
  if (!(width_max >= 0.0) || !std::isfinite(width_max)) throw ValidationError("width-max must be >= 0", "width_max");

  const std::vector<double> biases = linspace(0.0, bias_max, points);
  const std::vector<double> widths = linspace(0.0, width_max, points);
  const std::size_t n = biases.size() * widths.size();
  std::vector<SweepRow> rows(n);

  const auto compute = [&](std::size_t index) {
    DeviceSpec s = spec;
    s.bias = biases[index / widths.size()];
    const double width = widths[index % widths.size()];
    DotSystem sys = s.to_system();
    if (width == 0.0) {
      sys.kernel = BroadeningKernel::delta();
    } else if (spec.kernel == KernelKind::Lorentzian) {
      sys.kernel = BroadeningKernel::lorentzian(width);
    } else {
      sys.kernel = BroadeningKernel::gaussian(width);
    }
    const ErasureCosts costs = erasure_costs(sys, cfg);
    const EnergyScales scales = energy_scales(sys);
    SweepRow row{s.bias, width, costs.w_bar, scales.e_therm, scales.e_bias, scales.e_broad,
                 FiniteOrDivergent::divergent(), FiniteOrDivergent::divergent()};
    if (!costs.w_bar.is_divergent() && !scales.e_broad.is_divergent()) {
      const BoundReport bound = check_bound(costs, scales);
      row.bound_lower = bound.lower;
      row.bound_upper = bound.upper;
    }
    rows[index] = row;
  };

  // Rows are independent; each worker fills its own slots so the output
  // order never depends on scheduling.
  const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) compute(i);
    return rows;
  }
  std::vector<std::exception_ptr> failures(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) compute(i);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "bias,hbar_gamma_tot,w_bar,e_therm,e_bias,e_broad,bound_lower,bound_upper\n";
  for (const auto& r : rows) {
    out << number(r.bias) << ',' << number(r.hbar_gamma_tot) << ',' << number(r.w_bar) << ',' << number(r.e_therm)
        << ',' << number(r.e_bias) << ',' << number(r.e_broad) << ',' << number(r.bound_lower) << ','
        << number(r.bound_upper) << '\n';
  }
}

std::vector<OccupationRow> occupation_curve(const DeviceSpec& spec, double mu_min, double mu_max, int points,
                                            const NumericsConfig& cfg) {
  if (points < 2) throw ValidationError("points must be at least 2", "points");
  if (!std::isfinite(mu_min) || !std::isfinite(mu_max) || !(mu_max >= mu_min)) {
    throw ValidationError("need finite mu-min <= mu-max", "mu_min");
  }
  const DotSystem sys = spec.to_system();
  std::vector<OccupationRow> rows;
  for (double mu : linspace(mu_min, mu_max, points)) {
    rows.push_back({mu, unbroadened_occupation(mu, sys), occupation(mu, sys, cfg)});
  }
  return rows;
}

void write_occupation_csv(std::ostream& out, const std::vector<OccupationRow>& rows) {
  out << "mu,p_unbroadened,p_broadened\n";
  for (const auto& r : rows) out << number(r.mu) << ',' << number(r.p_unbroadened) << ',' << number(r.p_broadened) << '\n';
}

ProtocolRun run_protocol(const DeviceSpec& spec, ErasureTarget target, double duration, RampProfile profile,
                         const NumericsConfig& cfg) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw ValidationError("duration must be >= 0", "duration");
  const DotSystem sys = spec.to_system(true);
  const ProtocolSchedule schedule = make_erasure_schedule(sys, target, duration, profile, cfg);
  ProtocolRun run{target, duration, simulate(sys, schedule, max_stable_step(sys), cfg), 0.0, 0.0, 0.0};
  run.work = run.trajectory.back().work;
  run.final_p = run.trajectory.back().p;
  const ErasureCosts costs = erasure_costs(sys, cfg);
  run.reference = target == ErasureTarget::Zero ? costs.w_zero : costs.w_one;
  return run;
}

void write_protocol_csv(std::ostream& out, const ProtocolRun& run) {
  out << "t,mu,p,work\n";
  for (const auto& s : run.trajectory.samples) {
    out << number(s.t) << ',' << number(s.mu) << ',' << number(s.p) << ',' << number(s.work) << '\n';
  }
}

std::string protocol_summary(const ProtocolRun& run) {
  const char* name = run.target == ErasureTarget::Zero ? "w_zero" : "w_one";
  std::string s = "target: " + std::string(run.target == ErasureTarget::Zero ? "zero" : "one") +
                  "  duration: " + number(run.duration) + "  work: " + number(run.work) +
                  "  final_p: " + number(run.final_p) + "  " + name + ": " + number(run.reference);
  if (run.reference.is_finite() && run.reference.value() != 0.0) {
    s += "  ratio: " + number(run.work / run.reference.value());
  }
  return s;
}

namespace {

DensityGenerator trial_generator(std::uint64_t seed, int trial, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(stream)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return DensityGenerator((static_cast<std::uint64_t>(words[0]) << 32) | words[1]);
}

GridPdf near_delta_spike() {
  GridPdf g;
  g.origin = 0.0;
  g.step = DensityGenerator::kStep;
  g.densities = {1.0 / g.step};
  return g;
}

std::string margin_line(const LemmaReport& r) {
  return "value=" + number(r.value) + " lower=" + number(r.lower_bound) + " upper=" + number(r.upper_bound) +
         " tol=" + number(r.tolerance);
}

}  // namespace

LemmaSuiteReport run_lemma_suite(int trials, std::uint64_t seed, bool near_delta) {
  if (trials < 1) throw ValidationError("trials must be at least 1", "trials");
  LemmaSuiteReport report{trials, seed, 0, 0, ""};
  std::ostringstream text;
  double worst1 = -INFINITY;
  double worst2 = -INFINITY;
  // Margins are in units of the tolerance: <= 0 inside the sandwich,
  // in (0, 1] a tolerated discretisation excess, > 1 a violation.
  const auto margin = [](const LemmaReport& r) {
    return std::max(r.lower_bound - r.value, r.value - r.upper_bound) / r.tolerance;
  };
  for (int i = 0; i < trials; ++i) {
    DensityGenerator gen1 = trial_generator(seed, i, 1);
    const GridPdf f = gen1.random_density();
    const std::string f_desc = gen1.last_description();
    const GridPdf g = near_delta ? near_delta_spike() : gen1.random_density();
    const std::string g_desc = near_delta ? "spike(width=1 cell)" : gen1.last_description();
    const LemmaReport r1 = verify_lemma1(f, g);
    worst1 = std::max(worst1, margin(r1));
    if (!r1.ok()) {
      ++report.lemma1_violations;
      text << "lemma1 VIOLATION trial=" << i << " seed=" << seed << " f=[" << f_desc << "] g=[" << g_desc << "] "
           << margin_line(r1) << '\n';
    }

    DensityGenerator gen2 = trial_generator(seed, i, 2);
    const GridPdf a = gen2.random_symmetric();
    const std::string a_desc = gen2.last_description();
    const GridPdf b = gen2.random_symmetric();
    const std::string b_desc = gen2.last_description();
    const double p = gen2.uniform(0.01, 0.99);
    const LemmaReport r2 = verify_lemma2(a, b, p);
    worst2 = std::max(worst2, margin(r2));
    if (!r2.ok()) {
      ++report.lemma2_violations;
      text << "lemma2 VIOLATION trial=" << i << " seed=" << seed << " p_f=" << number(p) << " f=[" << a_desc
           << "] g=[" << b_desc << "] " << margin_line(r2) << '\n';
    }
  }
  text << "lemma1: trials=" << trials << " violations=" << report.lemma1_violations
       << " worst_margin_over_tol=" << number(worst1) << '\n';
  text << "lemma2: trials=" << trials << " violations=" << report.lemma2_violations
       << " worst_margin_over_tol=" << number(worst2) << '\n';
  text << (report.ok() ? "all pass" : "FAILED") << '\n';
  report.text = text.str();
  return report;
}

namespace {

NumericsConfig config_from_env() {
  try {
    return NumericsConfig::from_environment();
  } catch (const InvalidConfig& e) {
    throw ValidationError(e.what(), "ERASURE_NUMERICS_RTOL");
  }
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file '" + path + "'", "out");
  out << contents;
  if (!out) throw ValidationError("failed writing '" + path + "'", "out");
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Erasure cost analysis for a quantum-dot charge bit", "qdot-erasure"};
  app.require_subcommand(1);

  std::string config;
  std::vector<double> etas;
  auto* analyze_cmd = app.add_subcommand("analyze", "Erasure costs, energy scales and bound check for a device");
  analyze_cmd->add_option("--config", config, "Device config file")->required();
  analyze_cmd->add_option("--eta", etas, "eta-erasure levels to tabulate (0 < eta < 1/2)");

  double bias_max = 0.0, width_max = 0.0;
  int points = 0;
  std::string out_path;
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid over bias and broadening width (ueV), CSV output");
  sweep_cmd->add_option("--config", config, "Device config file")->required();
  sweep_cmd->add_option("--bias-max", bias_max, "Largest bias [ueV]")->required();
  sweep_cmd->add_option("--width-max", width_max, "Largest kernel width [ueV]")->required();
  sweep_cmd->add_option("--points", points, "Points per axis")->required();
  sweep_cmd->add_option("--out", out_path, "Output CSV")->required();

  double mu_min = 0.0, mu_max = 0.0;
  auto* occ_cmd = app.add_subcommand("occupation", "Steady-state occupation curve, CSV output");
  occ_cmd->add_option("--config", config, "Device config file")->required();
  occ_cmd->add_option("--mu-min", mu_min, "Lowest level [ueV]")->required();
  occ_cmd->add_option("--mu-max", mu_max, "Highest level [ueV]")->required();
  occ_cmd->add_option("--points", points, "Number of points")->required();
  occ_cmd->add_option("--out", out_path, "Output CSV")->required();

  std::string target = "zero";
  double duration = 0.0;
  std::string profile = "length";
  auto* proto_cmd = app.add_subcommand("protocol", "Finite-time erasure protocol, trajectory CSV plus summary");
  proto_cmd->add_option("--config", config, "Device config file")->required();
  proto_cmd->add_option("--target", target, "Erased state")->required()->check(CLI::IsMember({"zero", "one"}));
  proto_cmd->add_option("--duration", duration, "Ramp duration in units of 1/Gamma_tot")->required();
  proto_cmd->add_option("--out", out_path, "Output CSV")->required();
  proto_cmd->add_option("--profile", profile, "Ramp profile: length (constant thermodynamic speed) or linear")
      ->check(CLI::IsMember({"length", "linear"}));

  int trials = 0;
  std::uint64_t seed = 0;
  bool near_delta = false;
  auto* lemma_cmd = app.add_subcommand("lemmas", "Randomised check of the MAD sandwich lemmas");
  lemma_cmd->add_option("--trials", trials, "Random pairs per lemma")->required();
  lemma_cmd->add_option("--seed", seed, "Seed")->required();
  lemma_cmd->add_flag("--near-delta", near_delta, "Use a one-cell spike as the Lemma 1 partner");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    const NumericsConfig cfg = config_from_env();
    if (*analyze_cmd) {
      const AnalysisReport report = analyze(load_config(config), etas, cfg);
      write_report(out, report);
      if (report.bound_checked && !report.bound.satisfied) {
        err << "bound violated\n";
        return 1;
      }
      return 0;
    }
    if (*sweep_cmd) {
      const auto rows = sweep(load_config(config), bias_max, width_max, points, cfg);
      std::ostringstream csv;
      write_sweep_csv(csv, rows);
      write_file(out_path, csv.str());
      const auto violated = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) {
        if (r.w_bar.is_divergent() || r.bound_lower.is_divergent()) return false;
        const double slack = 1e-9 * r.bound_upper.value();
        return r.w_bar.value() < r.bound_lower.value() - slack || r.w_bar.value() > r.bound_upper.value() + slack;
      });
      out << "rows: " << rows.size() << "  bound violations: " << violated << '\n';
      return violated ? 1 : 0;
    }
    if (*occ_cmd) {
      std::ostringstream csv;
      write_occupation_csv(csv, occupation_curve(load_config(config), mu_min, mu_max, points, cfg));
      write_file(out_path, csv.str());
      return 0;
    }
    if (*proto_cmd) {
      const ProtocolRun run =
          run_protocol(load_config(config), target == "zero" ? ErasureTarget::Zero : ErasureTarget::One, duration,
                       profile == "linear" ? RampProfile::Linear : RampProfile::ThermodynamicLength, cfg);
      std::ostringstream csv;
      write_protocol_csv(csv, run);
      write_file(out_path, csv.str());
      out << protocol_summary(run) << '\n';
      return 0;
    }
    if (*lemma_cmd) {
      const LemmaSuiteReport report = run_lemma_suite(trials, seed, near_delta);
      out << report.text;
      return report.ok() ? 0 : 1;
    }
  } catch (const ParseError& e) {
    err << "config error";
    if (e.line() > 0) err << " (line " << e.line() << ")";
    if (!e.field().empty()) err << " [" << e.field() << "]";
    err << ": " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    err << "invalid input [" << e.field() << "]: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const InvalidSystem& e) {
    err << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace qdot
