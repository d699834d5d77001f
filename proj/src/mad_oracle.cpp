#include "qdot_erasure/mad_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "qdot_erasure/errors.hpp"

namespace qdot {

namespace {

constexpr double kSymmetryTolerance = 1e-6;
// Direct correlation below this many multiply-adds.
constexpr std::size_t kDirectLimit = std::size_t{1} << 18;

// Plan creation and destruction are not thread-safe in FFTW.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t fft_length(std::size_t n) {
  std::size_t len = 1;
  while (len < n) len <<= 1;
  return len;
}

// Linear convolution a * b.
std::vector<double> convolve_fft(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t n = fft_length(out_len);
  const std::size_t nc = n / 2 + 1;

  double* ra = fftw_alloc_real(n);
  double* rb = fftw_alloc_real(n);
  fftw_complex* ca = fftw_alloc_complex(nc);
  fftw_complex* cb = fftw_alloc_complex(nc);
  fftw_plan pa, pb, back;
  {
    std::lock_guard lock(planner_mutex());
    pa = fftw_plan_dft_r2c_1d(static_cast<int>(n), ra, ca, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(static_cast<int>(n), rb, cb, FFTW_ESTIMATE);
    back = fftw_plan_dft_c2r_1d(static_cast<int>(n), ca, ra, FFTW_ESTIMATE);
  }
  std::fill(ra, ra + n, 0.0);
  std::fill(rb, rb + n, 0.0);
  std::copy(a.begin(), a.end(), ra);
  std::copy(b.begin(), b.end(), rb);
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t k = 0; k < nc; ++k) {
    const std::complex<double> product = std::complex<double>(ca[k][0], ca[k][1]) *
                                         std::complex<double>(cb[k][0], cb[k][1]);
    ca[k][0] = product.real();
    ca[k][1] = product.imag();
  }
  fftw_execute(back);
  std::vector<double> out(ra, ra + out_len);
  for (auto& v : out) v /= static_cast<double>(n);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(back);
  }
  fftw_free(ra);
  fftw_free(rb);
  fftw_free(ca);
  fftw_free(cb);
  return out;
}

std::vector<double> convolve_direct(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// Value of f at an arbitrary x; exact on grid points, linear in between,
// zero outside the grid.
double grid_value(const GridPdf& f, double x) {
  const double u = (x - f.origin) / f.step;
  const double nearest = std::round(u);
  if (std::abs(u - nearest) < 1e-6) {
    if (nearest < 0.0 || nearest >= static_cast<double>(f.size())) return 0.0;
    return f.densities[static_cast<std::size_t>(nearest)];
  }
  const double lo = std::floor(u);
  const double frac = u - lo;
  const auto at = [&](double k) {
    return (k < 0.0 || k >= static_cast<double>(f.size())) ? 0.0 : f.densities[static_cast<std::size_t>(k)];
  };
  return (1.0 - frac) * at(lo) + frac * at(lo + 1.0);
}

double tolerance_for(double step, double d_f, double d_g) { return 5.0 * step * (1.0 + d_f + d_g); }

}  // namespace

double GridPdf::mass() const {
  double sum = 0.0;
  for (double d : densities) sum += d;
  return sum * step;
}

void GridPdf::validate() const {
  if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(origin)) {
    throw DomainError("grid step must be positive and finite");
  }
  if (densities.empty()) throw DomainError("grid density has no samples");
  for (double d : densities) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("grid densities must be finite and non-negative");
  }
  if (std::abs(mass() - 1.0) > 1e-8) throw DomainError("grid density is not normalised");
}

GridPdf GridPdf::sample(const RealFunction& f, double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi > lo)) throw DomainError("sample needs lo < hi and step > 0");
  GridPdf out;
  out.origin = lo;
  out.step = step;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  out.densities.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.densities[i] = f(out.x(i));
  return out.normalized();
}

GridPdf GridPdf::normalized() const {
  const double m = mass();
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("grid density has no mass");
  GridPdf out = *this;
  for (auto& d : out.densities) d /= m;
  return out;
}

GridPdf GridPdf::reflected() const {
  GridPdf out;
  out.step = step;
  out.origin = -x(size() - 1);
  out.densities.assign(densities.rbegin(), densities.rend());
  return out;
}

double grid_median(const GridPdf& f) {
  const double half = 0.5 * f.mass();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double cell = f.densities[i] * f.step;
    if (cell > 0.0 && cumulative + cell >= half) {
      return f.x(i) - 0.5 * f.step + (half - cumulative) / f.densities[i];
    }
    cumulative += cell;
  }
  return f.x(f.size() - 1);
}

double grid_deviation(const GridPdf& f, double reference) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += std::abs(f.x(i) - reference) * f.densities[i];
  return sum * f.step;
}

double grid_mad(const GridPdf& f) { return grid_deviation(f, grid_median(f)); }

GridPdf grid_cross_correlate(const GridPdf& f, const GridPdf& g) {
  if (std::abs(f.step - g.step) > 1e-12 * std::max(f.step, g.step)) {
    throw StepMismatch("cross-correlation needs equal grid steps");
  }
  if (f.densities.empty() || g.densities.empty()) throw DomainError("empty grid density");
  // sum_i f_i g_{i-k+n_g-1} is the convolution of f with reversed g.
  const std::vector<double> g_reversed(g.densities.rbegin(), g.densities.rend());
  const bool direct = f.size() * g.size() <= kDirectLimit;
  GridPdf out;
  out.step = f.step;
  out.origin = f.origin - g.origin - static_cast<double>(g.size() - 1) * f.step;
  out.densities = direct ? convolve_direct(f.densities, g_reversed) : convolve_fft(f.densities, g_reversed);
  // FFT round-off leaves tiny negative values in empty regions.
  for (auto& d : out.densities) d = std::max(d, 0.0);
  return out.normalized();
}

GridPdf grid_mixture(const GridPdf& f, const GridPdf& g, double p_f) {
  if (!(p_f >= 0.0 && p_f <= 1.0)) throw DomainError("mixture weight must lie in [0, 1]");
  if (std::abs(f.step - g.step) > 1e-12 * std::max(f.step, g.step)) {
    throw StepMismatch("mixture needs equal grid steps");
  }
  const double shift = (g.origin - f.origin) / f.step;
  if (std::abs(shift - std::round(shift)) > 1e-6) throw StepMismatch("mixture grids are not aligned");
  const auto offset = static_cast<long>(std::round(shift));
  const long start = std::min(0L, offset);
  const long stop = std::max(static_cast<long>(f.size()), offset + static_cast<long>(g.size()));

  GridPdf out;
  out.step = f.step;
  out.origin = f.origin + static_cast<double>(start) * f.step;
  out.densities.assign(static_cast<std::size_t>(stop - start), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    out.densities[static_cast<std::size_t>(static_cast<long>(i) - start)] += p_f * f.densities[i];
  }
  for (std::size_t j = 0; j < g.size(); ++j) {
    out.densities[static_cast<std::size_t>(static_cast<long>(j) + offset - start)] += (1.0 - p_f) * g.densities[j];
  }
  return out;
}

double symmetry_defect(const GridPdf& f) {
  const double m = grid_median(f);
  const double peak = *std::max_element(f.densities.begin(), f.densities.end());
  if (!(peak > 0.0)) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    worst = std::max(worst, std::abs(f.densities[i] - grid_value(f, 2.0 * m - f.x(i))));
  }
  return worst / peak;
}

LemmaReport verify_lemma1(const GridPdf& f, const GridPdf& g) {
  const double d_f = grid_mad(f);
  const double d_g = grid_mad(g);
  const double d_h = grid_mad(grid_cross_correlate(f, g));
  const double tol = tolerance_for(f.step, d_f, d_g);
  const double lower = std::max(d_f, d_g);
  const double upper = d_f + d_g;
  return {d_h >= lower - tol, d_h <= upper + tol, d_h, lower, upper, tol};
}

LemmaReport verify_lemma2(const GridPdf& f_in, const GridPdf& g_in, double p_f_in) {
  if (symmetry_defect(f_in) > kSymmetryTolerance || symmetry_defect(g_in) > kSymmetryTolerance) {
    throw AsymmetricInput("mixture components must be even about their medians");
  }
  const bool swap = grid_median(f_in) < grid_median(g_in);
  const GridPdf& f = swap ? g_in : f_in;
  const GridPdf& g = swap ? f_in : g_in;
  const double p_f = swap ? 1.0 - p_f_in : p_f_in;
  const double p_g = 1.0 - p_f;

  const double d_f = grid_mad(f);
  const double d_g = grid_mad(g);
  const double separation = std::min(p_f, p_g) * (grid_median(f) - grid_median(g));
  const double averaged = p_f * d_f + p_g * d_g;
  const double d_h = grid_mad(grid_mixture(f, g, p_f));
  const double tol = tolerance_for(f.step, d_f, d_g);
  const double lower = std::max(averaged, separation);
  const double upper = averaged + separation;
  return {d_h >= lower - tol, d_h <= upper + tol, d_h, lower, upper, tol};
}

PathologicalValues pathological_counterexample(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta must lie in (0, 1]");
  // h = eta on (-1/2, 1/2): mass eta, and int |y| h = eta * 2 * (1/2)^2 / 2.
  return {eta, eta / 4.0};
}

double DensityGenerator::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

namespace {

enum class Bump { Uniform, Triangle, Gaussian };

const char* bump_name(Bump b) {
  switch (b) {
    case Bump::Uniform:
      return "uniform";
    case Bump::Triangle:
      return "triangle";
    case Bump::Gaussian:
      return "gaussian";
  }
  return "?";
}

// Shape of a unit-height bump at offset d from its centre.
double bump_value(Bump b, double d, double width) {
  const double a = std::abs(d);
  switch (b) {
    case Bump::Uniform:
      return a <= width ? 1.0 : 0.0;
    case Bump::Triangle:
      return std::max(0.0, 1.0 - a / width);
    case Bump::Gaussian:
      return std::exp(-0.5 * (d / width) * (d / width));
  }
  return 0.0;
}

// Normalising area of a unit-height bump.
double bump_area(Bump b, double width) {
  switch (b) {
    case Bump::Uniform:
      return 2.0 * width;
    case Bump::Triangle:
      return width;
    case Bump::Gaussian:
      return width * std::sqrt(2.0 * std::numbers::pi);
  }
  return 1.0;
}

struct BumpSpec {
  Bump kind;
  double centre_index;  // position on the grid, a multiple of 1/2
  double width;
  double weight;
};

GridPdf assemble(const std::vector<BumpSpec>& bumps) {
  const double step = DensityGenerator::kStep;
  const auto n = static_cast<std::size_t>(2.0 * DensityGenerator::kHalfWidth / step) + 1;
  GridPdf out;
  out.origin = -DensityGenerator::kHalfWidth;
  out.step = step;
  out.densities.assign(n, 0.0);
  for (const auto& b : bumps) {
    const double height = b.weight / bump_area(b.kind, b.width);
    for (std::size_t i = 0; i < n; ++i) {
      // Offsets are (integer or half-integer) * step, so the grid sees the
      // bump exactly mirror-symmetric about its centre.
      const double d = (static_cast<double>(i) - b.centre_index) * step;
      out.densities[i] += height * bump_value(b.kind, d, b.width);
    }
  }
  return out.normalized();
}

std::string describe(const std::vector<BumpSpec>& bumps) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < bumps.size(); ++k) {
    const auto& b = bumps[k];
    if (k) os << "; ";
    os << bump_name(b.kind) << "(centre=" << (b.centre_index * DensityGenerator::kStep - DensityGenerator::kHalfWidth)
       << ", width=" << b.width << ", weight=" << b.weight << ")";
  }
  return os.str();
}

double snap_to_half_step(double x) {
  const double index = (x + DensityGenerator::kHalfWidth) / DensityGenerator::kStep;
  return std::round(2.0 * index) / 2.0;
}

}  // namespace

GridPdf DensityGenerator::random_density() {
  const int count = std::uniform_int_distribution<int>(1, 4)(rng_);
  std::vector<BumpSpec> bumps;
  for (int k = 0; k < count; ++k) {
    const auto kind = static_cast<Bump>(std::uniform_int_distribution<int>(0, 2)(rng_));
    // Keep every bump (Gaussians to 8 sigma) inside the grid.
    const double width = kind == Bump::Gaussian ? uniform(0.05, 0.5) : uniform(0.05, 2.0);
    const double reach = kind == Bump::Gaussian ? 8.0 * width : width;
    const double centre = uniform(-kHalfWidth + reach + 0.5, kHalfWidth - reach - 0.5);
    bumps.push_back({kind, snap_to_half_step(centre), width, uniform(0.1, 1.0)});
  }
  description_ = describe(bumps);
  return assemble(bumps);
}

GridPdf DensityGenerator::random_symmetric() {
  const int count = std::uniform_int_distribution<int>(1, 3)(rng_);
  const double centre = snap_to_half_step(uniform(-3.0, 3.0));
  std::vector<BumpSpec> bumps;
  for (int k = 0; k < count; ++k) {
    const auto kind = static_cast<Bump>(std::uniform_int_distribution<int>(0, 2)(rng_));
    const double width = kind == Bump::Gaussian ? uniform(0.05, 0.5) : uniform(0.05, 2.0);
    bumps.push_back({kind, centre, width, uniform(0.1, 1.0)});
  }
  description_ = describe(bumps);
  return assemble(bumps);
}

}  // namespace qdot
