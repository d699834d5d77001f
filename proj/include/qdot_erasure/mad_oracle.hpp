#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qdot_erasure/numerics.hpp"

namespace qdot {

/// A density sampled at origin + i * step. Each sample stands for the mass
/// step * densities[i] spread uniformly over its cell.
struct GridPdf {
  double origin = 0.0;
  double step = 1.0;
  std::vector<double> densities;

  std::size_t size() const { return densities.size(); }
  double x(std::size_t i) const { return origin + static_cast<double>(i) * step; }
  double mass() const;

  /// Throws DomainError unless step > 0, samples are finite and
  /// non-negative, and the mass is 1 within 1e-8.
  void validate() const;

  /// Samples f on [lo, hi] and rescales to unit mass.
  static GridPdf sample(const RealFunction& f, double lo, double hi, double step);

  GridPdf normalized() const;
  /// The density of -X.
  GridPdf reflected() const;
};

/// Point where the piecewise-linear CDF crosses 1/2.
double grid_median(const GridPdf& f);

/// step * sum |x_i - reference| f_i.
double grid_deviation(const GridPdf& f, double reference);

/// Mean absolute deviation about grid_median.
double grid_mad(const GridPdf& f);

/// (f * g)(x) = sum_y f(y) g(y - x) step, renormalised. Steps must match
/// (StepMismatch otherwise); the result spans the Minkowski difference of
/// the supports. Large grids go through an FFT.
GridPdf grid_cross_correlate(const GridPdf& f, const GridPdf& g);

/// p_f f + (1 - p_f) g on the union of both grids. Origins must differ by a
/// whole number of steps.
GridPdf grid_mixture(const GridPdf& f, const GridPdf& g, double p_f);

/// max_i |f(m + d_i) - f(m - d_i)| / max f, with the reflected point read
/// off the grid (linear interpolation when it falls between samples).
double symmetry_defect(const GridPdf& f);

struct LemmaReport {
  bool lower_ok;
  bool upper_ok;
  double value;
  double lower_bound;
  double upper_bound;
  double tolerance;

  bool ok() const { return lower_ok && upper_ok; }
};

/// max(D(f), D(g)) <= D(f * g) <= D(f) + D(g), each side relaxed by
/// 5 step (1 + D(f) + D(g)).
LemmaReport verify_lemma1(const GridPdf& f, const GridPdf& g);

/// Sandwich for the mixture p_f f + p_g g of two densities that are each
/// even about their medians. Throws AsymmetricInput when either symmetry
/// defect exceeds 1e-6.
LemmaReport verify_lemma2(const GridPdf& f, const GridPdf& g, double p_f);

struct PathologicalValues {
  double mixture_mass;
  double mad;
};

/// Closed-form mass and MAD of h(y) = int f(x) g(x|y) dx for f uniform on
/// (-1/2, 1/2) and the three-delta g(x|y) whose median is always y: h is
/// eta on (-1/2, 1/2), so its mass is eta and its MAD eta / 4 (about 0).
/// eta must lie in (0, 1].
PathologicalValues pathological_counterexample(double eta);

/// Seeded random densities for the lemma sweeps: mixtures of uniform,
/// triangular, and Gaussian bumps on [-8, 8] with step 1/512.
class DensityGenerator {
 public:
  static constexpr double kHalfWidth = 8.0;
  static constexpr double kStep = 1.0 / 512.0;

  explicit DensityGenerator(std::uint64_t seed) : rng_(seed) {}

  /// 1-4 bumps at independent random centres; generally asymmetric.
  GridPdf random_density();
  /// 1-3 bumps sharing one centre (a multiple of step/2), so the result is
  /// exactly even about its median.
  GridPdf random_symmetric();
  double uniform(double lo, double hi);

  /// Human-readable parameters of the most recently generated density.
  const std::string& last_description() const { return description_; }

 private:
  std::mt19937_64 rng_;
  std::string description_;
};

}  // namespace qdot
