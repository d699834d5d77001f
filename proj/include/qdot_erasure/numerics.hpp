#pragma once

#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace qdot {

/// Tolerances and truncation policy shared by every quadrature and root
/// search. `abs_tol` and `root_tol` are absolute when passed straight to the
/// functions in this header; the physics modules treat them as multiples of
/// the device's energy scale (see `NumericsConfig::scaled`).
struct NumericsConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 60;
  double tail_cutoff_exponential = 45.0;
  double tail_cutoff_gaussian = 12.0;
  double root_tol = 1e-12;

  /// Throws InvalidConfig unless every tolerance is positive and
  /// max_subdivisions >= 10.
  void validate() const;

  /// Copy with abs_tol and root_tol multiplied by `scale`.
  NumericsConfig scaled(double scale) const;

  /// Defaults, with rel_tol overridden by ERASURE_NUMERICS_RTOL when set.
  static NumericsConfig from_environment();
};

struct Quadrature {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

using RealFunction = std::function<double(double)>;

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature of f over [a, b].
/// Interior `breakpoints` pre-split the interval (points outside (a, b) are
/// ignored). Throws NonConvergence when max_subdivisions intervals are in use
/// and the error estimate still exceeds max(abs_tol, rel_tol * |I|).
Quadrature integrate(const RealFunction& f, double a, double b,
                     const NumericsConfig& cfg,
                     std::span<const double> breakpoints = {});

enum class TailClass { Exponential, Gaussian, Algebraic };

struct TailDecay {
  TailClass kind;
  double scale;
};

enum class TailSide { Upper, Lower };

/// Truncation length for a set of decay mechanisms acting together (the
/// tail of a cross-correlation is no longer than the sum of its factors').
/// Throws DivergentTail for any Algebraic component.
double tail_length(std::span<const TailDecay> tails, const NumericsConfig& cfg);

/// Integral of f from a to +inf (Upper) or from -inf to a (Lower), truncated
/// at a +/- tail_length. Zero-length tails (all scales zero) integrate to 0.
Quadrature integrate_semi_infinite(const RealFunction& f, double a,
                                   std::span<const TailDecay> tails,
                                   const NumericsConfig& cfg,
                                   TailSide side = TailSide::Upper,
                                   std::span<const double> breakpoints = {});

inline Quadrature integrate_semi_infinite(const RealFunction& f, double a,
                                          TailDecay decay,
                                          const NumericsConfig& cfg,
                                          TailSide side = TailSide::Upper) {
  return integrate_semi_infinite(f, a, std::span<const TailDecay>(&decay, 1),
                                 cfg, side);
}

/// Brent's method on a sign-changing bracket, falling back to bisection
/// whenever the interpolation step is not making progress. Terminates when
/// the bracket is narrower than root_tol or f hits exactly zero. Throws
/// NoBracket when f(lo) and f(hi) share a strict sign.
double find_root(const RealFunction& f, double lo, double hi,
                 const NumericsConfig& cfg);

}  // namespace qdot
