#include "qdot_erasure/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "qdot_erasure/errors.hpp"

namespace qdot {

void NumericsConfig::validate() const {
  if (!(rel_tol > 0.0)) throw InvalidConfig("rel_tol must be positive");
  if (!(abs_tol > 0.0)) throw InvalidConfig("abs_tol must be positive");
  if (!(root_tol > 0.0)) throw InvalidConfig("root_tol must be positive");
  if (!(tail_cutoff_exponential > 0.0) || !(tail_cutoff_gaussian > 0.0)) {
    throw InvalidConfig("tail cutoffs must be positive");
  }
  if (max_subdivisions < 10) {
    throw InvalidConfig("max_subdivisions must be at least 10");
  }
}

NumericsConfig NumericsConfig::scaled(double scale) const {
  NumericsConfig out = *this;
  out.abs_tol *= scale;
  out.root_tol *= scale;
  return out;
}

NumericsConfig NumericsConfig::from_environment() {
  NumericsConfig cfg;
  if (const char* env = std::getenv("ERASURE_NUMERICS_RTOL")) {
    char* end = nullptr;
    const double value = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(value > 0.0)) {
      throw InvalidConfig(std::string("ERASURE_NUMERICS_RTOL is not a positive number: ") + env);
    }
    cfg.rel_tol = value;
  }
  return cfg;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
};

double checked(const RealFunction& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    throw NonConvergence("integrand is not finite at x = " + std::to_string(x));
  }
  return y;
}

Segment gauss_kronrod_15(const RealFunction& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double f_center = checked(f, center);
  double result_gauss = f_center * kGaussWeights[3];
  double result_kronrod = f_center * kKronrodWeights[7];
  double result_abs = std::abs(result_kronrod);

  std::array<double, 7> f_left{};
  std::array<double, 7> f_right{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f_left[j] = checked(f, center - dx);
    f_right[j] = checked(f, center + dx);
    const double sum = f_left[j] + f_right[j];
    result_kronrod += kKronrodWeights[j] * sum;
    result_abs += kKronrodWeights[j] * (std::abs(f_left[j]) + std::abs(f_right[j]));
    if (j % 2 == 1) result_gauss += kGaussWeights[j / 2] * sum;
  }

  const double mean = 0.5 * result_kronrod;
  double result_asc = kKronrodWeights[7] * std::abs(f_center - mean);
  for (int j = 0; j < 7; ++j) {
    result_asc += kKronrodWeights[j] * (std::abs(f_left[j] - mean) + std::abs(f_right[j] - mean));
  }

  const double abs_half = std::abs(half);
  result_abs *= abs_half;
  result_asc *= abs_half;
  double error = std::abs((result_kronrod - result_gauss) * half);
  if (result_asc != 0.0 && error != 0.0) {
    error = result_asc * std::min(1.0, std::pow(200.0 * error / result_asc, 1.5));
  }
  if (result_abs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    error = std::max(50.0 * kEps * result_abs, error);
  }
  return {a, b, result_kronrod * half, error};
}

bool splittable(const Segment& s) {
  const double mid = 0.5 * (s.a + s.b);
  return mid > s.a && mid < s.b &&
         (s.b - s.a) > 64.0 * kEps * std::max(std::abs(s.a), std::abs(s.b));
}

}  // namespace

Quadrature integrate(const RealFunction& f, double a, double b,
                     const NumericsConfig& cfg,
                     std::span<const double> breakpoints) {
  cfg.validate();
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("integrate requires finite a < b");
  }

  std::vector<double> edges{a};
  for (double x : breakpoints) {
    if (x > a && x < b) edges.push_back(x);
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<Segment> segments;
  segments.reserve(static_cast<std::size_t>(cfg.max_subdivisions) + edges.size());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    segments.push_back(gauss_kronrod_15(f, edges[i], edges[i + 1]));
  }

  const auto totals = [&segments] {
    double value = 0.0;
    double error = 0.0;
    for (const auto& s : segments) {
      value += s.value;
      error += s.error;
    }
    return std::pair{value, error};
  };

  while (true) {
    const auto [value, error] = totals();
    const double target = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value));
    if (error <= target) {
      return {value, error, static_cast<int>(segments.size())};
    }

    // Bisect the worst interval that can still be split.
    auto worst = segments.end();
    for (auto it = segments.begin(); it != segments.end(); ++it) {
      if (splittable(*it) && (worst == segments.end() || it->error > worst->error)) worst = it;
    }
    if (worst == segments.end() ||
        static_cast<int>(segments.size()) >= std::max(cfg.max_subdivisions, static_cast<int>(edges.size()))) {
      throw NonConvergence("quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                           "] stalled with error estimate " + std::to_string(error) +
                           " > target " + std::to_string(target));
    }
    const double mid = 0.5 * (worst->a + worst->b);
    const Segment right = gauss_kronrod_15(f, mid, worst->b);
    *worst = gauss_kronrod_15(f, worst->a, mid);
    segments.push_back(right);
  }
}

double tail_length(std::span<const TailDecay> tails, const NumericsConfig& cfg) {
  double length = 0.0;
  for (const auto& t : tails) {
    if (t.scale < 0.0) throw DomainError("tail scale must be non-negative");
    switch (t.kind) {
      case TailClass::Exponential:
        length += cfg.tail_cutoff_exponential * t.scale;
        break;
      case TailClass::Gaussian:
        length += cfg.tail_cutoff_gaussian * t.scale;
        break;
      case TailClass::Algebraic:
        throw DivergentTail("algebraic tail: the truncated integral does not converge");
    }
  }
  return length;
}

Quadrature integrate_semi_infinite(const RealFunction& f, double a,
                                   std::span<const TailDecay> tails,
                                   const NumericsConfig& cfg, TailSide side,
                                   std::span<const double> breakpoints) {
  const double length = tail_length(tails, cfg);
  if (length == 0.0) return {};
  if (side == TailSide::Upper) return integrate(f, a, a + length, cfg, breakpoints);
  return integrate(f, a - length, a, cfg, breakpoints);
}

double find_root(const RealFunction& f, double lo, double hi,
                 const NumericsConfig& cfg) {
  cfg.validate();
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw NoBracket("f has the same sign at both ends of [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
  }

  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < 500; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * kEps * std::abs(b) + 0.5 * cfg.root_tol;
    const double half_width = 0.5 * (c - b);
    if (std::abs(half_width) <= tol || fb == 0.0) return b;

    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p;
      double q;
      if (a == c) {
        p = 2.0 * half_width * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * half_width * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * half_width * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = half_width;
        e = d;
      }
    } else {
      d = half_width;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : std::copysign(tol, half_width);
    fb = f(b);
  }
  throw NonConvergence("root search did not converge");
}

}  // namespace qdot
