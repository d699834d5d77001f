#pragma once

// Reference implementations used only by the tests. They are deliberately
// naive (fixed-grid Simpson, direct sums, bisection) and share no code with
// the library.

#include <cmath>
#include <algorithm>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// Composite Simpson on n (even) panels, long double accumulation.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const long double h = (static_cast<long double>(b) - a) / n;
  long double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0L : 2.0L) * f(static_cast<double>(a + i * h));
  return static_cast<double>(sum * h / 3.0L);
}

// Simpson over consecutive pieces so steps land on the piece edges.
inline double simpson_pieces(const std::function<double(double)>& f, const std::vector<double>& edges,
                             int n_per_piece = 4000) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] > edges[i]) total += simpson(f, edges[i], edges[i + 1], n_per_piece);
  }
  return total;
}

inline double fermi(double e, double mu, double kt) {
  if (kt == 0.0) return e < mu ? 1.0 : (e > mu ? 0.0 : 0.5);
  return 1.0 / (1.0 + std::exp((e - mu) / kt));
}

inline double normal_pdf(double x, double sigma) {
  return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Upper quantile of the standard normal by bisection on erfc.
inline double normal_upper_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_sf(mid) > p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct Device {
  double kt_s, kt_d, mu_s, mu_d, gamma_s;
  double sigma;  // Gaussian width, 0 for no broadening
};

inline double sharp_occupation(const Device& d, double mu) {
  return d.gamma_s * fermi(mu, d.mu_s, d.kt_s) + (1.0 - d.gamma_s) * fermi(mu, d.mu_d, d.kt_d);
}

// Broadened occupation by direct Simpson over the kernel variable.
inline double broadened_occupation(const Device& d, double mu) {
  if (d.sigma == 0.0) return sharp_occupation(d, mu);
  const double reach = 14.0 * d.sigma;
  std::vector<double> edges{-reach};
  for (double c : {d.mu_d - mu, d.mu_s - mu}) {
    if (c > -reach && c < reach) edges.push_back(c);
  }
  edges.push_back(reach);
  std::sort(edges.begin(), edges.end());
  return simpson_pieces([&](double x) { return normal_pdf(x, d.sigma) * sharp_occupation(d, mu + x); }, edges, 2000);
}

// mu with broadened_occupation = 1/2, by bisection.
inline double half_level(const Device& d, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (broadened_occupation(d, mid) > 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Direct cross-correlation h_k = step * sum_i f_i g_{i-k+n_g-1}.
inline std::vector<double> cross_correlate(const std::vector<double>& f, const std::vector<double>& g, double step) {
  const std::size_t ng = g.size();
  std::vector<double> h(f.size() + ng - 1, 0.0);
  for (std::size_t k = 0; k < h.size(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const long j = static_cast<long>(i) - static_cast<long>(k) + static_cast<long>(ng) - 1;
      if (j >= 0 && j < static_cast<long>(ng)) s += f[i] * g[static_cast<std::size_t>(j)];
    }
    h[k] = s * step;
  }
  return h;
}

}  // namespace oracle
