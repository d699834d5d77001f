#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qdot_erasure/errors.hpp"
#include "qdot_erasure/numerics.hpp"

using namespace qdot;

TEST_CASE("integrate: constant, polynomial, normal density") {
  const NumericsConfig cfg;
  CHECK(integrate([](double) { return 1.0; }, 0, 1, cfg).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate([](double x) { return x; }, 0, 2, cfg).value == doctest::Approx(2.0).epsilon(1e-14));
  const double normal = integrate([](double x) { return oracle::normal_pdf(x, 1.0); }, -12, 12, cfg).value;
  CHECK(std::abs(normal - 1.0) < 1e-10);
}

TEST_CASE("integrate: error estimate and breakpoints") {
  const NumericsConfig cfg;
  const auto step = [](double x) { return x < 0.3 ? 1.0 : 0.0; };
  const double points[] = {0.3};
  const Quadrature q = integrate(step, 0, 1, cfg, points);
  CHECK(q.value == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(q.error <= 1e-10);
  const Quadrature smooth = integrate([](double x) { return std::sin(x); }, 0, std::numbers::pi, cfg);
  CHECK(std::abs(smooth.value - 2.0) < 1e-12);
  CHECK(smooth.error < 1e-9);
}

TEST_CASE("integrate: subdivision limit raises NonConvergence") {
  NumericsConfig cfg;
  cfg.max_subdivisions = 10;
  cfg.rel_tol = 1e-15;
  cfg.abs_tol = 1e-300;
  CHECK_THROWS_AS(integrate([](double x) { return std::sin(1.0 / (x + 1e-4)); }, 0, 1, cfg), NonConvergence);
}

TEST_CASE("integrate is linear on random polynomials") {
  const NumericsConfig cfg;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    double c1[6], c2[6];
    for (int i = 0; i < 6; ++i) {
      c1[i] = u(rng);
      c2[i] = u(rng);
    }
    const auto poly = [](const double* c) {
      return [c](double x) {
        double s = 0.0;
        for (int i = 5; i >= 0; --i) s = s * x + c[i];
        return s;
      };
    };
    const double alpha = u(rng), beta = u(rng);
    const auto f = poly(c1), g = poly(c2);
    const Quadrature qf = integrate(f, -1, 2, cfg), qg = integrate(g, -1, 2, cfg);
    const Quadrature qh = integrate([&](double x) { return alpha * f(x) + beta * g(x); }, -1, 2, cfg);
    const double combined = std::abs(alpha) * qf.error + std::abs(beta) * qg.error + qh.error + 1e-12;
    CHECK(std::abs(qh.value - alpha * qf.value - beta * qg.value) <= combined);
  }
}

TEST_CASE("integrate_semi_infinite: exponential and Gaussian tails") {
  const NumericsConfig cfg;
  const double e = integrate_semi_infinite([](double x) { return std::exp(-x); }, 0, {TailClass::Exponential, 1.0}, cfg)
                       .value;
  CHECK(std::abs(e - 1.0) < 1e-10);
  const double moment =
      integrate_semi_infinite([](double x) { return x * oracle::normal_pdf(x, 1.0); }, 0, {TailClass::Gaussian, 1.0}, cfg)
          .value;
  CHECK(moment == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-10));
  const double lower = integrate_semi_infinite([](double x) { return std::exp(x); }, 0, {TailClass::Exponential, 1.0},
                                               cfg, TailSide::Lower)
                           .value;
  CHECK(std::abs(lower - 1.0) < 1e-10);
}

TEST_CASE("integrate_semi_infinite: algebraic tail is divergent") {
  const NumericsConfig cfg;
  const auto f = [](double x) { return std::abs(x) / (std::numbers::pi * (1 + x * x)); };
  CHECK_THROWS_AS(integrate_semi_infinite(f, 0, {TailClass::Algebraic, 1.0}, cfg), DivergentTail);
}

TEST_CASE("truncated tail mass is below abs_tol") {
  const NumericsConfig cfg;
  // Mass beyond the cutoff, in closed form.
  CHECK(std::exp(-cfg.tail_cutoff_exponential) < 1e-14 * 1e-5);
  CHECK(oracle::normal_sf(cfg.tail_cutoff_gaussian) < cfg.abs_tol);
  const TailDecay mixed[] = {{TailClass::Exponential, 2.0}, {TailClass::Gaussian, 3.0}};
  CHECK(tail_length(mixed, cfg) == doctest::Approx(45.0 * 2.0 + 12.0 * 3.0));
}

TEST_CASE("find_root: linear, tanh, and NoBracket") {
  const NumericsConfig cfg;
  CHECK(find_root([](double x) { return x - 2.0; }, 0, 5, cfg) == doctest::Approx(2.0).epsilon(1e-12));
  const double r = find_root([](double x) { return std::tanh(x - 1.0); }, -10, 10, cfg);
  CHECK(std::abs(r - 1.0) <= 2 * cfg.root_tol);
  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, -1, 1, cfg), NoBracket);
  // Deterministic.
  CHECK(find_root([](double x) { return std::cos(x); }, 0, 3, cfg) ==
        find_root([](double x) { return std::cos(x); }, 0, 3, cfg));
}

TEST_CASE("NumericsConfig validation and environment override") {
  NumericsConfig bad;
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidConfig);
  bad = NumericsConfig{};
  bad.max_subdivisions = 5;
  CHECK_THROWS_AS(bad.validate(), InvalidConfig);

  setenv("ERASURE_NUMERICS_RTOL", "1e-8", 1);
  CHECK(NumericsConfig::from_environment().rel_tol == 1e-8);
  setenv("ERASURE_NUMERICS_RTOL", "nonsense", 1);
  CHECK_THROWS_AS(NumericsConfig::from_environment(), InvalidConfig);
  unsetenv("ERASURE_NUMERICS_RTOL");
  CHECK(NumericsConfig::from_environment().rel_tol == 1e-10);
  CHECK(NumericsConfig{}.scaled(100.0).abs_tol == doctest::Approx(1e-12));
}
