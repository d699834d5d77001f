#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qdot_erasure/erasure.hpp"
#include "qdot_erasure/errors.hpp"

using namespace qdot;

namespace {

DotSystem make(double kt_s, double kt_d, double mu_s, double mu_d, double rate_s, double rate_d,
               BroadeningKernel k = BroadeningKernel::delta()) {
  return {{kt_s, mu_s}, {kt_d, mu_d}, {rate_s, rate_d}, k};
}

constexpr double ln2 = std::numbers::ln2;

}  // namespace

TEST_CASE("Landauer and weighted Landauer") {
  const NumericsConfig cfg;
  for (double kt : {1e-3, 1.0, 250.0}) {
    const ErasureCosts c = erasure_costs(make(kt, kt, 0, 0, 1, 1), cfg);
    CHECK(c.w_bar.value() == doctest::Approx(kt * ln2).epsilon(1e-8));
  }
  const ErasureCosts w = erasure_costs(make(2.0, 1.0, 0, 0, 3, 7), cfg);
  CHECK(w.w_bar.value() == doctest::Approx(ln2 * (0.3 * 2.0 + 0.7 * 1.0)).epsilon(1e-8));
}

TEST_CASE("symmetric device has equal one-sided costs") {
  const NumericsConfig cfg;
  const ErasureCosts c = erasure_costs(make(1.5, 1.5, 12, 0, 1, 1, BroadeningKernel::gaussian(2.0)), cfg);
  CHECK(c.w_zero.value() == doctest::Approx(c.w_one.value()).epsilon(1e-10));
  CHECK(c.mu_half == doctest::Approx(6.0));
  CHECK(c.w_bar.value() == doctest::Approx(0.5 * (c.w_zero.value() + c.w_one.value())).epsilon(1e-12));
}

TEST_CASE("step-function geometry") {
  const NumericsConfig cfg;
  const double v = 10.0;
  const ErasureCosts c = erasure_costs(make(0, 0, v, 0, 3, 7), cfg);
  CHECK(c.mu_half == 0.0);
  CHECK(c.w_zero.value() == doctest::Approx(0.3 * v));
  CHECK(c.w_one.value() == doctest::Approx(0.0));
  CHECK(c.w_bar.value() == doctest::Approx(0.5 * 0.3 * v));
  CHECK(c.w_bar_mad.value() == doctest::Approx(c.w_bar.value()));
}

TEST_CASE("costs match a Simpson oracle") {
  const NumericsConfig cfg;
  const auto sys = make(0.8, 0.3, 9, 0, 1, 2, BroadeningKernel::gaussian(1.2));
  const oracle::Device dev{0.8, 0.3, 9, 0, 1.0 / 3.0, 1.2};
  const double mu_half = oracle::half_level(dev, -50, 60);
  const ErasureCosts c = erasure_costs(sys, cfg);
  CHECK(c.mu_half == doctest::Approx(mu_half).epsilon(1e-9));
  const double w0 = oracle::simpson_pieces([&](double mu) { return oracle::broadened_occupation(dev, mu); },
                                           {mu_half, 9.0, 60.0}, 3000);
  const double w1 = oracle::simpson_pieces([&](double mu) { return 1.0 - oracle::broadened_occupation(dev, mu); },
                                           {-50.0, 0.0, mu_half}, 3000);
  CHECK(c.w_zero.value() == doctest::Approx(w0).epsilon(1e-8));
  CHECK(c.w_one.value() == doctest::Approx(w1).epsilon(1e-8));
}

TEST_CASE("MAD form agrees with protocol integrals") {
  const NumericsConfig cfg;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> logu(-1.5, 1.5), g(0.05, 0.95);
  for (int i = 0; i < 15; ++i) {
    const double kt_s = std::pow(10.0, logu(rng)), kt_d = std::pow(10.0, logu(rng));
    const double bias = std::pow(10.0, logu(rng) + 0.5), sigma = i % 3 ? std::pow(10.0, logu(rng)) : 0.0;
    const double gs = g(rng);
    const auto sys = make(kt_s, kt_d, bias, 0, gs, 1 - gs,
                          sigma > 0 ? BroadeningKernel::gaussian(sigma) : BroadeningKernel::delta());
    const ErasureCosts c = erasure_costs(sys, cfg);
    CHECK(c.w_bar_mad.value() == doctest::Approx(c.w_bar.value()).epsilon(1e-8));
    CHECK(c.mad_discrepancy < 1e-8);
    CHECK(c.w_zero.value() >= 0.0);
    CHECK(c.w_one.value() >= 0.0);
  }
}

TEST_CASE("absolute deviation is minimised at mu_1/2") {
  const NumericsConfig cfg;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> off(-20, 20);
  const DotSystem systems[] = {make(1, 0.5, 8, 0, 1, 3, BroadeningKernel::gaussian(2)), make(0, 0, 5, 0, 2, 3),
                               make(0.1, 0.1, 30, 0, 7, 13)};
  for (const auto& sys : systems) {
    const ErasureCosts c = erasure_costs(sys, cfg);
    for (int i = 0; i < 10; ++i) {
      const double y = c.mu_half + off(rng);
      CHECK(deviation_about(sys, y, cfg) >= 2.0 * c.w_bar.value() - 1e-9 * c.w_bar.value());
    }
  }
  CHECK_THROWS_AS(deviation_about(make(0, 0, 0, 0, 1, 1, BroadeningKernel::lorentzian(1)), 0.0, cfg), DivergentTail);
}

TEST_CASE("W_bar is monotone in Gaussian width") {
  const NumericsConfig cfg;
  double previous = 0.0;
  for (double sigma : {0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 40.0}) {
    const double w = erasure_costs(make(1.0, 0.4, 6, 0, 1, 2, BroadeningKernel::gaussian(sigma)), cfg).w_bar.value();
    CHECK(w >= previous - 1e-9);
    previous = w;
  }
}

TEST_CASE("energy scales") {
  const auto sys = make(2.0, 1.0, 50, 0, 3, 7, BroadeningKernel::gaussian(4.0));
  const EnergyScales s = energy_scales(sys);
  CHECK(s.e_therm == doctest::Approx(ln2 * (0.3 * 2 + 0.7 * 1)).epsilon(1e-15));
  CHECK(s.e_bias == doctest::Approx(0.5 * 0.3 * 50).epsilon(1e-15));
  CHECK(s.e_broad.value() == doctest::Approx(4.0 / std::sqrt(2 * std::numbers::pi)).epsilon(1e-15));
  const EnergyScales zero = energy_scales(make(0, 0, 0, 0, 1, 1));
  CHECK(zero.e_therm == 0.0);
  CHECK(zero.e_bias == 0.0);
  CHECK(zero.e_broad.value() == 0.0);
  CHECK(energy_scales(make(0, 0, 0, 0, 1, 1, BroadeningKernel::lorentzian(1))).e_broad.is_divergent());
}

TEST_CASE("check_bound") {
  const NumericsConfig cfg;
  const auto landauer = make(1, 1, 0, 0, 1, 1);
  const BoundReport tight = check_bound(erasure_costs(landauer, cfg), energy_scales(landauer));
  CHECK(tight.satisfied);
  CHECK(tight.lower == doctest::Approx(tight.upper));
  CHECK(tight.w_bar == doctest::Approx(ln2));

  ErasureCosts fake;
  fake.w_bar = 10.0;
  EnergyScales scales;
  scales.e_therm = 1.0;
  scales.e_bias = 2.0;
  scales.e_broad = 3.0;
  const BoundReport over = check_bound(fake, scales);
  CHECK_FALSE(over.satisfied);
  CHECK(over.upper_margin == doctest::Approx(-4.0));

  const auto lor = make(0, 0, 0, 0, 1, 1, BroadeningKernel::lorentzian(1));
  CHECK_THROWS_AS(check_bound(erasure_costs(lor, cfg), energy_scales(lor)), DivergentInput);
}

TEST_CASE("bound holds on random systems") {
  const NumericsConfig cfg;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 60; ++i) {
    const double kt = std::pow(10.0, -3 + 3 * u(rng)), bias = 100 * u(rng), sigma = 100 * u(rng);
    const double gs = 0.01 + 0.98 * u(rng);
    const auto sys = make(kt, kt * (0.5 + u(rng)), bias, 0, gs, 1 - gs,
                          sigma > 1e-3 ? BroadeningKernel::gaussian(sigma) : BroadeningKernel::delta());
    CHECK(check_bound(erasure_costs(sys, cfg), energy_scales(sys)).satisfied);
  }
}

TEST_CASE("Lorentzian: divergent costs and eta-erasure") {
  const NumericsConfig cfg;
  const auto lor = make(0, 0, 0, 0, 1, 1, BroadeningKernel::lorentzian(1.0));
  const ErasureCosts c = erasure_costs(lor, cfg);
  CHECK(c.divergent);
  CHECK(c.w_bar.is_divergent());
  CHECK(c.mu_half == doctest::Approx(0.0));

  const EtaErasure quarter = eta_erasure_work(lor, 0.25, cfg);
  CHECK(quarter.work == doctest::Approx(ln2 / (2 * std::numbers::pi)).epsilon(1e-9));
  CHECK(quarter.mu_eta == doctest::Approx(1.0).epsilon(1e-10));
  REQUIRE(quarter.closed_form.has_value());
  const double tenth = eta_erasure_work(lor, 0.1, cfg).work;
  CHECK(std::abs(tenth - 0.3735) < 1e-3);
  const double expected = std::log(1.0 / std::pow(std::cos(0.4 * std::numbers::pi), 2)) / (2 * std::numbers::pi);
  CHECK(tenth == doctest::Approx(expected).epsilon(1e-8));
  CHECK(eta_erasure_work(lor, 0.499999, cfg).work < 1e-10);
  for (double eta : {0.01, 0.001}) {
    const EtaErasure e = eta_erasure_work(lor, eta, cfg);
    CHECK(e.work == doctest::Approx(lorentzian_eta_work(1.0, eta)).epsilon(1e-8));
  }
  CHECK_THROWS_AS(eta_erasure_work(lor, 0.5, cfg), DomainError);
  CHECK_THROWS_AS(eta_erasure_work(lor, 0.0, cfg), DomainError);
}

TEST_CASE("eta-erasure approaches W0 for finite systems") {
  const NumericsConfig cfg;
  const auto sys = make(1, 1, 0, 0, 1, 1);
  const double w0 = erasure_costs(sys, cfg).w_zero.value();
  const double w = eta_erasure_work(sys, 1e-9, cfg).work;
  CHECK(w < w0);
  CHECK(w == doctest::Approx(w0).epsilon(1e-6));
  const EtaErasure atomic = eta_erasure_work(make(0, 0, 10, 0, 3, 7), 0.1, cfg);
  CHECK(atomic.work == doctest::Approx(3.0));
}
