#include <cmath>
#include <stdexcept>
#include <vector>

#include "cogarch/levy.hpp"
#include "cogarch/process.hpp"
#include "doctest.h"

using namespace cogarch;

namespace {
const LevyModel kVg = LevyModel::variance_gamma(1.0);
const CogarchParams kTheta0{0.04, 0.053, 0.038};
}  // namespace

TEST_CASE("jump-free volatility follows the exact decay") {
  // A Brownian driver never jumps, so sigma^2 relaxes deterministically.
  const LevyModel pb = LevyModel::pure_brownian(1.0);
  const CogarchParams theta{0.5, 0.3, 0.2};
  SimConfig cfg;
  cfg.delta = 0.5;
  cfg.n = 50;
  cfg.substeps = 4;
  cfg.seed = 21;
  cfg.sigma0 = 2.0;
  VolatilityPath path;
  simulate_returns(theta, pb, cfg, &path);
  REQUIRE(path.times.size() == 200);
  CHECK(path.jumps.empty());
  const double level = theta.beta / theta.eta;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double expected = level + (2.0 - level) * std::exp(-theta.eta * path.times[i]);
    CHECK(path.sigma2[i] == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("nonstationary parameters are rejected") {
  SimConfig cfg;
  cfg.n = 10;
  CHECK_THROWS_AS(simulate_returns({0.04, 0.03, 0.04}, kVg, cfg), std::domain_error);
  CHECK_THROWS_AS(simulate_returns({0.04, 0.038, 0.038}, kVg, cfg), std::domain_error);
}

TEST_CASE("simulation is deterministic in the stream coordinates") {
  SimConfig cfg;
  cfg.n = 400;
  cfg.seed = 5;
  cfg.replication = 2;
  const ReturnsSeries a = simulate_returns(kTheta0, kVg, cfg);
  const ReturnsSeries b = simulate_returns(kTheta0, kVg, cfg);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
  cfg.replication = 3;
  const ReturnsSeries c = simulate_returns(kTheta0, kVg, cfg);
  int differing = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) differing += a.values[i] != c.values[i];
  CHECK(differing > 390);
}

TEST_CASE("the fast path delegates to the shared-increment recursion") {
  SimConfig cfg;
  cfg.n = 200;
  cfg.substeps = 10;
  cfg.burn_in = 40;
  cfg.seed = 33;
  cfg.role = StreamRole::SimPath;
  cfg.path = 4;
  const ReturnsSeries direct = simulate_returns(kTheta0, kVg, cfg);

  RngStream stream(cfg.seed, cfg.replication, cfg.role, cfg.path);
  const double d_in = cfg.delta / cfg.substeps;
  const std::size_t steps = (std::size_t(cfg.burn_in) + cfg.n) * std::size_t(cfg.substeps);
  const std::vector<LevyIncrement> inc = sample_increments_split(kVg, d_in, steps, stream);
  const double start = kTheta0.beta / -psi(kVg, kTheta0, 1.0);
  std::vector<double> manual(cfg.n);
  simulate_from_increments(kTheta0, cfg.delta, cfg.substeps, std::size_t(cfg.burn_in),
                           cfg.n, inc.data(), start, manual.data());
  for (std::size_t i = 0; i < manual.size(); ++i) CHECK(direct.values[i] == manual[i]);
}

TEST_CASE("returns scale with the square root of beta") {
  SimConfig cfg;
  cfg.n = 200;
  cfg.seed = 8;
  const ReturnsSeries base = simulate_returns({1.0, 0.053, 0.038}, kVg, cfg);
  const double beta = 0.09;
  const ReturnsSeries scaled = rescale_beta(base, beta);
  const ReturnsSeries direct = simulate_returns({beta, 0.053, 0.038}, kVg, cfg);
  for (std::size_t i = 0; i < direct.values.size(); ++i) {
    const double want = direct.values[i];
    CHECK(std::abs(scaled.values[i] - want) <= 1e-11 * std::max(1.0, std::abs(want)));
  }
  CHECK(scaled.theta_used.beta == doctest::Approx(beta));
  CHECK_THROWS_AS(rescale_beta(direct, 2.0), std::invalid_argument);

  const std::vector<double> grad = returns_beta_gradient(direct);
  const double inv = 1.0 / (2.0 * beta);
  for (std::size_t i = 0; i < grad.size(); ++i) CHECK(grad[i] == direct.values[i] * inv);
}

TEST_CASE("long-run mean of squared returns matches beta delta / |psi(1)|") {
  SimConfig cfg;
  cfg.n = 400000;
  cfg.seed = 1;
  {
    const ReturnsSeries series = simulate_returns(kTheta0, kVg, cfg);
    double mean = 0.0;
    for (double g : series.values) mean += g * g;
    mean /= double(series.values.size());
    CHECK(std::abs(mean - 8.0 / 3.0) < 0.13);  // 4.5 sigma with long-run variance ~330
  }
  {
    const CogarchParams theta{0.06, 0.06, 0.02};
    const ReturnsSeries series = simulate_returns(theta, kVg, cfg);
    double mean = 0.0;
    for (double g : series.values) mean += g * g;
    mean /= double(series.values.size());
    CHECK(std::abs(mean - 1.5) < 0.05);
  }
}

TEST_CASE("volatility stays above its lower envelope") {
  SimConfig cfg;
  cfg.n = 2000;
  cfg.seed = 17;
  cfg.sigma0 = 1.0;
  VolatilityPath path;
  simulate_returns(kTheta0, kVg, cfg, &path);
  const double floor = std::min(1.0, kTheta0.beta / kTheta0.eta);
  for (double s2 : path.sigma2) {
    CHECK(s2 > 0.0);
    CHECK(s2 >= floor - 1e-12);
  }
  CHECK_FALSE(path.jumps.empty());
}

TEST_CASE("jump functional hand case") {
  VolatilityPath path;
  path.times = {1.0, 2.0, 3.0};
  path.sigma2 = {1.0, 1.0, 1.0};
  path.jumps = {{0.5, 2.0}, {2.5, 1.0}, {3.0, 3.0}};
  const double phi = 0.1;
  const std::vector<double> k = k_process(path, phi);
  REQUIRE(k.size() == 3);
  const double j1 = 4.0 / 1.4, j2 = 1.0 / 1.1, j3 = 9.0 / 1.9;
  CHECK(k[0] == doctest::Approx(j1).epsilon(1e-12));
  CHECK(k[1] == doctest::Approx(j1).epsilon(1e-12));
  CHECK(k[2] == doctest::Approx(j1 + j2 + j3).epsilon(1e-12));
}

TEST_CASE("pathwise volatility gradient matches common-seed differences") {
  SimConfig cfg;
  cfg.n = 300;
  cfg.substeps = 10;
  cfg.burn_in = 50;
  cfg.seed = 3;
  const GradientPath grad = pathwise_gradient(kTheta0, kVg, cfg);

  auto sigma2_at = [&](double eta, double phi) {
    VolatilityPath path;
    simulate_returns({kTheta0.beta, eta, phi}, kVg, cfg, &path);
    return path.sigma2;
  };
  auto max_error = [&](double h, bool wrt_eta) {
    const std::vector<double> up = wrt_eta ? sigma2_at(kTheta0.eta + h, kTheta0.phi)
                                           : sigma2_at(kTheta0.eta, kTheta0.phi + h);
    const std::vector<double> dn = wrt_eta ? sigma2_at(kTheta0.eta - h, kTheta0.phi)
                                           : sigma2_at(kTheta0.eta, kTheta0.phi - h);
    const std::vector<double>& exact = wrt_eta ? grad.d_eta : grad.d_phi;
    double err = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i)
      err = std::max(err, std::abs((up[i] - dn[i]) / (2.0 * h) - exact[i]));
    return err;
  };

  for (bool wrt_eta : {true, false}) {
    const double e1 = max_error(2e-4, wrt_eta);
    const double e2 = max_error(1e-4, wrt_eta);
    const double order = std::log2(e1 / e2);
    INFO("wrt_eta=", wrt_eta, " e1=", e1, " e2=", e2, " order=", order);
    CHECK(order >= 1.8);
  }
}

TEST_CASE("recorded volatility grid aligns with the observation window") {
  SimConfig cfg;
  cfg.delta = 2.0;
  cfg.n = 5;
  cfg.substeps = 4;
  cfg.seed = 2;
  VolatilityPath path;
  simulate_returns(kTheta0, kVg, cfg, &path);
  REQUIRE(path.times.size() == 20);
  CHECK(path.times.front() == doctest::Approx(0.5));
  CHECK(path.times.back() == doctest::Approx(10.0));
}
