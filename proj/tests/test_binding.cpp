#include <cmath>
#include <stdexcept>
#include <vector>

#include "cogarch/binding.hpp"
#include "doctest.h"

using namespace cogarch;

namespace {
const LevyModel kVg = LevyModel::variance_gamma(1.0);
const CogarchParams kTheta0{0.04, 0.053, 0.038};
const BindingBackend kAnalytic = BindingBackend::analytic();
}  // namespace

TEST_CASE("decay recovery, hand case and roundtrip") {
  const auto [k, rho] = recover_k_rho(1.0, 0.25, 0.125);
  CHECK(k == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rho == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  MomentSummary ms;
  ms.mu = 1.0;
  ms.gamma0 = 2.0;
  ms.k = 0.7;
  ms.rho = 0.3;
  const std::vector<double> gamma = acvf_from_moments(ms, 2);
  REQUIRE(gamma.size() == 3);
  const auto [k2, rho2] = recover_k_rho(gamma[0], gamma[1], gamma[2]);
  CHECK(k2 == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(rho2 == doctest::Approx(0.3).epsilon(1e-12));

  CHECK_THROWS_AS(recover_k_rho(1.0, 0.1, 0.2), std::domain_error);   // not decaying
  CHECK_THROWS_AS(recover_k_rho(1.0, -0.1, 0.05), std::domain_error);
  ms.k = 1.5;  // gamma(1) would exceed gamma(0)
  CHECK_THROWS_AS(acvf_from_moments(ms, 2), std::domain_error);
}

TEST_CASE("analytic moment map is consistent with the laplace exponent") {
  const MomentSummary ms = moment_map(kTheta0, kVg, 1.0, kAnalytic);
  const double lambda = -psi(kVg, kTheta0, 1.0);
  CHECK(ms.rho == doctest::Approx(lambda).epsilon(1e-14));
  CHECK(ms.mu == doctest::Approx(kTheta0.beta / lambda).epsilon(1e-14));
  CHECK(ms.gamma0 > 0.0);
  CHECK(ms.k > 0.0);
  CHECK(ms.k < 1.0);
  // Regression anchors for the closed-form gamma0 and k.
  CHECK(ms.mu == doctest::Approx(2.6666666666666665).epsilon(1e-12));
  CHECK(ms.rho == doctest::Approx(0.015).epsilon(1e-12));

  const MomentSummary half = moment_map(kTheta0, kVg, 0.5, kAnalytic);
  CHECK(half.rho == doctest::Approx(0.5 * lambda).epsilon(1e-14));
  CHECK(half.mu == doctest::Approx(0.5 * ms.mu).epsilon(1e-14));

  const LevyModel off = LevyModel::compound_poisson(2.0, 0.8);
  CHECK_THROWS_AS(moment_map(kTheta0, off, 1.0, kAnalytic), std::domain_error);
  CHECK_THROWS_AS(moment_map({0.04, 0.03, 0.04}, kVg, 1.0, kAnalytic), std::domain_error);
}

TEST_CASE("binding coefficients depend on beta only through mu and gamma0") {
  const int r = 6;
  const AuxParams low = binding(kTheta0, kVg, 1.0, r, kAnalytic);
  const AuxParams high = binding({0.08, kTheta0.eta, kTheta0.phi}, kVg, 1.0, r, kAnalytic);
  CHECK(high.mu == doctest::Approx(2.0 * low.mu).epsilon(1e-12));
  CHECK(high.gamma0 == doctest::Approx(4.0 * low.gamma0).epsilon(1e-12));
  for (int j = 0; j < r; ++j)
    CHECK(std::abs(high.a[std::size_t(j)] - low.a[std::size_t(j)]) <= 1e-10);
}

TEST_CASE("binding projects the model autocovariances") {
  const int r = 2;
  const AuxParams pi = binding(kTheta0, kVg, 1.0, r, kAnalytic);
  const MomentSummary ms = moment_map(kTheta0, kVg, 1.0, kAnalytic);
  const std::vector<double> gamma = acvf_from_moments(ms, r);
  // Solve the 2x2 Yule-Walker system back for gamma(1), gamma(2).
  const double g1 = pi.a[0] * gamma[0] + pi.a[1] * gamma[1];
  const double g2 = pi.a[0] * gamma[1] + pi.a[1] * gamma[0];
  CHECK(g1 == doctest::Approx(gamma[1]).epsilon(1e-10));
  CHECK(g2 == doctest::Approx(gamma[2]).epsilon(1e-10));
  CHECK(pi.gamma0 == doctest::Approx(ms.gamma0).epsilon(1e-14));
  CHECK(pi.mu == doctest::Approx(ms.mu).epsilon(1e-14));

  CHECK_THROWS_AS(binding(kTheta0, kVg, 1.0, 1, kAnalytic), std::invalid_argument);
}

TEST_CASE("stacked auxiliary vector layout") {
  const AuxParams pi = binding(kTheta0, kVg, 1.0, 4, kAnalytic);
  const Eigen::VectorXd v = stack_aux(pi);
  REQUIRE(v.size() == 6);
  CHECK(v(0) == pi.mu);
  for (int j = 0; j < 4; ++j) CHECK(v(1 + j) == pi.a[std::size_t(j)]);
  CHECK(v(5) == pi.gamma0);
}

TEST_CASE("monte carlo backend agrees with the closed forms") {
  const BindingBackend mc = BindingBackend::monte_carlo(8, 50000, 909);
  const MomentSummaryMc detail = moment_map_mc_detail(kTheta0, kVg, 1.0, mc);
  const MomentSummary exact = moment_map(kTheta0, kVg, 1.0, kAnalytic);
  INFO("mc mu=", detail.mean.mu, " se=", detail.se.mu);
  CHECK(std::abs(detail.mean.mu - exact.mu) < 3.0 * detail.se.mu);
  INFO("mc gamma0=", detail.mean.gamma0, " se=", detail.se.gamma0);
  CHECK(std::abs(detail.mean.gamma0 - exact.gamma0) < 3.0 * detail.se.gamma0);
  INFO("mc k=", detail.mean.k, " se=", detail.se.k);
  CHECK(std::abs(detail.mean.k - exact.k) < 3.0 * detail.se.k);
  INFO("mc rho=", detail.mean.rho, " se=", detail.se.rho);
  CHECK(std::abs(detail.mean.rho - exact.rho) < 3.0 * detail.se.rho);

  const MomentSummary via_map = moment_map(kTheta0, kVg, 1.0, mc);
  CHECK(via_map.mu == detail.mean.mu);
  CHECK(via_map.gamma0 == detail.mean.gamma0);
}

TEST_CASE("small jump feedback approaches the constant-volatility limit") {
  // As phi -> 0 the returns become i.i.d.: k -> 0 and gamma0 -> 2 mu^2 ...
  // for the Brownian-free VG driver gamma0 -> 2 M1^2 + m4 M2 with M2 -> M1^2.
  const CogarchParams tiny{0.04, 0.053, 1e-7};
  const MomentSummary ms = moment_map(tiny, kVg, 1.0, kAnalytic);
  const double m1 = tiny.beta / -psi(kVg, tiny, 1.0);
  CHECK(ms.k < 1e-5);
  CHECK(ms.gamma0 == doctest::Approx(2.0 * m1 * m1 + 3.0 * m1 * m1).epsilon(1e-4));
}

TEST_CASE("binding jacobian has full column rank and exact beta linearity") {
  const BindingJacobian bj = gradient_binding(kTheta0, kVg, 1.0, 10, kAnalytic);
  REQUIRE(bj.jac.rows() == 12);
  REQUIRE(bj.jac.cols() == 3);
  CHECK(bj.rank == 3);
  const MomentSummary ms = moment_map(kTheta0, kVg, 1.0, kAnalytic);
  CHECK(bj.jac(0, 0) == doctest::Approx(ms.mu / kTheta0.beta).epsilon(1e-6));
}
