#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cogarch/aux_ar.hpp"
#include "cogarch/rng.hpp"
#include "doctest.h"

using namespace cogarch;

TEST_CASE("sample autocovariances, hand case") {
  const AcvfEstimate acvf = sample_acvf({1.0, 2.0, 3.0, 4.0}, 2);
  CHECK(acvf.mean == doctest::Approx(2.5).epsilon(1e-15));
  REQUIRE(acvf.gamma.size() == 3);
  CHECK(acvf.gamma[0] == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(acvf.gamma[1] == doctest::Approx(0.3125).epsilon(1e-15));
  CHECK(acvf.gamma[2] == doctest::Approx(-0.375).epsilon(1e-13));
}

TEST_CASE("yule-walker hand case") {
  const std::vector<double> a = yule_walker({1.0, 0.25, 0.125}, 2);
  REQUIRE(a.size() == 2);
  CHECK(a[0] == doctest::Approx(7.0 / 30.0).epsilon(1e-12));
  CHECK(a[1] == doctest::Approx(1.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("degenerate systems are rejected") {
  CHECK_THROWS_AS(yule_walker({0.0, 0.0, 0.0}, 2), std::domain_error);
  CHECK_THROWS_AS(yule_walker({1.0, 1.0, 1.0}, 2), std::domain_error);  // unit root
  const std::vector<double> constant(100, 3.0);
  CHECK_THROWS_AS(aux_estimate(constant, 2, AuxMethod::YuleWalker), std::domain_error);
  CHECK_THROWS_AS(aux_estimate(constant, 2, AuxMethod::LeastSquares), std::domain_error);
  CHECK_THROWS_AS(aux_estimate({1.0, 2.0, 3.0}, 2, AuxMethod::YuleWalker),
                  std::invalid_argument);  // too short
}

namespace {
// AR(2) sample with standard normal innovations.
std::vector<double> ar2_sample(double a1, double a2, double mu, std::size_t n,
                               std::uint64_t seed) {
  RngStream stream(seed);
  std::vector<double> x(n);
  double p1 = 0.0, p2 = 0.0;
  for (std::size_t i = 0; i < n + 500; ++i) {
    const double v = a1 * p1 + a2 * p2 + stream.normal();
    p2 = p1;
    p1 = v;
    if (i >= 500) x[i - 500] = mu + v;
  }
  return x;
}
}  // namespace

TEST_CASE("yule-walker and least squares agree on an AR(2) sample") {
  const std::vector<double> x = ar2_sample(0.5, -0.2, 10.0, 60000, 71);
  const AuxParams yw = aux_estimate(x, 2, AuxMethod::YuleWalker);
  const AuxParams ls = aux_estimate(x, 2, AuxMethod::LeastSquares);
  CHECK(std::abs(yw.a[0] - 0.5) < 0.02);
  CHECK(std::abs(yw.a[1] + 0.2) < 0.02);
  CHECK(std::abs(ls.a[0] - yw.a[0]) < 0.01);
  CHECK(std::abs(ls.a[1] - yw.a[1]) < 0.01);
  CHECK(std::abs(yw.mu - 10.0) < 0.05);
  CHECK(std::abs(ls.mu - yw.mu) < 1e-6);
  // Var X = 1 / (1 - a1 r1 - a2 r2) with r1 = a1/(1-a2), here sigma^2 = 1.
  const double r1 = 0.5 / 1.2;
  const double var = 1.0 / (1.0 - 0.5 * r1 + 0.2 * (0.5 * r1 - 0.2));
  CHECK(yw.gamma0 == doctest::Approx(var).epsilon(0.05));
}

TEST_CASE("auxiliary fit is invariant under mean shifts") {
  const std::vector<double> x = ar2_sample(0.4, 0.1, 10.0, 5000, 72);
  std::vector<double> shifted = x;
  for (double& v : shifted) v += 100.0;
  for (const AuxMethod method : {AuxMethod::YuleWalker, AuxMethod::LeastSquares}) {
    const AuxParams base = aux_estimate(x, 3, method);
    const AuxParams moved = aux_estimate(shifted, 3, method);
    CHECK(moved.mu == doctest::Approx(base.mu + 100.0).epsilon(1e-9));
    CHECK(moved.gamma0 == doctest::Approx(base.gamma0).epsilon(1e-7));
    for (int j = 0; j < 3; ++j)
      CHECK(moved.a[std::size_t(j)] == doctest::Approx(base.a[std::size_t(j)]).epsilon(1e-7));
  }
}

namespace {
double max_root_modulus(const std::vector<double>& a) {
  const int r = int(a.size());
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(r, r);
  for (int j = 0; j < r; ++j) companion(0, j) = a[std::size_t(j)];
  for (int i = 1; i < r; ++i) companion(i, i - 1) = 1.0;
  return companion.eigenvalues().cwiseAbs().maxCoeff();
}
}  // namespace

TEST_CASE("explosive AR coefficients are shrunk to the stability margin") {
  std::vector<double> a{1.2};
  CHECK(enforce_ar_margin(a));
  CHECK(max_root_modulus(a) == doctest::Approx(1.0 / 1.001).epsilon(1e-9));

  std::vector<double> b{0.9, 0.3};
  CHECK(enforce_ar_margin(b));
  CHECK(max_root_modulus(b) == doctest::Approx(1.0 / 1.001).epsilon(1e-9));

  std::vector<double> c{0.5, 0.2};
  CHECK_FALSE(enforce_ar_margin(c));
  CHECK(c[0] == 0.5);
  CHECK(c[1] == 0.2);
}

TEST_CASE("long-run covariance of a white-noise auxiliary fit") {
  // w_i = z_i^2: mu = 1, gamma0 = 2, all AR coefficients ~ 0. The sandwich
  // should then give Var entries close to the classical white-noise limits.
  RngStream stream(73);
  const std::size_t n = 40000;
  std::vector<double> w(n);
  for (double& v : w) {
    const double z = stream.normal();
    v = z * z;
  }
  const int r = 3;
  const AuxParams aux = aux_estimate(w, r, AuxMethod::YuleWalker);
  const SigmaEstimate est = estimate_sigma_star(w, aux);
  CHECK(est.lags == 47);  // ceil(10 log10 n)

  CHECK((est.sigma_star - est.sigma_star.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((est.sigma - est.sigma.transpose()).cwiseAbs().maxCoeff() < 1e-12);

  // mu block: long-run variance of an i.i.d. series is gamma0 = 2.
  CHECK(est.sigma(0, 0) == doctest::Approx(2.0).epsilon(0.15));
  // a block: sqrt(n)-covariance of YW coefficients on white noise is I.
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      CHECK(std::abs(est.sigma(1 + i, 1 + j) - (i == j ? 1.0 : 0.0)) < 0.15);
  // last diagonal: Var((w - mu)^2 - gamma0) = E (z^2 - 1)^4 - gamma0^2 = 56.
  CHECK(est.sigma(1 + r, 1 + r) == doctest::Approx(56.0).epsilon(0.25));
}

TEST_CASE("truncation at lag zero yields a positive semidefinite gram matrix") {
  RngStream stream(74);
  std::vector<double> w(4000);
  for (double& v : w) {
    const double z = stream.normal();
    v = z * z + 0.1;
  }
  const AuxParams aux = aux_estimate(w, 2, AuxMethod::YuleWalker);
  const SigmaEstimate est = estimate_sigma_star(w, aux, 0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(est.sigma_star);
  CHECK(eig.eigenvalues().minCoeff() > -1e-8 * eig.eigenvalues().maxCoeff());
}

TEST_CASE("squared returns helper") {
  const std::vector<double> w = squared({-2.0, 3.0, 0.5});
  CHECK(w == std::vector<double>{4.0, 9.0, 0.25});
}
