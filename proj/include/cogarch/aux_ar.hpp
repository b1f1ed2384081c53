#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace cogarch {

struct AcvfEstimate {
  double mean = 0.0;
  std::vector<double> gamma;  // lags 0..max_lag, divisor-n convention
  std::size_t n = 0;
};

// Sample mean and autocovariances gamma(h) = (1/n) sum (w_i - mean)(w_{i+h} - mean).
AcvfEstimate sample_acvf(const std::vector<double>& w, int max_lag);

// Solve the order-r Yule-Walker system for the given autocovariances
// (gamma.size() > r required) via Levinson-Durbin. Throws std::domain_error
// when the Toeplitz system is degenerate (conditioning estimate above 1e12).
std::vector<double> yule_walker(const std::vector<double>& gamma, int r);

enum class AuxMethod { YuleWalker, LeastSquares };

// Auxiliary AR(r) description of the squared-return series:
// pi = (mu, a_1..a_r, gamma0).
struct AuxParams {
  double mu = 0.0;
  std::vector<double> a;
  double gamma0 = 0.0;
  bool clamped = false;
  int r() const { return int(a.size()); }
};

// Shrink AR coefficients (a_j <- a_j s^j) until every root of
// 1 - a_1 z - ... - a_r z^r has modulus >= min_root. Returns true when the
// vector was modified.
bool enforce_ar_margin(std::vector<double>& a, double min_root = 1.001);

// Fit the auxiliary model to a squared-return series. Estimates are clamped
// into the compact parameter region only when they fall outside (flagged).
AuxParams aux_estimate(const std::vector<double>& w, int r,
                       AuxMethod method = AuxMethod::YuleWalker);

// Long-run covariance of the auxiliary score vector and the derived
// asymptotic covariance of the auxiliary estimates.
struct SigmaEstimate {
  Eigen::MatrixXd sigma_star;  // (r+2) x (r+2), symmetric
  Eigen::MatrixXd sigma;       // blockdiag(1, Gamma^{-1}, 1) sandwich of sigma_star
  int lags = 0;
};

// lags < 0 selects the default ceil(10 log10 n).
SigmaEstimate estimate_sigma_star(const std::vector<double>& w, const AuxParams& aux,
                                  int lags = -1);

std::vector<double> squared(const std::vector<double>& returns);

}  // namespace cogarch
