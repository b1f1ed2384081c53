#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cogarch/aux_ar.hpp"
#include "cogarch/binding.hpp"
#include "cogarch/levy.hpp"
#include "cogarch/process.hpp"

namespace cogarch {

// Weighting of the auxiliary-parameter distance; empty matrix means identity.
struct WeightMatrix {
  Eigen::MatrixXd m;
  bool is_identity() const { return m.size() == 0; }
  static WeightMatrix identity() { return {}; }
  static WeightMatrix dense(Eigen::MatrixXd w);  // validates symmetric positive definite
  double quad(const Eigen::VectorXd& v) const;
};

struct DomainBox {
  CogarchParams lo;
  CogarchParams hi;
};

struct EstimationResult {
  CogarchParams theta_hat;
  std::string method;
  double objective = 0.0;
  bool feasible = false;  // psi(4) < 0 at theta_hat
  std::map<std::string, double> diagnostics;
};

// Moment estimator: empirical (mu, gamma0, k, rho) from the squared returns
// (log-linear decay fit over lags 1..r), inverted through the analytic moment
// map by scaled distance minimization over the domain box.
EstimationResult mm_estimate(const ReturnsSeries& returns, const LevyModel& model,
                             int r, const DomainBox& domain);

// The two inversion stages, exposed for direct use.
MomentSummary mm_fit_summary(const std::vector<double>& w, int r, double delta);
EstimationResult mm_from_summary(const MomentSummary& target, const LevyModel& model,
                                 const DomainBox& domain);

// Indirect estimator with the exact (analytic) binding function: minimizes
// || pi_hat - pi(theta) ||_Omega from the given start.
EstimationResult iie_star(const AuxParams& data_aux, const LevyModel& model,
                          double delta, const DomainBox& domain,
                          const CogarchParams& start,
                          const WeightMatrix& omega = WeightMatrix::identity());

struct GridSpec {
  double beta_lo = 0.0, beta_hi = 0.0;
  double eta_lo = 0.0, eta_hi = 0.0;
  double phi_lo = 0.0, phi_hi = 0.0;
  double d_beta = 0.002, d_eta = 0.002, d_phi = 0.002;
  GridSpec& spacing(double s) {
    d_beta = d_eta = d_phi = s;
    return *this;
  }
};

// Lattice over the restricted parameter set: beta axis times the (eta, phi)
// pairs with psi(4) < 0, both ascending.
struct ParameterGrid {
  std::vector<double> beta;
  std::vector<std::pair<double, double>> eta_phi;
  std::size_t points() const { return beta.size() * eta_phi.size(); }
};

struct IIEConfig {
  int K = 20;
  std::size_t n_sim = 0;  // returns per simulated path; must be set
  int substeps = 20;
  int burn_in = 500;
  std::uint64_t sim_seed = 1;
  std::uint32_t replication = 0;
  AuxMethod aux_method = AuxMethod::YuleWalker;
};

// Simulation-based indirect estimator over the grid. All candidate theta
// share one family of driver draws (path k uses stream (sim_seed,
// replication, SimPath, k)); paths are simulated at beta = 1 and the beta
// axis is swept through the exact scaling of the auxiliary vector. Ties in
// the objective resolve to the lexicographically smallest (beta, eta, phi).
EstimationResult iie_sim(const AuxParams& data_aux, const LevyModel& model,
                         double delta, const ParameterGrid& grid, const IIEConfig& cfg,
                         const WeightMatrix& omega = WeightMatrix::identity());

// Sandwich covariance of the indirect estimator: with J = G' Omega G and
// I = G' Omega (1 + 1/K) Sigma Omega G, returns J^{-1} I J^{-1}.
Eigen::MatrixXd asymptotic_cov(const Eigen::MatrixXd& binding_jac,
                               const WeightMatrix& omega, const Eigen::MatrixXd& sigma,
                               long K);

}  // namespace cogarch
