#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "cogarch/aux_ar.hpp"
#include "cogarch/levy.hpp"

namespace cogarch {

// Stationary squared-return moment structure at observation spacing delta:
// E W = mu, Var W = gamma0, Cov(W_i, W_{i+h}) = gamma0 * k * exp(-rho h).
struct MomentSummary {
  double mu = 0.0;
  double gamma0 = 0.0;
  double k = 0.0;
  double rho = 0.0;
  double delta = 1.0;
};

enum class BindingBackendKind { Analytic, MonteCarlo };

struct BindingBackend {
  BindingBackendKind kind = BindingBackendKind::Analytic;
  // Monte Carlo settings.
  int paths = 16;
  std::size_t n_sim = 200000;
  int substeps = 20;
  int burn_in = 500;
  int fit_lags = 40;  // lags used for the log-linear decay fit
  std::uint64_t seed = 1;

  static BindingBackend analytic();
  static BindingBackend monte_carlo(int paths, std::size_t n_sim, std::uint64_t seed);
};

// Moment map theta -> (mu, gamma0, k, rho). The analytic backend uses closed
// forms in Psi(1), Psi(2) and the fourth jump moment; the Monte Carlo backend
// averages per-path sample moments with a log-linear decay fit.
MomentSummary moment_map(const CogarchParams& theta, const LevyModel& model,
                         double delta, const BindingBackend& backend);

// Monte Carlo evaluation with per-path scatter (standard errors of the
// across-path means), for cross-validation against the analytic backend.
struct MomentSummaryMc {
  MomentSummary mean;
  MomentSummary se;
};
MomentSummaryMc moment_map_mc_detail(const CogarchParams& theta, const LevyModel& model,
                                     double delta, const BindingBackend& backend);

// Autocovariances implied by a moment summary, lags 0..r.
std::vector<double> acvf_from_moments(const MomentSummary& moments, int r);

// Invert (gamma0, gamma1, gamma2) -> (k, rho). Throws std::domain_error when
// the inputs are outside the moment cone (nonpositive, or non-decaying).
std::pair<double, double> recover_k_rho(double gamma0, double gamma1, double gamma2);

// Auxiliary parameters implied by the model at theta: the Yule-Walker
// projection of the model autocovariances. Requires r >= 2.
AuxParams binding(const CogarchParams& theta, const LevyModel& model, double delta,
                  int r, const BindingBackend& backend);

// Central-difference Jacobian of the stacked binding vector
// (mu, a_1..a_r, gamma0) with respect to (beta, eta, phi). Shared backend
// draws across the stencil keep Monte Carlo differences coherent.
struct BindingJacobian {
  Eigen::MatrixXd jac;  // (r+2) x 3
  int rank = 0;
};
BindingJacobian gradient_binding(const CogarchParams& theta, const LevyModel& model,
                                 double delta, int r, const BindingBackend& backend);

Eigen::VectorXd stack_aux(const AuxParams& aux);

}  // namespace cogarch
