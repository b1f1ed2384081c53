#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "cogarch/levy.hpp"
#include "cogarch/rng.hpp"

namespace cogarch {

struct SimConfig {
  double delta = 1.0;   // observation spacing
  std::size_t n = 0;    // number of returns
  int substeps = 20;    // inner steps per observation interval
  int burn_in = 500;    // observation periods simulated and discarded
  std::uint64_t seed = 1;
  std::uint32_t replication = 0;
  std::uint16_t path = 0;
  StreamRole role = StreamRole::Data;
  // When nonnegative the volatility starts at this value and the burn-in is
  // skipped; otherwise it starts at the stationary mean and burns in.
  double sigma0 = -1.0;
};

struct ReturnsSeries {
  std::vector<double> values;
  double delta = 1.0;
  CogarchParams theta_used;
};

// Volatility sampled at inner-step resolution over the observation window.
// sigma2 holds the post-jump value at each grid time; jumps lists the nonzero
// jump-part increments (time, size).
struct VolatilityPath {
  std::vector<double> times;
  std::vector<double> sigma2;
  std::vector<std::pair<double, double>> jumps;
};

// Integrated returns G_i = int sigma_{s-} dL_s over ((i-1)Delta, i..Delta].
// Volatility follows the exact between-jump decay
//   sigma^2_{t+d} = beta/eta + (sigma^2_t - beta/eta) e^{-eta d}
// with the aggregated inner-step increment applied as a single jump
//   sigma^2 <- sigma^2 (1 + phi (dL_jump)^2)
// at the end of each inner step; the pre-jump (left-limit) volatility is the
// integrand. Requires Psi(1) < 0 unless a fixed sigma0 is supplied.
ReturnsSeries simulate_returns(const CogarchParams& theta, const LevyModel& model,
                               const SimConfig& cfg, VolatilityPath* path = nullptr);

// Same recursion driven by caller-supplied increments (shared-draw path for
// estimators). increments.size() must equal (burn_periods + n) * substeps.
void simulate_from_increments(const CogarchParams& theta, double delta, int substeps,
                              std::size_t burn_periods, std::size_t n,
                              const LevyIncrement* increments, double sigma2_start,
                              double* out_returns);

// Square-root-of-beta rescaling of a base series simulated at beta = 1.
ReturnsSeries rescale_beta(const ReturnsSeries& base, double beta);

// dG_i/dbeta = G_i / (2 beta), exact by the scaling relation above.
std::vector<double> returns_beta_gradient(const ReturnsSeries& series);

// Running jump functional K_s(phi) = sum_{0<u<=s} (dL_u)^2 / (1 + phi (dL_u)^2)
// evaluated at the path's grid times.
std::vector<double> k_process(const VolatilityPath& path, double phi);

// Pathwise derivatives of sigma^2_t with respect to (eta, phi), propagated
// through the volatility recursion with the same draws as simulate_returns.
struct GradientPath {
  std::vector<double> times;
  std::vector<double> sigma2;
  std::vector<double> d_eta;
  std::vector<double> d_phi;
};
GradientPath pathwise_gradient(const CogarchParams& theta, const LevyModel& model,
                               const SimConfig& cfg);

}  // namespace cogarch
