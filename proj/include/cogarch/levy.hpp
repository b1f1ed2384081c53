#pragma once

#include <cstddef>
#include <vector>

#include "cogarch/rng.hpp"

namespace cogarch {

// Volatility-equation parameters. beta scales the level, eta is the
// exponential decay rate between jumps, phi the squared-jump feedback.
struct CogarchParams {
  double beta = 0.0;
  double eta = 0.0;
  double phi = 0.0;
};

enum class LevyKind { VarianceGamma, CompoundPoisson, PureBrownian };

// Driving Levy process: a symmetric pure-jump part plus an optional
// independent Brownian component with variance brownian_var per unit time.
// Only the jump part feeds the volatility recursion.
struct LevyModel {
  LevyKind kind = LevyKind::VarianceGamma;
  double vg_c = 1.0;     // jump density (vg_c/|x|) exp(-sqrt(2 vg_c)|x|)
  double cp_rate = 0.0;  // compound Poisson intensity
  double cp_jump = 0.0;  // symmetric two-point jumps of size +-cp_jump
  double brownian_var = 0.0;

  static LevyModel variance_gamma(double c);
  static LevyModel compound_poisson(double rate, double jump, double brownian_var = 0.0);
  static LevyModel pure_brownian(double var);

  double jump_variance() const;                       // m_2 of the jump measure
  double total_variance() const;                      // Var L_1 = brownian_var + m_2
  bool unit_variance(double tol = 1e-9) const;        // model-class normalization
};

// Moments m_k = int x^k nu(dx) of the jump measure. Odd orders vanish by
// symmetry. Throws std::domain_error when the value is not representable
// (factorial growth past double range).
double levy_moment(const LevyModel& model, int k);

// Laplace exponent Psi(p) = -p eta + int ((1 + phi x^2)^p - 1) nu(dx).
// Integer p uses the binomial expansion in the jump moments; fractional p is
// evaluated by adaptive quadrature and supported for VarianceGamma only.
double psi(const LevyModel& model, const CogarchParams& theta, double p);

struct LevyIncrement {
  double total;  // full increment of L over the step
  double jump;   // jump component alone (feeds the volatility recursion)
};

// i.i.d. increments of L over `count` steps of length delta. Draws live in
// cells base_cell, base_cell+1, ... of the given stream, so identical
// coordinates reproduce identical increments regardless of call pattern.
std::vector<LevyIncrement> sample_increments_split(const LevyModel& model, double delta,
                                                   std::size_t count, RngStream& stream,
                                                   std::uint64_t base_cell = 0);
std::vector<double> sample_increments(const LevyModel& model, double delta,
                                      std::size_t count, RngStream& stream);

}  // namespace cogarch
