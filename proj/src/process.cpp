#include "cogarch/process.hpp"

#include <cmath>
#include <stdexcept>

namespace cogarch {

namespace {

void check_common(const CogarchParams& theta, const SimConfig& cfg) {
  if (!(theta.beta > 0.0) || !(theta.eta > 0.0) || !(theta.phi > 0.0))
    throw std::invalid_argument("simulate_returns: parameters must be positive");
  if (cfg.n == 0) throw std::invalid_argument("simulate_returns: n must be positive");
  if (cfg.substeps < 1) throw std::invalid_argument("simulate_returns: substeps must be >= 1");
  if (!(cfg.delta > 0.0)) throw std::invalid_argument("simulate_returns: delta must be positive");
  if (cfg.burn_in < 0) throw std::invalid_argument("simulate_returns: burn_in must be >= 0");
}

// Stationary-mean start; requires Psi(1) < 0.
double start_value(const CogarchParams& theta, const LevyModel& model) {
  const double p1 = psi(model, theta, 1.0);
  if (!(p1 < 0.0))
    throw std::domain_error("simulate_returns: stationarity requires psi(1) < 0");
  return theta.beta / (-p1);
}

}  // namespace

void simulate_from_increments(const CogarchParams& theta, double delta, int substeps,
                              std::size_t burn_periods, std::size_t n,
                              const LevyIncrement* increments, double sigma2_start,
                              double* out_returns) {
  const double d_in = delta / substeps;
  const double mean_level = theta.beta / theta.eta;
  const double decay = std::exp(-theta.eta * d_in);
  const double phi = theta.phi;

  double s = sigma2_start;
  std::size_t idx = 0;
  const std::size_t burn_steps = burn_periods * std::size_t(substeps);
  for (std::size_t j = 0; j < burn_steps; ++j, ++idx) {
    const double pre = mean_level + (s - mean_level) * decay;
    const double x = increments[idx].jump;
    s = pre * (1.0 + phi * x * x);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < substeps; ++j, ++idx) {
      const double pre = mean_level + (s - mean_level) * decay;
      acc += std::sqrt(pre) * increments[idx].total;
      const double x = increments[idx].jump;
      s = pre * (1.0 + phi * x * x);
    }
    out_returns[i] = acc;
  }
}

ReturnsSeries simulate_returns(const CogarchParams& theta, const LevyModel& model,
                               const SimConfig& cfg, VolatilityPath* path) {
  check_common(theta, cfg);
  const bool fixed_start = cfg.sigma0 >= 0.0;
  const double s0 = fixed_start ? cfg.sigma0 : start_value(theta, model);
  const std::size_t burn_periods = fixed_start ? 0 : std::size_t(cfg.burn_in);
  const double d_in = cfg.delta / cfg.substeps;
  const std::size_t total = (burn_periods + cfg.n) * std::size_t(cfg.substeps);

  RngStream stream(cfg.seed, cfg.replication, cfg.role, cfg.path);
  const std::vector<LevyIncrement> inc =
      sample_increments_split(model, d_in, total, stream);

  ReturnsSeries out;
  out.delta = cfg.delta;
  out.theta_used = theta;
  out.values.resize(cfg.n);

  if (path == nullptr) {
    simulate_from_increments(theta, cfg.delta, cfg.substeps, burn_periods, cfg.n,
                             inc.data(), s0, out.values.data());
    return out;
  }

  path->times.clear();
  path->sigma2.clear();
  path->jumps.clear();
  path->times.reserve(cfg.n * std::size_t(cfg.substeps));
  path->sigma2.reserve(cfg.n * std::size_t(cfg.substeps));

  const double mean_level = theta.beta / theta.eta;
  const double decay = std::exp(-theta.eta * d_in);
  double s = s0;
  std::size_t idx = 0;
  for (std::size_t j = 0; j < burn_periods * std::size_t(cfg.substeps); ++j, ++idx) {
    const double pre = mean_level + (s - mean_level) * decay;
    const double x = inc[idx].jump;
    s = pre * (1.0 + theta.phi * x * x);
  }
  std::size_t obs_step = 0;
  for (std::size_t i = 0; i < cfg.n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < cfg.substeps; ++j, ++idx, ++obs_step) {
      const double pre = mean_level + (s - mean_level) * decay;
      acc += std::sqrt(pre) * inc[idx].total;
      const double x = inc[idx].jump;
      s = pre * (1.0 + theta.phi * x * x);
      const double t = double(obs_step + 1) * d_in;
      path->times.push_back(t);
      path->sigma2.push_back(s);
      if (x != 0.0) path->jumps.emplace_back(t, x);
    }
    out.values[i] = acc;
  }
  return out;
}

ReturnsSeries rescale_beta(const ReturnsSeries& base, double beta) {
  if (base.theta_used.beta != 1.0)
    throw std::invalid_argument("rescale_beta: base series must be simulated at beta = 1");
  if (!(beta > 0.0)) throw std::invalid_argument("rescale_beta: beta must be positive");
  ReturnsSeries out = base;
  const double f = std::sqrt(beta);
  for (double& v : out.values) v *= f;
  out.theta_used.beta = beta;
  return out;
}

std::vector<double> returns_beta_gradient(const ReturnsSeries& series) {
  if (!(series.theta_used.beta > 0.0))
    throw std::invalid_argument("returns_beta_gradient: beta must be positive");
  std::vector<double> g(series.values.size());
  const double inv = 1.0 / (2.0 * series.theta_used.beta);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = series.values[i] * inv;
  return g;
}

std::vector<double> k_process(const VolatilityPath& path, double phi) {
  if (!(phi > 0.0)) throw std::invalid_argument("k_process: phi must be positive");
  std::vector<double> out(path.times.size());
  double acc = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double t = path.times[i];
    while (j < path.jumps.size() && path.jumps[j].first <= t) {
      const double x2 = path.jumps[j].second * path.jumps[j].second;
      acc += x2 / (1.0 + phi * x2);
      ++j;
    }
    out[i] = acc;
  }
  return out;
}

GradientPath pathwise_gradient(const CogarchParams& theta, const LevyModel& model,
                               const SimConfig& cfg) {
  check_common(theta, cfg);
  const bool fixed_start = cfg.sigma0 >= 0.0;
  const double d_in = cfg.delta / cfg.substeps;
  const std::size_t burn_periods = fixed_start ? 0 : std::size_t(cfg.burn_in);
  const std::size_t total = (burn_periods + cfg.n) * std::size_t(cfg.substeps);

  RngStream stream(cfg.seed, cfg.replication, cfg.role, cfg.path);
  const std::vector<LevyIncrement> inc =
      sample_increments_split(model, d_in, total, stream);

  double s, de, dp;
  if (fixed_start) {
    s = cfg.sigma0;
    de = 0.0;
    dp = 0.0;
  } else {
    const double p1 = psi(model, theta, 1.0);
    if (!(p1 < 0.0))
      throw std::domain_error("pathwise_gradient: stationarity requires psi(1) < 0");
    const double lam = -p1;
    const double m2 = levy_moment(model, 2);
    s = theta.beta / lam;
    // d/d(eta,phi) of beta/lam with lam = eta - phi m2.
    de = -theta.beta / (lam * lam);
    dp = theta.beta * m2 / (lam * lam);
  }

  const double mean_level = theta.beta / theta.eta;
  const double dmean_deta = -theta.beta / (theta.eta * theta.eta);
  const double decay = std::exp(-theta.eta * d_in);

  GradientPath out;
  const std::size_t m = cfg.n * std::size_t(cfg.substeps);
  out.times.reserve(m);
  out.sigma2.reserve(m);
  out.d_eta.reserve(m);
  out.d_phi.reserve(m);

  std::size_t idx = 0;
  const std::size_t burn_steps = burn_periods * std::size_t(cfg.substeps);
  for (std::size_t j = 0; j < total; ++j, ++idx) {
    const double pre = mean_level + (s - mean_level) * decay;
    const double dpre_e =
        dmean_deta * (1.0 - decay) + de * decay - (s - mean_level) * d_in * decay;
    const double dpre_p = dp * decay;
    const double x = inc[idx].jump;
    const double x2 = x * x;
    const double u = 1.0 + theta.phi * x2;
    s = pre * u;
    de = dpre_e * u;
    dp = dpre_p * u + pre * x2;
    if (j >= burn_steps) {
      out.times.push_back(double(j - burn_steps + 1) * d_in);
      out.sigma2.push_back(s);
      out.d_eta.push_back(de);
      out.d_phi.push_back(dp);
    }
  }
  return out;
}

}  // namespace cogarch
