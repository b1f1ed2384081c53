#include "cogarch/binding.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "cogarch/process.hpp"

namespace cogarch {

BindingBackend BindingBackend::analytic() { return BindingBackend{}; }

BindingBackend BindingBackend::monte_carlo(int paths, std::size_t n_sim,
                                           std::uint64_t seed) {
  BindingBackend b;
  b.kind = BindingBackendKind::MonteCarlo;
  b.paths = paths;
  b.n_sim = n_sim;
  b.seed = seed;
  return b;
}

namespace {

MomentSummary moment_map_analytic(const CogarchParams& theta, const LevyModel& model,
                                  double delta) {
  if (!model.unit_variance())
    throw std::domain_error("moment_map: driver must have unit variance");
  const double p1 = psi(model, theta, 1.0);
  const double p2 = psi(model, theta, 2.0);
  if (!(p1 < 0.0)) throw std::domain_error("moment_map: psi(1) >= 0 (nonstationary)");
  if (!(p2 < 0.0)) throw std::domain_error("moment_map: psi(2) >= 0 (second moments diverge)");
  const double lam = -p1;
  const double lam2 = -p2;
  const double m4 = levy_moment(model, 4);

  const double m1 = theta.beta / lam;                        // E sigma^2
  const double msq = 2.0 * theta.beta * theta.beta / (lam * lam2);  // E sigma^4
  const double v = (1.0 + theta.phi * m4) * msq - m1 * m1;
  const double rho = lam * delta;
  const double em = -std::expm1(-rho);  // 1 - e^{-rho}

  MomentSummary out;
  out.delta = delta;
  out.mu = m1 * delta;
  out.rho = rho;
  out.gamma0 = 2.0 * m1 * m1 * delta * delta + 6.0 * (v / lam) * (delta - em / lam) +
               m4 * msq * delta;
  const double gamma1 = v * em * em / (lam * lam);
  out.k = gamma1 * std::exp(rho) / out.gamma0;
  return out;
}

struct FitResult {
  double intercept;
  double slope;
};

// Least-squares line through (h, log gamma(h)) over positive lags.
FitResult log_linear_fit(const std::vector<double>& gamma, int max_lag) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (int h = 1; h <= max_lag; ++h) {
    const double g = gamma[std::size_t(h)];
    if (!(g > 0.0)) continue;
    const double x = double(h);
    const double y = std::log(g);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw std::domain_error("moment_map: too few positive autocovariances");
  const double det = double(m) * sxx - sx * sx;
  return {(sy * sxx - sx * sxy) / det, (double(m) * sxy - sx * sy) / det};
}

MomentSummaryMc moment_map_mc(const CogarchParams& theta, const LevyModel& model,
                              double delta, const BindingBackend& backend) {
  if (backend.paths < 2) throw std::invalid_argument("moment_map: need at least 2 paths");
  std::vector<double> mu_s, g0_s, k_s, rho_s;
  for (int p = 0; p < backend.paths; ++p) {
    SimConfig cfg;
    cfg.delta = delta;
    cfg.n = backend.n_sim;
    cfg.substeps = backend.substeps;
    cfg.burn_in = backend.burn_in;
    cfg.seed = backend.seed;
    cfg.path = std::uint16_t(p);
    cfg.role = StreamRole::BindingMc;
    const ReturnsSeries series = simulate_returns(theta, model, cfg);
    const std::vector<double> w = squared(series.values);
    const AcvfEstimate acvf = sample_acvf(w, backend.fit_lags);
    const FitResult fit = log_linear_fit(acvf.gamma, backend.fit_lags);
    mu_s.push_back(acvf.mean);
    g0_s.push_back(acvf.gamma[0]);
    rho_s.push_back(-fit.slope);
    k_s.push_back(std::exp(fit.intercept) / acvf.gamma[0]);
  }
  auto mean_se = [](const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= double(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    const double sd = std::sqrt(ss / double(xs.size() - 1));
    return std::pair<double, double>{m, sd / std::sqrt(double(xs.size()))};
  };
  MomentSummaryMc out;
  out.mean.delta = out.se.delta = delta;
  std::tie(out.mean.mu, out.se.mu) = mean_se(mu_s);
  std::tie(out.mean.gamma0, out.se.gamma0) = mean_se(g0_s);
  std::tie(out.mean.k, out.se.k) = mean_se(k_s);
  std::tie(out.mean.rho, out.se.rho) = mean_se(rho_s);
  return out;
}

}  // namespace

MomentSummary moment_map(const CogarchParams& theta, const LevyModel& model,
                         double delta, const BindingBackend& backend) {
  if (!(delta > 0.0)) throw std::invalid_argument("moment_map: delta must be positive");
  if (backend.kind == BindingBackendKind::Analytic)
    return moment_map_analytic(theta, model, delta);
  return moment_map_mc(theta, model, delta, backend).mean;
}

MomentSummaryMc moment_map_mc_detail(const CogarchParams& theta, const LevyModel& model,
                                     double delta, const BindingBackend& backend) {
  if (backend.kind != BindingBackendKind::MonteCarlo)
    throw std::invalid_argument("moment_map_mc_detail: Monte Carlo backend required");
  return moment_map_mc(theta, model, delta, backend);
}

std::vector<double> acvf_from_moments(const MomentSummary& moments, int r) {
  if (r < 0) throw std::invalid_argument("acvf_from_moments: r must be >= 0");
  if (!(moments.gamma0 > 0.0) || !(moments.k > 0.0) || !(moments.rho > 0.0))
    throw std::domain_error("acvf_from_moments: outside the moment cone");
  // Spectral positivity of the geometric tail: with q = e^{-rho}, the
  // density is nonnegative iff k <= (1 + q) / (2q).
  const double q = std::exp(-moments.rho);
  if (!(2.0 * moments.k * q < 1.0 + q))
    throw std::domain_error("acvf_from_moments: outside the moment cone");
  std::vector<double> gamma(std::size_t(r) + 1);
  gamma[0] = moments.gamma0;
  for (int h = 1; h <= r; ++h)
    gamma[std::size_t(h)] = moments.gamma0 * moments.k * std::exp(-moments.rho * h);
  return gamma;
}

std::pair<double, double> recover_k_rho(double gamma0, double gamma1, double gamma2) {
  if (!(gamma0 > 0.0) || !(gamma1 > 0.0) || !(gamma2 > 0.0) || !(gamma1 > gamma2))
    throw std::domain_error("recover_k_rho: outside the moment cone");
  return {gamma1 * gamma1 / (gamma0 * gamma2), std::log(gamma1 / gamma2)};
}

AuxParams binding(const CogarchParams& theta, const LevyModel& model, double delta,
                  int r, const BindingBackend& backend) {
  if (r < 2) throw std::invalid_argument("binding: auxiliary order must be >= 2");
  const MomentSummary ms = moment_map(theta, model, delta, backend);
  const std::vector<double> gamma = acvf_from_moments(ms, r);
  AuxParams out;
  out.mu = ms.mu;
  out.gamma0 = ms.gamma0;
  out.a = yule_walker(gamma, r);
  return out;
}

Eigen::VectorXd stack_aux(const AuxParams& aux) {
  Eigen::VectorXd v(aux.r() + 2);
  v(0) = aux.mu;
  for (int j = 0; j < aux.r(); ++j) v(1 + j) = aux.a[std::size_t(j)];
  v(aux.r() + 1) = aux.gamma0;
  return v;
}

BindingJacobian gradient_binding(const CogarchParams& theta, const LevyModel& model,
                                 double delta, int r, const BindingBackend& backend) {
  if (r < 2) throw std::invalid_argument("gradient_binding: auxiliary order must be >= 2");
  const int dim = r + 2;
  BindingJacobian out;
  out.jac.resize(dim, 3);
  double base[3] = {theta.beta, theta.eta, theta.phi};
  for (int i = 0; i < 3; ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(base[i]));
    CogarchParams up = theta, dn = theta;
    double* up_i = i == 0 ? &up.beta : (i == 1 ? &up.eta : &up.phi);
    double* dn_i = i == 0 ? &dn.beta : (i == 1 ? &dn.eta : &dn.phi);
    *up_i += h;
    *dn_i -= h;
    const Eigen::VectorXd f_up = stack_aux(binding(up, model, delta, r, backend));
    const Eigen::VectorXd f_dn = stack_aux(binding(dn, model, delta, r, backend));
    out.jac.col(i) = (f_up - f_dn) / (2.0 * h);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.jac);
  const double tol = svd.singularValues()(0) * 1e-9;
  out.rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++out.rank;
  if (out.rank < 3)
    std::cerr << "gradient_binding: warning: Jacobian rank " << out.rank
              << " < 3 (local identification may fail)\n";
  return out;
}

}  // namespace cogarch
