#include "cogarch/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "cogarch/nelder_mead.hpp"

namespace cogarch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_domain(const DomainBox& d) {
  if (!(d.lo.beta > 0.0) || !(d.lo.eta > 0.0) || !(d.lo.phi > 0.0))
    throw std::invalid_argument("domain: lower bounds must be positive");
  if (!(d.hi.beta > d.lo.beta) || !(d.hi.eta > d.lo.eta) || !(d.hi.phi > d.lo.phi))
    throw std::invalid_argument("domain: upper bounds must exceed lower bounds");
}

Eigen::VectorXd to_vec(const CogarchParams& t) {
  Eigen::VectorXd v(3);
  v << t.beta, t.eta, t.phi;
  return v;
}

CogarchParams from_vec(const Eigen::VectorXd& v) { return {v(0), v(1), v(2)}; }

bool second_moments_exist(const LevyModel& model, const CogarchParams& theta) {
  return psi(model, theta, 2.0) < 0.0;
}

bool fourth_moments_exist(const LevyModel& model, const CogarchParams& theta) {
  return psi(model, theta, 4.0) < 0.0;
}

struct NmRun {
  NmResult result;
  int restarts = 0;
};

// Minimize with one restart from a slightly perturbed optimum.
NmRun minimize_with_restart(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x0, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi) {
  NmRun run;
  run.result = nelder_mead(f, x0, lo, hi);
  Eigen::VectorXd again = run.result.x * 1.05;
  NmResult second = nelder_mead(f, again, lo, hi);
  run.restarts = 1;
  if (second.fx < run.result.fx) {
    second.evals += run.result.evals;
    run.result = second;
  } else {
    run.result.evals += second.evals;
  }
  return run;
}

}  // namespace

WeightMatrix WeightMatrix::dense(Eigen::MatrixXd w) {
  if (w.rows() != w.cols()) throw std::invalid_argument("weight matrix must be square");
  const double scale = w.cwiseAbs().maxCoeff();
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale))
    throw std::invalid_argument("weight matrix must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(w);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("weight matrix must be positive definite");
  WeightMatrix out;
  out.m = std::move(w);
  return out;
}

double WeightMatrix::quad(const Eigen::VectorXd& v) const {
  if (is_identity()) return v.squaredNorm();
  if (m.rows() != v.size()) throw std::invalid_argument("weight matrix dimension mismatch");
  return v.dot(m * v);
}

MomentSummary mm_fit_summary(const std::vector<double>& w, int r, double delta) {
  if (r < 2) throw std::invalid_argument("mm_fit_summary: need r >= 2");
  const AcvfEstimate acvf = sample_acvf(w, r);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (int h = 1; h <= r; ++h) {
    const double g = acvf.gamma[std::size_t(h)];
    if (!(g > 0.0)) continue;
    const double x = double(h), y = std::log(g);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw std::domain_error("mm_fit_summary: moment shape violated");
  const double det = double(m) * sxx - sx * sx;
  const double slope = (double(m) * sxy - sx * sy) / det;
  const double intercept = (sy * sxx - sx * sxy) / det;

  MomentSummary out;
  out.delta = delta;
  out.mu = acvf.mean;
  out.gamma0 = acvf.gamma[0];
  out.rho = -slope;
  out.k = std::exp(intercept) / out.gamma0;
  if (!(out.rho > 0.0) || !(out.k > 0.0) || !(out.gamma0 > 0.0) || !(out.mu > 0.0))
    throw std::domain_error("mm_fit_summary: moment shape violated");
  return out;
}

EstimationResult mm_from_summary(const MomentSummary& target, const LevyModel& model,
                                 const DomainBox& domain) {
  check_domain(domain);
  const double delta = target.delta;
  auto objective = [&](const Eigen::VectorXd& v) {
    const CogarchParams th = from_vec(v);
    if (!second_moments_exist(model, th)) return kInf;
    const MomentSummary ms = moment_map(th, model, delta, BindingBackend::analytic());
    const double d0 = (target.mu - ms.mu) / target.mu;
    const double d1 = (target.gamma0 - ms.gamma0) / target.gamma0;
    const double d2 = (target.k - ms.k) / target.k;
    const double d3 = (target.rho - ms.rho) / target.rho;
    return d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3;
  };

  // Start heuristic: rho pins psi(1), mu then pins beta; phi is scanned with
  // eta tied through psi(1) = -(eta - phi m2).
  const double m2 = levy_moment(model, 2);
  const double lam = std::max(target.rho / delta, 1e-8);
  const double beta0 =
      std::min(std::max(target.mu * lam / delta, domain.lo.beta), domain.hi.beta);
  Eigen::VectorXd best_start(3);
  double best_f = kInf;
  const int scan = 128;
  for (int i = 0; i < scan; ++i) {
    const double phi = domain.lo.phi +
                       (domain.hi.phi - domain.lo.phi) * (double(i) + 0.5) / double(scan);
    const double eta =
        std::min(std::max(lam + phi * m2, domain.lo.eta), domain.hi.eta);
    Eigen::VectorXd v(3);
    v << beta0, eta, phi;
    const double f = objective(v);
    if (f < best_f) {
      best_f = f;
      best_start = v;
    }
  }
  if (!std::isfinite(best_f))
    throw std::domain_error("mm_from_summary: no admissible start in the domain");

  const NmRun run = minimize_with_restart(objective, best_start, to_vec(domain.lo),
                                          to_vec(domain.hi));
  EstimationResult out;
  out.theta_hat = from_vec(run.result.x);
  out.method = "mm";
  out.objective = run.result.fx;
  out.feasible = fourth_moments_exist(model, out.theta_hat);
  out.diagnostics["evals"] = double(run.result.evals);
  out.diagnostics["converged"] = run.result.converged ? 1.0 : 0.0;
  return out;
}

EstimationResult mm_estimate(const ReturnsSeries& returns, const LevyModel& model,
                             int r, const DomainBox& domain) {
  const std::vector<double> w = squared(returns.values);
  const MomentSummary target = mm_fit_summary(w, r, returns.delta);
  EstimationResult out = mm_from_summary(target, model, domain);
  out.diagnostics["mu_hat"] = target.mu;
  out.diagnostics["gamma0_hat"] = target.gamma0;
  out.diagnostics["k_hat"] = target.k;
  out.diagnostics["rho_hat"] = target.rho;
  return out;
}

EstimationResult iie_star(const AuxParams& data_aux, const LevyModel& model,
                          double delta, const DomainBox& domain,
                          const CogarchParams& start, const WeightMatrix& omega) {
  check_domain(domain);
  const int r = data_aux.r();
  if (r < 2) throw std::invalid_argument("iie_star: auxiliary order must be >= 2");
  const Eigen::VectorXd target = stack_aux(data_aux);
  if (!omega.is_identity() && omega.m.rows() != target.size())
    throw std::invalid_argument("iie_star: weight matrix dimension mismatch");

  const BindingBackend backend = BindingBackend::analytic();
  auto objective = [&](const Eigen::VectorXd& v) {
    const CogarchParams th = from_vec(v);
    if (!second_moments_exist(model, th)) return kInf;
    const Eigen::VectorXd pi = stack_aux(binding(th, model, delta, r, backend));
    return omega.quad(target - pi);
  };

  const NmRun run = minimize_with_restart(objective, to_vec(start), to_vec(domain.lo),
                                          to_vec(domain.hi));
  EstimationResult out;
  out.theta_hat = from_vec(run.result.x);
  out.method = "iie-star";
  out.objective = run.result.fx;
  out.feasible = fourth_moments_exist(model, out.theta_hat);
  out.diagnostics["evals"] = double(run.result.evals);
  out.diagnostics["converged"] = run.result.converged ? 1.0 : 0.0;
  return out;
}

EstimationResult iie_sim(const AuxParams& data_aux, const LevyModel& model,
                         double delta, const ParameterGrid& grid, const IIEConfig& cfg,
                         const WeightMatrix& omega) {
  const int r = data_aux.r();
  if (r < 2) throw std::invalid_argument("iie_sim: auxiliary order must be >= 2");
  if (cfg.n_sim <= 2 * std::size_t(r))
    throw std::invalid_argument("iie_sim: need n_sim > 2r");
  if (cfg.K < 1) throw std::invalid_argument("iie_sim: K must be >= 1");
  if (grid.beta.empty() || grid.eta_phi.empty())
    throw std::invalid_argument("iie_sim: empty grid");
  const Eigen::VectorXd target = stack_aux(data_aux);
  if (!omega.is_identity() && omega.m.rows() != target.size())
    throw std::invalid_argument("iie_sim: weight matrix dimension mismatch");

  // One family of driver draws shared by every candidate theta.
  const double d_in = delta / cfg.substeps;
  const std::size_t steps = (std::size_t(cfg.burn_in) + cfg.n_sim) * std::size_t(cfg.substeps);
  std::vector<std::vector<LevyIncrement>> draws(std::size_t(cfg.K));
  for (int k = 0; k < cfg.K; ++k) {
    RngStream stream(cfg.sim_seed, cfg.replication, StreamRole::SimPath, std::uint16_t(k));
    draws[std::size_t(k)] = sample_increments_split(model, d_in, steps, stream);
  }

  std::vector<double> returns_buf(cfg.n_sim);
  const double m2 = levy_moment(model, 2);

  double best_obj = kInf;
  std::tuple<double, double, double> best_theta{kInf, kInf, kInf};
  std::size_t evaluations = 0, skipped = 0;

  for (const auto& [eta, phi] : grid.eta_phi) {
    const CogarchParams base{1.0, eta, phi};
    const double lam = eta - phi * m2;  // -psi(1), positive on the filtered grid
    const double start = 1.0 / lam;
    double mu_bar = 0.0, g0_bar = 0.0;
    Eigen::VectorXd a_bar = Eigen::VectorXd::Zero(r);
    bool ok = true;
    for (int k = 0; k < cfg.K && ok; ++k) {
      simulate_from_increments(base, delta, cfg.substeps, std::size_t(cfg.burn_in),
                               cfg.n_sim, draws[std::size_t(k)].data(), start,
                               returns_buf.data());
      try {
        const AuxParams aux =
            aux_estimate(squared(returns_buf), r, cfg.aux_method);
        mu_bar += aux.mu;
        g0_bar += aux.gamma0;
        for (int j = 0; j < r; ++j) a_bar(j) += aux.a[std::size_t(j)];
      } catch (const std::domain_error&) {
        ok = false;
      }
    }
    if (!ok) {
      ++skipped;
      continue;
    }
    mu_bar /= double(cfg.K);
    g0_bar /= double(cfg.K);
    a_bar /= double(cfg.K);

    Eigen::VectorXd candidate(r + 2);
    candidate.segment(1, r) = a_bar;
    for (double beta : grid.beta) {
      candidate(0) = beta * mu_bar;
      candidate(r + 1) = beta * beta * g0_bar;
      const double obj = omega.quad(target - candidate);
      ++evaluations;
      const std::tuple<double, double, double> th{beta, eta, phi};
      if (obj < best_obj || (obj == best_obj && th < best_theta)) {
        best_obj = obj;
        best_theta = th;
      }
    }
  }
  if (!std::isfinite(best_obj))
    throw std::domain_error("iie_sim: every grid point failed the auxiliary fit");

  EstimationResult out;
  out.theta_hat = {std::get<0>(best_theta), std::get<1>(best_theta),
                   std::get<2>(best_theta)};
  out.method = "iie-sim";
  out.objective = best_obj;
  out.feasible = fourth_moments_exist(model, out.theta_hat);
  out.diagnostics["evaluations"] = double(evaluations);
  out.diagnostics["skipped_points"] = double(skipped);
  out.diagnostics["grid_points"] = double(grid.points());
  return out;
}

Eigen::MatrixXd asymptotic_cov(const Eigen::MatrixXd& binding_jac,
                               const WeightMatrix& omega, const Eigen::MatrixXd& sigma,
                               long K) {
  const auto m = binding_jac.rows();
  const auto q = binding_jac.cols();
  if (sigma.rows() != m || sigma.cols() != m)
    throw std::invalid_argument("asymptotic_cov: sigma dimension mismatch");
  if (K < 1) throw std::invalid_argument("asymptotic_cov: K must be >= 1");

  Eigen::MatrixXd gw;  // G' Omega
  if (omega.is_identity()) {
    gw = binding_jac.transpose();
  } else {
    if (omega.m.rows() != m)
      throw std::invalid_argument("asymptotic_cov: weight matrix dimension mismatch");
    gw = binding_jac.transpose() * omega.m;
  }
  const Eigen::MatrixXd j = gw * binding_jac;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(q - 1) <= sv(0) * 1e-12)
    throw std::domain_error("asymptotic_cov: singular weighted Jacobian");

  const double factor = 1.0 + 1.0 / double(K);
  const Eigen::MatrixXd inner = gw * (factor * sigma) * gw.transpose();
  const Eigen::MatrixXd j_inv = svd.solve(Eigen::MatrixXd::Identity(q, q));
  Eigen::MatrixXd xi = j_inv * inner * j_inv.transpose();
  return 0.5 * (xi + xi.transpose());
}

}  // namespace cogarch
