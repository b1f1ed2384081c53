#include "cogarch/aux_ar.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace cogarch {

namespace {

constexpr double kBoxEps = 1e-6;
constexpr double kCondLimit = 1e12;

}  // namespace

std::vector<double> squared(const std::vector<double>& returns) {
  std::vector<double> w(returns.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = returns[i] * returns[i];
  return w;
}

AcvfEstimate sample_acvf(const std::vector<double>& w, int max_lag) {
  const std::size_t n = w.size();
  if (max_lag < 0) throw std::invalid_argument("sample_acvf: max_lag must be >= 0");
  if (n == 0 || std::size_t(max_lag) >= n)
    throw std::invalid_argument("sample_acvf: need max_lag < n");
  AcvfEstimate out;
  out.n = n;
  double mean = 0.0;
  for (double v : w) mean += v;
  mean /= double(n);
  out.mean = mean;
  out.gamma.resize(std::size_t(max_lag) + 1);
  for (int h = 0; h <= max_lag; ++h) {
    double acc = 0.0;
    for (std::size_t i = 0; i + std::size_t(h) < n; ++i)
      acc += (w[i] - mean) * (w[i + std::size_t(h)] - mean);
    out.gamma[std::size_t(h)] = acc / double(n);
  }
  return out;
}

std::vector<double> yule_walker(const std::vector<double>& gamma, int r) {
  if (r < 1) throw std::invalid_argument("yule_walker: order must be >= 1");
  if (gamma.size() <= std::size_t(r))
    throw std::invalid_argument("yule_walker: need autocovariances up to lag r");
  const double g0 = gamma[0];
  if (!(g0 > 0.0)) throw std::domain_error("yule_walker: degenerate autocovariance");

  // Levinson-Durbin; v_k tracks the prediction error variance and
  // gamma(0)/v_k is a lower bound on the conditioning of the Toeplitz system.
  std::vector<double> a(std::size_t(r), 0.0), prev(std::size_t(r), 0.0);
  double v = g0;
  for (int k = 1; k <= r; ++k) {
    double acc = gamma[std::size_t(k)];
    for (int j = 1; j < k; ++j) acc -= prev[std::size_t(j - 1)] * gamma[std::size_t(k - j)];
    if (!(v > 0.0) || g0 / v > kCondLimit)
      throw std::domain_error("yule_walker: degenerate autocovariance");
    const double kappa = acc / v;
    a[std::size_t(k - 1)] = kappa;
    for (int j = 1; j < k; ++j)
      a[std::size_t(j - 1)] = prev[std::size_t(j - 1)] - kappa * prev[std::size_t(k - j - 1)];
    v *= (1.0 - kappa * kappa);
    prev = a;
  }
  if (!(v > 0.0) || g0 / v > kCondLimit)
    throw std::domain_error("yule_walker: degenerate autocovariance");
  return a;
}

bool enforce_ar_margin(std::vector<double>& a, double min_root) {
  const int r = int(a.size());
  if (r == 0) return false;
  double abs_sum = 0.0;
  for (double c : a) abs_sum += std::abs(c);
  if (abs_sum < 1.0 / min_root) return false;  // roots provably outside the margin

  // Companion matrix of z^r - a_1 z^{r-1} - ... - a_r; its eigenvalues are the
  // reciprocals of the roots of 1 - a_1 z - ... - a_r z^r.
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(r, r);
  for (int j = 0; j < r; ++j) comp(0, j) = a[std::size_t(j)];
  for (int i = 1; i < r; ++i) comp(i, i - 1) = 1.0;
  const Eigen::VectorXcd ev = comp.eigenvalues();
  double max_mod = 0.0;
  for (int i = 0; i < r; ++i) max_mod = std::max(max_mod, std::abs(ev(i)));
  if (max_mod <= 1.0 / min_root) return false;

  const double s = 1.0 / (min_root * max_mod);
  double s_pow = 1.0;
  for (int j = 0; j < r; ++j) {
    s_pow *= s;
    a[std::size_t(j)] *= s_pow;
  }
  return true;
}

AuxParams aux_estimate(const std::vector<double>& w, int r, AuxMethod method) {
  if (r < 1) throw std::invalid_argument("aux_estimate: order must be >= 1");
  if (w.size() <= 2 * std::size_t(r))
    throw std::invalid_argument("aux_estimate: series too short for the requested order");

  AuxParams out;
  const AcvfEstimate acvf = sample_acvf(w, r);
  out.mu = acvf.mean;
  out.gamma0 = acvf.gamma[0];

  if (method == AuxMethod::YuleWalker) {
    out.a = yule_walker(acvf.gamma, r);
  } else {
    // Centered least squares: regress w~_{i+r} on (w~_{i+r-1}, ..., w~_i).
    const std::size_t n = w.size();
    std::vector<double> wc(n);
    for (std::size_t i = 0; i < n; ++i) wc[i] = w[i] - acvf.mean;
    Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(r, r);
    Eigen::VectorXd xty = Eigen::VectorXd::Zero(r);
    for (std::size_t i = 0; i + std::size_t(r) < n; ++i) {
      const double y = wc[i + std::size_t(r)];
      for (int j = 0; j < r; ++j) {
        const double xj = wc[i + std::size_t(r - 1 - j)];
        xty(j) += xj * y;
        for (int l = 0; l <= j; ++l) xtx(j, l) += xj * wc[i + std::size_t(r - 1 - l)];
      }
    }
    xtx = xtx.selfadjointView<Eigen::Lower>();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    const Eigen::VectorXd d = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || !(d.minCoeff() > 0.0) ||
        d.maxCoeff() / d.minCoeff() > kCondLimit)
      throw std::domain_error("aux_estimate: degenerate design matrix");
    const Eigen::VectorXd sol = ldlt.solve(xty);
    out.a.assign(sol.data(), sol.data() + r);
  }

  if (out.mu < kBoxEps) {
    out.mu = kBoxEps;
    out.clamped = true;
  }
  if (out.gamma0 < kBoxEps) {
    out.gamma0 = kBoxEps;
    out.clamped = true;
  }
  if (enforce_ar_margin(out.a)) out.clamped = true;
  return out;
}

SigmaEstimate estimate_sigma_star(const std::vector<double>& w, const AuxParams& aux,
                                  int lags) {
  const int r = aux.r();
  const std::size_t n = w.size();
  if (r < 1) throw std::invalid_argument("estimate_sigma_star: auxiliary order must be >= 1");
  if (lags < 0) lags = int(std::ceil(10.0 * std::log10(double(n))));
  if (n <= std::size_t(r) + std::size_t(lags) + 1)
    throw std::invalid_argument("estimate_sigma_star: series too short for the lag window");

  const int dim = r + 2;
  const std::size_t m = n - std::size_t(r);
  const double mu = aux.mu;

  // Score-style vectors, all mean zero at the fitted parameters: centered
  // level, AR residual times lagged centered values, centered second moment.
  Eigen::MatrixXd c(m, dim);
  for (std::size_t k = 0; k < m; ++k) {
    const double cw = w[k] - mu;
    double resid = w[k + std::size_t(r)] - mu;
    for (int j = 1; j <= r; ++j) resid -= aux.a[std::size_t(j - 1)] * (w[k + std::size_t(r - j)] - mu);
    c(k, 0) = cw;
    for (int j = 0; j < r; ++j) c(k, 1 + j) = resid * (w[k + std::size_t(r - 1 - j)] - mu);
    c(k, dim - 1) = cw * cw - aux.gamma0;
  }

  Eigen::MatrixXd star = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i <= lags; ++i) {
    const std::size_t cnt = m - std::size_t(i);
    Eigen::MatrixXd mi =
        (c.topRows(cnt).transpose() * c.bottomRows(cnt)) / double(cnt);
    star += i == 0 ? mi : Eigen::MatrixXd(mi + mi.transpose());
  }
  star = 0.5 * (star + star.transpose()).eval();

  // Sandwich with blockdiag(1, Gamma^{-1}, 1); Gamma is the lag 0..r-1
  // Toeplitz matrix of the sample autocovariances.
  const AcvfEstimate acvf = sample_acvf(w, r);
  Eigen::MatrixXd gamma_mat(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) gamma_mat(i, j) = acvf.gamma[std::size_t(std::abs(i - j))];
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gamma_mat);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw std::domain_error("estimate_sigma_star: degenerate autocovariance");

  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(dim, dim);
  b.block(1, 1, r, r) = ldlt.solve(Eigen::MatrixXd::Identity(r, r));

  SigmaEstimate out;
  out.sigma_star = star;
  out.sigma = b * star * b;
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
  out.lags = lags;
  return out;
}

}  // namespace cogarch
