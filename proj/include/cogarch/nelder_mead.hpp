#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace cogarch {

struct NmOptions {
  double ftol = 1e-8;
  int max_evals = 2000;
  double init_step_rel = 0.10;
  double init_step_min = 1e-4;
};

struct NmResult {
  Eigen::VectorXd x;
  double fx = 0.0;
  int evals = 0;
  bool converged = false;
};

// Nelder-Mead with box projection: every candidate is clamped into [lo, hi]
// before evaluation. Deterministic for a fixed objective.
inline NmResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                            Eigen::VectorXd x0, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi, const NmOptions& opt = {}) {
  const int d = int(x0.size());
  auto clamp = [&](Eigen::VectorXd v) {
    for (int i = 0; i < d; ++i) v(i) = std::min(hi(i), std::max(lo(i), v(i)));
    return v;
  };
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& v) {
    ++evals;
    return f(v);
  };

  std::vector<Eigen::VectorXd> xs;
  std::vector<double> fs;
  x0 = clamp(std::move(x0));
  xs.push_back(x0);
  fs.push_back(eval(x0));
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd v = x0;
    double step = std::max(opt.init_step_rel * std::abs(v(i)), opt.init_step_min);
    if (v(i) + step > hi(i)) step = -step;
    v(i) += step;
    v = clamp(std::move(v));
    xs.push_back(v);
    fs.push_back(eval(v));
  }

  auto order = [&]() {
    std::vector<int> idx(xs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = int(i);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    std::vector<Eigen::VectorXd> nx(xs.size());
    std::vector<double> nf(xs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      nx[i] = xs[std::size_t(idx[i])];
      nf[i] = fs[std::size_t(idx[i])];
    }
    xs.swap(nx);
    fs.swap(nf);
  };

  NmResult res;
  while (evals < opt.max_evals) {
    order();
    if (std::abs(fs.back() - fs.front()) <= opt.ftol * (std::abs(fs.front()) + opt.ftol)) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) centroid += xs[std::size_t(i)];
    centroid /= double(d);

    const Eigen::VectorXd refl = clamp(centroid + (centroid - xs.back()));
    const double f_refl = eval(refl);
    if (f_refl < fs.front()) {
      const Eigen::VectorXd exp_pt = clamp(centroid + 2.0 * (centroid - xs.back()));
      const double f_exp = eval(exp_pt);
      if (f_exp < f_refl) {
        xs.back() = exp_pt;
        fs.back() = f_exp;
      } else {
        xs.back() = refl;
        fs.back() = f_refl;
      }
      continue;
    }
    if (f_refl < fs[xs.size() - 2]) {
      xs.back() = refl;
      fs.back() = f_refl;
      continue;
    }
    const Eigen::VectorXd contr = clamp(centroid + 0.5 * (xs.back() - centroid));
    const double f_contr = eval(contr);
    if (f_contr < fs.back()) {
      xs.back() = contr;
      fs.back() = f_contr;
      continue;
    }
    for (std::size_t i = 1; i < xs.size(); ++i) {
      xs[i] = clamp(xs.front() + 0.5 * (xs[i] - xs.front()));
      fs[i] = eval(xs[i]);
    }
  }
  order();
  res.x = xs.front();
  res.fx = fs.front();
  res.evals = evals;
  return res;
}

}  // namespace cogarch
