#include "cogarch/levy.hpp"

#include <cmath>
#include <stdexcept>

#include "cogarch/quadrature.hpp"

namespace cogarch {

LevyModel LevyModel::variance_gamma(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("variance_gamma: c must be positive");
  LevyModel m;
  m.kind = LevyKind::VarianceGamma;
  m.vg_c = c;
  return m;
}

LevyModel LevyModel::compound_poisson(double rate, double jump, double brownian_var) {
  if (!(rate > 0.0)) throw std::invalid_argument("compound_poisson: rate must be positive");
  if (!(jump > 0.0)) throw std::invalid_argument("compound_poisson: jump size must be positive");
  if (brownian_var < 0.0)
    throw std::invalid_argument("compound_poisson: brownian variance must be nonnegative");
  LevyModel m;
  m.kind = LevyKind::CompoundPoisson;
  m.cp_rate = rate;
  m.cp_jump = jump;
  m.brownian_var = brownian_var;
  return m;
}

LevyModel LevyModel::pure_brownian(double var) {
  if (var < 0.0) throw std::invalid_argument("pure_brownian: variance must be nonnegative");
  LevyModel m;
  m.kind = LevyKind::PureBrownian;
  m.brownian_var = var;
  return m;
}

double LevyModel::jump_variance() const {
  switch (kind) {
    case LevyKind::VarianceGamma:
      return 1.0;  // 2C * Gamma(2) / (2C) for every C
    case LevyKind::CompoundPoisson:
      return cp_rate * cp_jump * cp_jump;
    case LevyKind::PureBrownian:
      return 0.0;
  }
  return 0.0;
}

double LevyModel::total_variance() const { return brownian_var + jump_variance(); }

bool LevyModel::unit_variance(double tol) const {
  return std::abs(total_variance() - 1.0) <= tol;
}

double levy_moment(const LevyModel& model, int k) {
  if (k <= 0) throw std::invalid_argument("levy_moment: order must be positive");
  if (k % 2 == 1) return 0.0;
  switch (model.kind) {
    case LevyKind::VarianceGamma: {
      // m_{2j} = (2j-1)! / (2C)^{j-1}
      double v = 1.0;
      for (int i = 2; i < k; ++i) v *= double(i);
      v /= std::pow(2.0 * model.vg_c, 0.5 * k - 1.0);
      if (!std::isfinite(v)) throw std::domain_error("levy_moment: moment undefined");
      return v;
    }
    case LevyKind::CompoundPoisson: {
      const double v = model.cp_rate * std::pow(model.cp_jump, double(k));
      if (!std::isfinite(v)) throw std::domain_error("levy_moment: moment undefined");
      return v;
    }
    case LevyKind::PureBrownian:
      return 0.0;
  }
  return 0.0;
}

double psi(const LevyModel& model, const CogarchParams& theta, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("psi: p must be positive");
  if (!(theta.eta > 0.0) || !(theta.phi > 0.0))
    throw std::invalid_argument("psi: eta and phi must be positive");
  const double pr = std::round(p);
  if (std::abs(p - pr) < 1e-12) {
    const int ip = int(pr);
    double acc = -p * theta.eta;
    double binom = 1.0;
    double phi_pow = 1.0;
    for (int j = 1; j <= ip; ++j) {
      binom = binom * double(ip - j + 1) / double(j);
      phi_pow *= theta.phi;
      acc += binom * phi_pow * levy_moment(model, 2 * j);
    }
    return acc;
  }
  if (model.kind != LevyKind::VarianceGamma)
    throw std::invalid_argument("psi: fractional order unsupported for this model");
  const double c = model.vg_c;
  const double a = std::sqrt(2.0 * c);
  const double phi = theta.phi;
  auto f = [c, a, phi, p](double x) {
    return (std::pow(1.0 + phi * x * x, p) - 1.0) * (2.0 * c / x) * std::exp(-a * x);
  };
  const double jump_part = integrate_half_line(f, 0.0, 4.0 / a, 1e-10);
  return -p * theta.eta + jump_part;
}

std::vector<LevyIncrement> sample_increments_split(const LevyModel& model, double delta,
                                                   std::size_t count, RngStream& stream,
                                                   std::uint64_t base_cell) {
  if (!(delta > 0.0)) throw std::invalid_argument("sample_increments: delta must be positive");
  std::vector<LevyIncrement> out(count);
  const double bm_sd =
      model.brownian_var > 0.0 ? std::sqrt(model.brownian_var * delta) : 0.0;
  switch (model.kind) {
    case LevyKind::VarianceGamma: {
      const double shape = model.vg_c * delta;
      const double scale = 1.0 / std::sqrt(2.0 * model.vg_c);
      for (std::size_t i = 0; i < count; ++i) {
        stream.seek_cell(base_cell + i);
        const double j = stream.gamma(shape, scale) - stream.gamma(shape, scale);
        const double b = bm_sd > 0.0 ? bm_sd * stream.normal() : 0.0;
        out[i] = {j + b, j};
      }
      break;
    }
    case LevyKind::CompoundPoisson: {
      const double mean = model.cp_rate * delta;
      for (std::size_t i = 0; i < count; ++i) {
        stream.seek_cell(base_cell + i);
        const unsigned m = stream.poisson(mean);
        double j = 0.0;
        for (unsigned u = 0; u < m; ++u)
          j += stream.uniform() <= 0.5 ? model.cp_jump : -model.cp_jump;
        const double b = bm_sd > 0.0 ? bm_sd * stream.normal() : 0.0;
        out[i] = {j + b, j};
      }
      break;
    }
    case LevyKind::PureBrownian: {
      for (std::size_t i = 0; i < count; ++i) {
        stream.seek_cell(base_cell + i);
        const double b = bm_sd > 0.0 ? bm_sd * stream.normal() : 0.0;
        out[i] = {b, 0.0};
      }
      break;
    }
  }
  return out;
}

std::vector<double> sample_increments(const LevyModel& model, double delta,
                                      std::size_t count, RngStream& stream) {
  const std::vector<LevyIncrement> inc = sample_increments_split(model, delta, count, stream);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = inc[i].total;
  return out;
}

}  // namespace cogarch
