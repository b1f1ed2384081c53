#include "cogarch/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "cogarch/parallel.hpp"
#include "json.hpp"

namespace cogarch {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<double> axis(double lo, double hi, double d) {
  if (!(d > 0.0)) throw std::invalid_argument("build_grid: spacing must be positive");
  if (!(lo > 0.0) || !(hi >= lo))
    throw std::invalid_argument("build_grid: bounds must satisfy 0 < lo <= hi");
  const int count = int(std::floor((hi - lo) / d + 1e-9)) + 1;
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[std::size_t(i)] = lo + i * d;
  return out;
}

const char* aux_method_name(AuxMethod m) {
  return m == AuxMethod::YuleWalker ? "yule-walker" : "least-squares";
}

AuxMethod aux_method_from_name(const std::string& s) {
  if (s == "yule-walker") return AuxMethod::YuleWalker;
  if (s == "least-squares") return AuxMethod::LeastSquares;
  throw std::invalid_argument("config: unknown aux_method '" + s + "'");
}

// Inverse standard normal CDF (Acklam's rational approximation, ~1e-9).
double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > phigh) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5, s = q * q;
  return (((((a[0] * s + a[1]) * s + a[2]) * s + a[3]) * s + a[4]) * s + a[5]) * q /
         (((((b[0] * s + b[1]) * s + b[2]) * s + b[3]) * s + b[4]) * s + 1.0);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void validate(const StudyConfig& cfg) {
  if (cfg.reps < 1) throw std::invalid_argument("config: reps must be >= 1");
  if (cfg.r < 2) throw std::invalid_argument("config: r must be >= 2");
  if (cfg.n <= 2 * std::size_t(cfg.r))
    throw std::invalid_argument("config: need n > 2r");
  if (cfg.substeps < 1) throw std::invalid_argument("config: substeps must be >= 1");
  if (cfg.burn_in < 0) throw std::invalid_argument("config: burn_in must be >= 0");
  if (!(cfg.vg_c > 0.0)) throw std::invalid_argument("config: vg_c must be positive");
  if (!(cfg.delta > 0.0)) throw std::invalid_argument("config: delta must be positive");
  if (cfg.methods.empty()) throw std::invalid_argument("config: no methods configured");
  for (const auto& m : cfg.methods) {
    if (m != "mm" && m != "iie-star" && m != "iie-sim")
      throw std::invalid_argument("config: unknown method '" + m + "'");
    if (std::count(cfg.methods.begin(), cfg.methods.end(), m) != 1)
      throw std::invalid_argument("config: duplicate method '" + m + "'");
  }
  if (std::count(cfg.methods.begin(), cfg.methods.end(), "iie-sim") && cfg.K < 1)
    throw std::invalid_argument("config: K must be >= 1");
}

ordered_json grid_to_json(const GridSpec& g) {
  ordered_json j;
  j["beta_lo"] = g.beta_lo;
  j["beta_hi"] = g.beta_hi;
  j["eta_lo"] = g.eta_lo;
  j["eta_hi"] = g.eta_hi;
  j["phi_lo"] = g.phi_lo;
  j["phi_hi"] = g.phi_hi;
  j["d_beta"] = g.d_beta;
  j["d_eta"] = g.d_eta;
  j["d_phi"] = g.d_phi;
  return j;
}

ordered_json config_to_json(const StudyConfig& cfg) {
  ordered_json j;
  j["theta_true"] = {cfg.theta_true.beta, cfg.theta_true.eta, cfg.theta_true.phi};
  j["vg_c"] = cfg.vg_c;
  j["delta"] = cfg.delta;
  j["n"] = cfg.n;
  j["reps"] = cfg.reps;
  j["r"] = cfg.r;
  j["K"] = cfg.K;
  j["substeps"] = cfg.substeps;
  j["burn_in"] = cfg.burn_in;
  j["master_seed"] = cfg.master_seed;
  j["methods"] = cfg.methods;
  j["grid"] = grid_to_json(cfg.grid);
  j["domain"] = {{"lo", {cfg.domain.lo.beta, cfg.domain.lo.eta, cfg.domain.lo.phi}},
                 {"hi", {cfg.domain.hi.beta, cfg.domain.hi.eta, cfg.domain.hi.phi}}};
  j["aux_method"] = aux_method_name(cfg.aux_method);
  return j;
}

ordered_json stats_to_json(const ComponentStats& s) {
  ordered_json j;
  j["mean"] = s.mean;
  j["std"] = s.stdev;
  j["rb"] = s.rb;
  j["rmse"] = s.rmse;
  return j;
}

}  // namespace

ParameterGrid build_grid(const GridSpec& spec, const LevyModel& model) {
  ParameterGrid grid;
  grid.beta = axis(spec.beta_lo, spec.beta_hi, spec.d_beta);
  const std::vector<double> etas = axis(spec.eta_lo, spec.eta_hi, spec.d_eta);
  const std::vector<double> phis = axis(spec.phi_lo, spec.phi_hi, spec.d_phi);
  for (double eta : etas)
    for (double phi : phis)
      if (psi(model, {1.0, eta, phi}, 4.0) < 0.0) grid.eta_phi.emplace_back(eta, phi);
  if (grid.beta.empty() || grid.eta_phi.empty())
    throw std::domain_error("build_grid: empty grid");
  return grid;
}

ComponentStats compute_stats(const std::vector<double>& x, double truth) {
  if (x.empty()) throw std::invalid_argument("compute_stats: empty sample");
  if (truth == 0.0) throw std::invalid_argument("compute_stats: truth must be nonzero");
  const double m = double(x.size());
  ComponentStats s;
  for (double v : x) s.mean += v;
  s.mean /= m;
  double var = 0.0;
  for (double v : x) var += (v - s.mean) * (v - s.mean);
  var /= m;
  s.stdev = std::sqrt(var);
  const double bias = s.mean - truth;
  s.rb = bias / truth;
  s.rmse = std::sqrt(var + bias * bias);
  return s;
}

unsigned resolve_threads(int requested) {
  if (requested > 0) return unsigned(requested);
  if (const char* env = std::getenv("COGARCH_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return unsigned(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

StudyReport run_study(const StudyConfig& cfg) {
  validate(cfg);
  const LevyModel model = LevyModel::variance_gamma(cfg.vg_c);
  const bool want_mm = std::count(cfg.methods.begin(), cfg.methods.end(), "mm") > 0;
  const bool want_star = std::count(cfg.methods.begin(), cfg.methods.end(), "iie-star") > 0;
  const bool want_sim = std::count(cfg.methods.begin(), cfg.methods.end(), "iie-sim") > 0;
  ParameterGrid grid;
  if (want_sim) grid = build_grid(cfg.grid, model);

  StudyReport report;
  report.config = cfg;
  report.replications.resize(std::size_t(cfg.reps));

  auto one_rep = [&](std::size_t i) {
    ReplicationOutcome& out = report.replications[i];
    out.rep = std::uint32_t(i);
    out.included = true;

    SimConfig sim;
    sim.delta = cfg.delta;
    sim.n = cfg.n;
    sim.substeps = cfg.substeps;
    sim.burn_in = cfg.burn_in;
    sim.seed = cfg.master_seed;
    sim.replication = std::uint32_t(i);
    sim.role = StreamRole::Data;
    const ReturnsSeries data = simulate_returns(cfg.theta_true, model, sim);

    auto fail = [&](const std::string& method, const char* what) {
      out.included = false;
      if (out.reason.empty()) out.reason = method + ": " + what;
    };

    EstimationResult mm;
    bool have_mm = false;
    if (want_mm || want_star) {
      try {
        mm = mm_estimate(data, model, cfg.r, cfg.domain);
        have_mm = true;
      } catch (const std::domain_error& e) {
        fail("mm", e.what());
      }
    }

    AuxParams data_aux;
    bool have_aux = false;
    if (want_star || want_sim) {
      try {
        data_aux = aux_estimate(squared(data.values), cfg.r, cfg.aux_method);
        have_aux = true;
      } catch (const std::domain_error& e) {
        fail("aux", e.what());
      }
    }

    for (const auto& method : cfg.methods) {
      try {
        if (method == "mm") {
          if (!have_mm) continue;  // failure already recorded
          out.estimates.push_back(mm);
        } else if (method == "iie-star") {
          if (!have_mm || !have_aux) continue;
          out.estimates.push_back(
              iie_star(data_aux, model, cfg.delta, cfg.domain, mm.theta_hat));
        } else {
          if (!have_aux) continue;
          IIEConfig ic;
          ic.K = cfg.K;
          ic.n_sim = cfg.n;
          ic.substeps = cfg.substeps;
          ic.burn_in = cfg.burn_in;
          ic.sim_seed = cfg.master_seed;
          ic.replication = std::uint32_t(i);
          ic.aux_method = cfg.aux_method;
          out.estimates.push_back(iie_sim(data_aux, model, cfg.delta, grid, ic));
        }
        if (!out.estimates.back().feasible)
          fail(method, "fourth-moment condition failed at the estimate");
      } catch (const std::domain_error& e) {
        fail(method, e.what());
      }
    }
  };

  parallel_for(std::size_t(cfg.reps), resolve_threads(cfg.threads), one_rep);

  for (const auto& rep : report.replications)
    (rep.included ? report.reps_included : report.reps_excluded)++;
  if (report.reps_included == 0)
    throw std::domain_error("run_study: every replication was excluded");

  for (const auto& method : cfg.methods) {
    std::vector<double> b, e, p;
    for (const auto& rep : report.replications) {
      if (!rep.included) continue;
      for (const auto& est : rep.estimates) {
        if (est.method != method) continue;
        b.push_back(est.theta_hat.beta);
        e.push_back(est.theta_hat.eta);
        p.push_back(est.theta_hat.phi);
      }
    }
    MethodRow row;
    row.method = method;
    row.beta = compute_stats(b, cfg.theta_true.beta);
    row.eta = compute_stats(e, cfg.theta_true.eta);
    row.phi = compute_stats(p, cfg.theta_true.phi);
    report.rows.push_back(std::move(row));
  }
  report.qq_method = want_sim ? "iie-sim" : cfg.methods.front();
  return report;
}

std::string study_config_to_json(const StudyConfig& cfg) {
  return config_to_json(cfg).dump(2) + "\n";
}

StudyConfig study_config_from_json(const std::string& text) {
  StudyConfig cfg;
  try {
    const ordered_json j = ordered_json::parse(text);
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    for (const auto& [key, value] : j.items()) {
      if (key == "theta_true") {
        const auto v = value.get<std::vector<double>>();
        if (v.size() != 3) throw std::invalid_argument("config: theta_true needs 3 entries");
        cfg.theta_true = {v[0], v[1], v[2]};
      } else if (key == "vg_c") {
        cfg.vg_c = value.get<double>();
      } else if (key == "delta") {
        cfg.delta = value.get<double>();
      } else if (key == "n") {
        cfg.n = value.get<std::size_t>();
      } else if (key == "reps") {
        cfg.reps = value.get<int>();
      } else if (key == "r") {
        cfg.r = value.get<int>();
      } else if (key == "K") {
        cfg.K = value.get<int>();
      } else if (key == "substeps") {
        cfg.substeps = value.get<int>();
      } else if (key == "burn_in") {
        cfg.burn_in = value.get<int>();
      } else if (key == "master_seed") {
        cfg.master_seed = value.get<std::uint64_t>();
      } else if (key == "threads") {
        cfg.threads = value.get<int>();
      } else if (key == "methods") {
        cfg.methods = value.get<std::vector<std::string>>();
      } else if (key == "aux_method") {
        cfg.aux_method = aux_method_from_name(value.get<std::string>());
      } else if (key == "grid") {
        for (const auto& [gk, gv] : value.items()) {
          if (gk == "beta_lo") cfg.grid.beta_lo = gv.get<double>();
          else if (gk == "beta_hi") cfg.grid.beta_hi = gv.get<double>();
          else if (gk == "eta_lo") cfg.grid.eta_lo = gv.get<double>();
          else if (gk == "eta_hi") cfg.grid.eta_hi = gv.get<double>();
          else if (gk == "phi_lo") cfg.grid.phi_lo = gv.get<double>();
          else if (gk == "phi_hi") cfg.grid.phi_hi = gv.get<double>();
          else if (gk == "d_beta") cfg.grid.d_beta = gv.get<double>();
          else if (gk == "d_eta") cfg.grid.d_eta = gv.get<double>();
          else if (gk == "d_phi") cfg.grid.d_phi = gv.get<double>();
          else if (gk == "spacing") cfg.grid.spacing(gv.get<double>());
          else throw std::invalid_argument("config: unknown key 'grid." + gk + "'");
        }
      } else if (key == "domain") {
        for (const auto& [dk, dv] : value.items()) {
          const auto v = dv.get<std::vector<double>>();
          if (v.size() != 3)
            throw std::invalid_argument("config: domain bounds need 3 entries");
          if (dk == "lo") cfg.domain.lo = {v[0], v[1], v[2]};
          else if (dk == "hi") cfg.domain.hi = {v[0], v[1], v[2]};
          else throw std::invalid_argument("config: unknown key 'domain." + dk + "'");
        }
      } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return cfg;
}

std::string report_json(const StudyReport& report) {
  ordered_json j;
  j["config"] = config_to_json(report.config);
  j["included"] = report.reps_included;
  j["excluded"] = report.reps_excluded;
  j["methods"] = ordered_json::array();
  for (const auto& row : report.rows) {
    ordered_json m;
    m["method"] = row.method;
    m["beta"] = stats_to_json(row.beta);
    m["eta"] = stats_to_json(row.eta);
    m["phi"] = stats_to_json(row.phi);
    j["methods"].push_back(std::move(m));
  }
  j["replications"] = ordered_json::array();
  for (const auto& rep : report.replications) {
    ordered_json r;
    r["rep"] = rep.rep;
    r["included"] = rep.included;
    r["reason"] = rep.reason;
    r["estimates"] = ordered_json::array();
    for (const auto& est : rep.estimates) {
      ordered_json e;
      e["method"] = est.method;
      e["beta"] = est.theta_hat.beta;
      e["eta"] = est.theta_hat.eta;
      e["phi"] = est.theta_hat.phi;
      e["objective"] = est.objective;
      e["feasible"] = est.feasible;
      r["estimates"].push_back(std::move(e));
    }
    j["replications"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

void write_report(const StudyReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::ofstream(fs::path(dir) / "report.json") << report_json(report);

  std::ofstream csv(fs::path(dir) / "estimates.csv");
  csv << "rep,method,beta,eta,phi,objective,feasible\n";
  for (const auto& rep : report.replications)
    for (const auto& est : rep.estimates)
      csv << rep.rep << ',' << est.method << ',' << fmt(est.theta_hat.beta) << ','
          << fmt(est.theta_hat.eta) << ',' << fmt(est.theta_hat.phi) << ','
          << fmt(est.objective) << ',' << (est.feasible ? 1 : 0) << '\n';

  std::ofstream qq(fs::path(dir) / "qq.csv");
  qq << "component,theoretical_quantile,sample_quantile\n";
  const char* names[3] = {"beta", "eta", "phi"};
  for (int c = 0; c < 3; ++c) {
    std::vector<double> sample;
    for (const auto& rep : report.replications) {
      if (!rep.included) continue;
      for (const auto& est : rep.estimates) {
        if (est.method != report.qq_method) continue;
        sample.push_back(c == 0 ? est.theta_hat.beta
                                : c == 1 ? est.theta_hat.eta : est.theta_hat.phi);
      }
    }
    std::sort(sample.begin(), sample.end());
    const double m = double(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i)
      qq << names[c] << ',' << fmt(normal_quantile((double(i) + 0.5) / m)) << ','
         << fmt(sample[i]) << '\n';
  }
}

}  // namespace cogarch
