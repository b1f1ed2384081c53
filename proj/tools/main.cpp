#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cogarch/study.hpp"
#include "json.hpp"

namespace {

using nlohmann::ordered_json;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> read_returns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(std::stod(line));
    } catch (const std::exception&) {
      if (out.empty()) continue;  // tolerate a header line
      throw std::invalid_argument("non-numeric line in " + path + ": " + line);
    }
  }
  if (out.empty()) throw std::invalid_argument("no data in " + path);
  return out;
}

cogarch::GridSpec grid_from_json(const std::string& text) {
  cogarch::GridSpec g;
  try {
    const ordered_json j = ordered_json::parse(text);
    for (const auto& [key, value] : j.items()) {
      if (key == "beta_lo") g.beta_lo = value.get<double>();
      else if (key == "beta_hi") g.beta_hi = value.get<double>();
      else if (key == "eta_lo") g.eta_lo = value.get<double>();
      else if (key == "eta_hi") g.eta_hi = value.get<double>();
      else if (key == "phi_lo") g.phi_lo = value.get<double>();
      else if (key == "phi_hi") g.phi_hi = value.get<double>();
      else if (key == "d_beta") g.d_beta = value.get<double>();
      else if (key == "d_eta") g.d_eta = value.get<double>();
      else if (key == "d_phi") g.d_phi = value.get<double>();
      else if (key == "spacing") g.spacing(value.get<double>());
      else throw std::invalid_argument("grid file: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("grid file: ") + e.what());
  }
  return g;
}

ordered_json result_json(const cogarch::EstimationResult& res) {
  ordered_json j;
  j["method"] = res.method;
  j["theta_hat"] = {res.theta_hat.beta, res.theta_hat.eta, res.theta_hat.phi};
  j["objective"] = res.objective;
  j["feasible"] = res.feasible;
  j["diagnostics"] = ordered_json::object();
  for (const auto& [k, v] : res.diagnostics) j["diagnostics"][k] = v;
  return j;
}

int run(int argc, char** argv) {
  CLI::App app{"COGARCH(1,1) simulation and estimation toolkit"};
  app.require_subcommand(1);

  cogarch::CogarchParams theta{0.04, 0.053, 0.038};
  double vg_c = 1.0, delta = 1.0;
  std::uint64_t seed = 1;
  std::uint32_t rep = 0;
  int substeps = 20, burn_in = 500;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--beta", theta.beta, "volatility level parameter");
    sub->add_option("--eta", theta.eta, "volatility decay parameter");
    sub->add_option("--phi", theta.phi, "jump feedback parameter");
    sub->add_option("--vg-c", vg_c, "variance gamma jump intensity");
    sub->add_option("--delta", delta, "observation spacing");
  };
  auto add_sim = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "master RNG seed");
    sub->add_option("--rep", rep, "replication index of the RNG stream");
    sub->add_option("--substeps", substeps, "Euler substeps per observation");
    sub->add_option("--burn-in", burn_in, "warm-up observations discarded");
  };

  auto* sim = app.add_subcommand("simulate", "simulate a COGARCH return series");
  std::size_t sim_n = 10000;
  std::string sim_out = "-";
  add_model(sim);
  add_sim(sim);
  sim->add_option("--n", sim_n, "number of returns");
  sim->add_option("--output", sim_out, "output file, '-' for stdout");

  auto* est = app.add_subcommand("estimate", "estimate COGARCH parameters from returns");
  std::string est_method = "mm", est_input, est_grid_file, est_omega = "identity";
  int est_r = 70, est_k = 20;
  std::size_t est_n_sim = 0;
  std::vector<double> dom_lo{0.002, 0.002, 0.002}, dom_hi{0.120, 0.159, 0.114};
  add_model(est);
  add_sim(est);
  est->add_option("--method", est_method, "mm, iie-star or iie-sim")
      ->check(CLI::IsMember({"mm", "iie-star", "iie-sim"}));
  est->add_option("--input", est_input, "returns file, one value per line")->required();
  est->add_option("--r", est_r, "auxiliary autoregression order");
  est->add_option("--K", est_k, "simulated paths per grid point");
  est->add_option("--n-sim", est_n_sim, "simulated sample length (default: observed n)");
  est->add_option("--omega", est_omega, "weight matrix")->check(CLI::IsMember({"identity"}));
  est->add_option("--grid", est_grid_file, "grid spec JSON file (iie-sim)");
  est->add_option("--domain-lo", dom_lo, "search box lower corner (beta eta phi)")
      ->expected(3);
  est->add_option("--domain-hi", dom_hi, "search box upper corner (beta eta phi)")
      ->expected(3);

  auto* bnd = app.add_subcommand("binding", "auxiliary parameters implied by theta");
  std::string bnd_backend = "analytic";
  int bnd_r = 10, bnd_paths = 16;
  std::size_t bnd_n_sim = 200000;
  add_model(bnd);
  bnd->add_option("--r", bnd_r, "auxiliary autoregression order");
  bnd->add_option("--backend", bnd_backend, "analytic or mc")
      ->check(CLI::IsMember({"analytic", "mc"}));
  bnd->add_option("--paths", bnd_paths, "MC backend paths");
  bnd->add_option("--n-sim", bnd_n_sim, "MC backend returns per path");
  bnd->add_option("--seed", seed, "MC backend seed");

  auto* grd = app.add_subcommand("grid", "build the restricted parameter lattice");
  cogarch::GridSpec gspec{0.002, 0.120, 0.020, 0.100, 0.010, 0.070};
  bool grd_full = false;
  grd->add_option("--beta-lo", gspec.beta_lo);
  grd->add_option("--beta-hi", gspec.beta_hi);
  grd->add_option("--eta-lo", gspec.eta_lo);
  grd->add_option("--eta-hi", gspec.eta_hi);
  grd->add_option("--phi-lo", gspec.phi_lo);
  grd->add_option("--phi-hi", gspec.phi_hi);
  grd->add_option("--d-beta", gspec.d_beta);
  grd->add_option("--d-eta", gspec.d_eta);
  grd->add_option("--d-phi", gspec.d_phi);
  double grd_spacing = 0.0;
  grd->add_option("--spacing", grd_spacing, "set all three spacings at once");
  grd->add_option("--vg-c", vg_c, "variance gamma jump intensity");
  grd->add_flag("--full", grd_full, "list every (eta, phi) pair");

  auto* study = app.add_subcommand("study", "run the Monte Carlo replication study");
  std::string study_config_file, study_out = "study_out";
  int study_reps = -1, study_threads = -1;
  std::size_t study_n = 0;
  bool print_config = false;
  std::uint64_t study_seed = 0;
  bool study_seed_set = false;
  study->add_option("--config", study_config_file, "StudyConfig JSON file");
  study->add_option("--output", study_out, "output directory");
  study->add_option("--reps", study_reps, "override replication count");
  study->add_option("--n", study_n, "override sample length");
  study->add_option("--threads", study_threads, "override worker thread count");
  study->add_option("--seed", study_seed, "override master seed")
      ->each([&](const std::string&) { study_seed_set = true; });
  study->add_flag("--print-config", print_config, "print the effective config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const cogarch::LevyModel model = cogarch::LevyModel::variance_gamma(vg_c);

  if (*sim) {
    cogarch::SimConfig cfg;
    cfg.delta = delta;
    cfg.n = sim_n;
    cfg.substeps = substeps;
    cfg.burn_in = burn_in;
    cfg.seed = seed;
    cfg.replication = rep;
    const cogarch::ReturnsSeries series = cogarch::simulate_returns(theta, model, cfg);
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (sim_out != "-") {
      file.open(sim_out);
      if (!file) throw std::invalid_argument("cannot open file: " + sim_out);
      out = &file;
    }
    char buf[40];
    for (double v : series.values) {
      std::snprintf(buf, sizeof buf, "%.17g\n", v);
      *out << buf;
    }
    return 0;
  }

  if (*est) {
    cogarch::ReturnsSeries data;
    data.values = read_returns(est_input);
    data.delta = delta;
    const cogarch::DomainBox domain{{dom_lo[0], dom_lo[1], dom_lo[2]},
                                    {dom_hi[0], dom_hi[1], dom_hi[2]}};
    cogarch::EstimationResult res;
    if (est_method == "mm") {
      res = cogarch::mm_estimate(data, model, est_r, domain);
    } else if (est_method == "iie-star") {
      const cogarch::EstimationResult start = cogarch::mm_estimate(data, model, est_r, domain);
      const cogarch::AuxParams aux =
          cogarch::aux_estimate(cogarch::squared(data.values), est_r);
      res = cogarch::iie_star(aux, model, delta, domain, start.theta_hat);
    } else {
      cogarch::GridSpec gs{0.002, 0.120, 0.020, 0.100, 0.010, 0.070};
      if (!est_grid_file.empty()) gs = grid_from_json(slurp(est_grid_file));
      const cogarch::ParameterGrid grid = cogarch::build_grid(gs, model);
      const cogarch::AuxParams aux =
          cogarch::aux_estimate(cogarch::squared(data.values), est_r);
      cogarch::IIEConfig ic;
      ic.K = est_k;
      ic.n_sim = est_n_sim > 0 ? est_n_sim : data.values.size();
      ic.substeps = substeps;
      ic.burn_in = burn_in;
      ic.sim_seed = seed;
      ic.replication = rep;
      res = cogarch::iie_sim(aux, model, delta, grid, ic);
    }
    std::cout << result_json(res).dump(2) << "\n";
    return 0;
  }

  if (*bnd) {
    const cogarch::BindingBackend backend =
        bnd_backend == "analytic"
            ? cogarch::BindingBackend::analytic()
            : cogarch::BindingBackend::monte_carlo(bnd_paths, bnd_n_sim, seed);
    const cogarch::MomentSummary ms = cogarch::moment_map(theta, model, delta, backend);
    const cogarch::AuxParams pi = cogarch::binding(theta, model, delta, bnd_r, backend);
    ordered_json j;
    j["theta"] = {theta.beta, theta.eta, theta.phi};
    j["summary"] = {{"mu", ms.mu}, {"gamma0", ms.gamma0}, {"k", ms.k},
                    {"rho", ms.rho}, {"delta", ms.delta}};
    j["pi"] = {{"mu", pi.mu}, {"a", pi.a}, {"gamma0", pi.gamma0}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (*grd) {
    if (grd_spacing > 0.0) gspec.spacing(grd_spacing);
    const cogarch::ParameterGrid grid = cogarch::build_grid(gspec, model);
    ordered_json j;
    j["beta_count"] = grid.beta.size();
    j["eta_phi_count"] = grid.eta_phi.size();
    j["points"] = grid.points();
    if (grd_full) {
      j["eta_phi"] = ordered_json::array();
      for (const auto& [e, p] : grid.eta_phi) j["eta_phi"].push_back({e, p});
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  cogarch::StudyConfig cfg;
  if (!study_config_file.empty())
    cfg = cogarch::study_config_from_json(slurp(study_config_file));
  if (study_reps >= 0) cfg.reps = study_reps;
  if (study_n > 0) cfg.n = study_n;
  if (study_threads >= 0) cfg.threads = study_threads;
  if (study_seed_set) cfg.master_seed = study_seed;
  if (print_config) {
    std::cout << cogarch::study_config_to_json(cfg);
    return 0;
  }
  const cogarch::StudyReport report = cogarch::run_study(cfg);
  cogarch::write_report(report, study_out);
  std::cout << "included " << report.reps_included << "/" << report.config.reps
            << " replications; report written to " << study_out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
