#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cogarch/estimators.hpp"

namespace cogarch {

// Lattice over the restricted region: beta axis crossed with the (eta, phi)
// pairs whose fourth return moment exists, both ascending.
ParameterGrid build_grid(const GridSpec& spec, const LevyModel& model);

struct ComponentStats {
  double mean = 0.0;
  double stdev = 0.0;  // population convention (divide by count)
  double rb = 0.0;     // (mean - truth) / truth
  double rmse = 0.0;   // sqrt(variance + bias^2)
};

ComponentStats compute_stats(const std::vector<double>& x, double truth);

struct StudyConfig {
  CogarchParams theta_true{0.04, 0.053, 0.038};
  double vg_c = 1.0;
  double delta = 1.0;
  std::size_t n = 10000;
  int reps = 200;
  int r = 70;
  int K = 20;
  int substeps = 20;
  int burn_in = 500;
  std::uint64_t master_seed = 20260816;
  int threads = 0;  // 0: COGARCH_THREADS env var, then hardware concurrency
  std::vector<std::string> methods{"mm", "iie-star", "iie-sim"};
  GridSpec grid{0.002, 0.120, 0.020, 0.100, 0.010, 0.070};
  DomainBox domain{{0.002, 0.002, 0.002}, {0.120, 0.159, 0.114}};
  AuxMethod aux_method = AuxMethod::YuleWalker;
};

struct ReplicationOutcome {
  std::uint32_t rep = 0;
  bool included = false;
  std::string reason;  // empty when included
  std::vector<EstimationResult> estimates;  // one per method that ran, config order
};

struct MethodRow {
  std::string method;
  ComponentStats beta, eta, phi;
};

struct StudyReport {
  StudyConfig config;
  int reps_included = 0;
  int reps_excluded = 0;
  std::vector<MethodRow> rows;  // config method order
  std::vector<ReplicationOutcome> replications;
  std::string qq_method;
};

// Runs the replication study: per replication, simulate data with stream
// (master_seed, rep), fit every configured method, drop the replication when
// any method errors or lands outside the fourth-moment region, then
// aggregate. Deterministic for a given config regardless of thread count.
StudyReport run_study(const StudyConfig& cfg);

unsigned resolve_threads(int requested);

std::string study_config_to_json(const StudyConfig& cfg);
StudyConfig study_config_from_json(const std::string& text);  // unknown keys rejected

std::string report_json(const StudyReport& report);

// Writes report.json, estimates.csv and qq.csv into dir (created if needed).
void write_report(const StudyReport& report, const std::string& dir);

}  // namespace cogarch
