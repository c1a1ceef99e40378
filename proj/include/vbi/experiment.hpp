#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vbi/channel.hpp"
#include "vbi/vb.hpp"

namespace vbi {

// Method names accepted in ExperimentConfig::methods.
const std::vector<std::string>& known_methods();

struct ExperimentConfig {
  std::string scenario = "awgn";  // awgn | fading
  int M = 4;
  int K = 8;
  std::vector<double> ebn0_db{10.0};
  std::vector<double> rho{0.9};  // fading only
  int n = 1000;
  int trials = 100;
  std::uint64_t seed = 0;
  std::vector<std::string> methods{"ml", "fb", "va", "vb", "vb-acc", "fcvb", "fcvb-acc"};
  double xi = 0.01;
  int max_cycles = 100;
  double sigma2 = 0.5;
  int jobs = 1;
  bool timing = true;  // false writes wall_ms = 0 so output is reproducible byte for byte

  void validate() const;
};

struct ResultRow {
  std::string method;
  std::string scenario;
  int M = 0, K = 0;
  double ebn0_db = 0.0, rho = 0.0;
  int n = 0, trials = 0;
  double ber = 0.0, ber_ci95 = 0.0;
  double nu_c_mean = 0.0, nu_e_mean = 0.0, kld_mean = 0.0;  // NaN where not applicable
  double wall_ms = 0.0;    // mean per trial
  double ops_mean = 0.0;   // operation-count proxy per trial
  int nonconverged = 0;
};

// Outcome of one method on one trial.
struct MethodOutcome {
  std::uint64_t bit_errors = 0;
  std::uint64_t bits = 0;
  double nu_c = 0.0, nu_e = 0.0, kld = 0.0;
  double wall_ms = 0.0;
  std::uint64_t ops = 0;
  bool converged = true;
};

// One grid point of the experiment: Eb/N0 plus, for fading, the quantizer.
struct GridPoint {
  double ebn0_db = 0.0;
  double rho = 0.0;
  const RayleighQuantizer* quantizer = nullptr;
};

std::vector<MethodOutcome> run_trial(const ExperimentConfig& cfg, const GridPoint& pt, int trial);

// OpenMP over trials when cfg.jobs > 1; results are aggregated in trial order.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);
// Serial reference path with streaming aggregation.
std::vector<ResultRow> run_experiment_serial(const ExperimentConfig& cfg);

void write_csv_header(std::ostream& out);
void write_csv_rows(std::ostream& out, const std::vector<ResultRow>& rows);
// Long format: method,scenario,ebn0_db,rho,metric,value
void write_plot_data(std::ostream& out, const std::vector<ResultRow>& rows);

}  // namespace vbi
