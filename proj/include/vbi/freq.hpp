#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "vbi/hmc.hpp"

namespace vbi {

using cvec = std::vector<std::complex<double>>;

// Frequency grid 2*pi*m/(pad*n) covering [0, pi).
std::vector<double> dft_grid(int n, int pad = 8);

// argmax over the grid of |sum_i x_i exp(-j w (i-1))|^2
double periodogram_ml(const cvec& x, const std::vector<double>& grid);
double periodogram_ml(const std::vector<double>& x, const std::vector<double>& grid);

std::vector<double> kay_weights(int n);
double kay_estimate(const cvec& x);

enum class FitzNorm { window, printed };  // 2/(L(L+1)) or 2/(n(n-1))
struct FitzResult {
  double omega = 0.0;
  bool wrap_warning = false;
};
FitzResult fitz_estimate(const cvec& x, int L, FitzNorm norm = FitzNorm::window);

struct FreqPrior {
  double mu_a = 1.0;
  double r_a = 0.1;
};

// Data-independent part of the grid posterior: sin(w i) and sum of sin^2.
struct FreqBasis {
  int n = 0;
  std::vector<double> omega;
  RowMat sin_table;  // G x n, entry (g, i-1) = sin(omega_g * i)
  Vec sum_sin2;
  FreqBasis(int n, std::vector<double> grid);
};

struct FreqPosteriorGrid {
  std::vector<double> omega;
  Vec r, mu;      // conditional variance and mean of a given omega
  Vec marginal;   // normalized on the grid
  double mean = 0.0;
  double marginal_map = 0.0;
  double joint_map = 0.0;
  int joint_map_index = 0;
  double a_hat = 0.0;
};

FreqPosteriorGrid freq_posterior(const std::vector<double>& x, double r_e, const FreqPrior& prior,
                                 const FreqBasis& basis);

struct ShapingState {
  double mu = 0.0, sigma2 = 0.0;   // amplitude (or transformed amplitude) moments
  double c1 = 0.0, c2 = 0.0;       // alpha1, alpha2 (VB) or beta1, beta2 (TVB)
  Vec marginal;                    // approximate marginal of omega on the grid
  double omega_mean = 0.0;
  double u12 = 0.0;
  std::vector<double> mu_trace;    // mu after each cycle
  int cycles = 0;
};

// tol > 0 stops once |mu - mu_prev| < tol; otherwise runs exactly `cycles`.
ShapingState vb_freq(const FreqPosteriorGrid& post, int cycles = 5, double tol = 0.0);

enum class U12Form { derived, printed };
double tvb_u12(const std::vector<double>& x, double r_e, const FreqPosteriorGrid& post,
               U12Form form = U12Form::derived);
ShapingState tvb_freq(const FreqPosteriorGrid& post, double u12, int cycles = 5, double tol = 0.0);

struct FreqConfig {
  int n = 64;
  double omega_bins = 1.1;
  std::vector<double> snr_db{5.0, 15.0};
  int trials = 1000;
  std::uint64_t seed = 0;
  int pad = 8;
  int cycles = 5;
  FreqPrior prior;
  U12Form u12_form = U12Form::derived;
  FitzNorm fitz_norm = FitzNorm::window;
  int jobs = 1;
};

struct FreqRow {
  std::string method;
  double snr_db = 0.0;
  int n = 0;
  double omega_bins = 0.0;
  double rms_bins = 0.0;
  int trials = 0;
};

const std::vector<std::string>& freq_methods();
std::vector<FreqRow> run_freq_experiment(const FreqConfig& cfg);

}  // namespace vbi
