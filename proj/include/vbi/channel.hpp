#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include "vbi/hmc.hpp"

namespace vbi {

using Rng = std::mt19937_64;
using cplx = std::complex<double>;

// Independent stream per (seed, trial) pair.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return Rng(seq);
}

struct QamConstellation {
  int M = 0;
  int bits = 0;                 // log2 M
  std::vector<cplx> points;     // state index -> amplitude
  std::vector<unsigned> gray;   // state index -> bit label
};

// M in {2, 4, 16, 64}; average energy per bit is one.
QamConstellation qam_constellation(int M);

// U(0,1) entries with columns normalized to one.
RowMat random_transition_matrix(int M, Rng& rng);

struct MarkovSource {
  RowMat T;
  Vec p;
};

MarkovSource random_source(int M, Rng& rng);  // uniform p
Labels draw_chain(const RowMat& T, const Vec& p, int n, Rng& rng);

double noise_density(double ebn0_db);  // N0 for unit energy per bit

// Psi(i, k) proportional to the complex Gaussian density of x_i around means[k];
// each row is scaled so its largest entry is one.
RowMat soft_classify(const std::vector<cplx>& x, const std::vector<cplx>& means, double N0);

struct AwgnTrial {
  Labels truth;
  std::vector<cplx> x;
  HmcModel model;
};

AwgnTrial simulate_awgn_trial(const MarkovSource& src, const QamConstellation& qam,
                              double ebn0_db, int n, Rng& rng);

double rho_from_doppler(double fdts);

struct RayleighQuantizer {
  int K = 0;
  double sigma2 = 0.5;
  double rho = 0.0;
  std::vector<double> zeta;    // thresholds zeta_0..zeta_K
  std::vector<double> mass;    // cell probabilities before renormalization
  std::vector<double> levels;  // conditional means g_1..g_K
  double tail_residual = 0.0;  // 1 - sum(mass)
  RowMat Tc;                   // K x K, columns sum to one
  Vec p;                       // 1/K
};

RayleighQuantizer rayleigh_quantizer(int K, double sigma2, double rho);

double rayleigh_cdf(double g, double sigma2);
double bivariate_rayleigh_log_density(double g1, double g2, double sigma2, double rho);

struct AugmentedModel {
  HmcModel model;  // M*K states, index c*M + s
  int M = 0, K = 0;
  int source_of(int idx) const { return idx % M; }
  int channel_of(int idx) const { return idx / M; }
};

// T_cs = T_c (x) T_s with uniform initial vector; Psi left empty.
AugmentedModel augmented_model(const RayleighQuantizer& q, const MarkovSource& src);

struct FadingTrial {
  Labels source;
  Labels channel;
  std::vector<cplx> x;
  AugmentedModel aug;
};

FadingTrial simulate_fading_trial(const RayleighQuantizer& q, const MarkovSource& src,
                                  const QamConstellation& qam, double ebn0_db, int n, Rng& rng);

Labels source_labels(const AugmentedModel& aug, const Labels& augmented);
// argmax over s of sum_c gamma(c*M + s)
Labels source_marginal_map(const AugmentedModel& aug, const RowMat& gamma);

std::uint64_t bit_errors(const Labels& truth, const Labels& est, const QamConstellation& qam);
double ber(const Labels& truth, const Labels& est, const QamConstellation& qam);

}  // namespace vbi
