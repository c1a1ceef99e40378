#pragma once

#include <functional>

#include "vbi/hmc.hpp"

namespace vbi {

struct StoppingConfig {
  double xi = 0.01;  // KS threshold
  int max_cycles = 100;
  bool accelerated = false;
};

// max_k |CDF_p(k) - CDF_q(k)| over the state order 0..M-1
double ks_distance(const double* p, const double* q, int M);
double ks_distance(const Vec& p, const Vec& q);

enum class InitMode { uniform, ml };
RowMat init_shaping(InitMode mode, const RowMat& Psi);

struct VbResult {
  RowMat p;  // n x M VB marginals
  Labels labels;
  int nu_c = 0;
  double nu_e = 0.0;
  std::uint64_t updates = 0;
  bool converged = false;
};

// Called after every completed cycle with the cycle number (1-based).
using VbCycleHook = std::function<void(int, const RowMat&)>;

VbResult ivb_run(const HmcModel& model, const RowMat& init, const StoppingConfig& cfg,
                 OpTally* ops = nullptr, const VbCycleHook& on_cycle = {});

struct FcvbResult {
  Labels labels;
  int nu_c = 0;
  double nu_e = 0.0;
  std::uint64_t updates = 0;
  bool converged = false;
};

// Called after each single-site update with the site and the current labels.
using FcvbUpdateHook = std::function<void(int, const Labels&)>;

// ICM-style coordinate maximization; cfg.xi is ignored (label equality rule).
FcvbResult fcvb_run(const HmcModel& model, const Labels& init, const StoppingConfig& cfg,
                    OpTally* ops = nullptr, const FcvbUpdateHook& on_update = {});

// KL(prod_i p_i || f(L|x)) from the filtering statistics.
double kld_vb(const HmcModel& model, const SmoothingResult& sm, const RowMat& p);
// Same quantity from explicit backward factors A_i.
double kld_vb(const SmoothingResult& sm, const PosteriorChainFactors& cf, const RowMat& p);

}  // namespace vbi
