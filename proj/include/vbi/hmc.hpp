#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace vbi {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using Labels = std::vector<int>;  // 0-based state indices

// Elementary operation tally used as a machine-independent cost proxy.
struct OpTally {
  std::uint64_t add = 0, mul = 0, div = 0, cmp = 0, exp = 0, log = 0;
  std::uint64_t total() const { return add + mul + div + cmp + exp + log; }
  OpTally& operator+=(const OpTally& o) {
    add += o.add;
    mul += o.mul;
    div += o.div;
    cmp += o.cmp;
    exp += o.exp;
    log += o.log;
    return *this;
  }
};

class DegenerateObservation : public std::runtime_error {
 public:
  explicit DegenerateObservation(int t)
      : std::runtime_error("zero normalizer at time " + std::to_string(t + 1)), time(t) {}
  int time;
};

// Homogeneous hidden Markov chain with known parameters.
// T(k, j) = Pr(l_i = k | l_{i-1} = j): columns sum to one.
struct HmcModel {
  RowMat T;    // M x M
  Vec p;       // initial distribution
  RowMat Psi;  // n x M, row i is the soft classification of x_i

  int M() const { return static_cast<int>(p.size()); }
  int n() const { return static_cast<int>(Psi.rows()); }
  void validate() const;
};

// log with the log(0) = -1e10 convention
double log0(double x);
RowMat log0(const RowMat& a);

// argmax/argmin returning the smallest index among ties
int argmax(const double* v, int len);
int argmin(const double* v, int len);
template <class Derived>
int argmax(const Eigen::DenseBase<Derived>& v) {
  int best = 0;
  for (int k = 1; k < v.size(); ++k)
    if (v(k) > v(best)) best = k;
  return best;
}

struct SmoothingResult {
  RowMat alpha;  // filtering
  RowMat beta;   // normalized backward statistics
  RowMat gamma;  // smoothing marginals
  Labels labels;
};

SmoothingResult fb_algorithm(const HmcModel& model, OpTally* ops = nullptr);

struct ViterbiTrace {
  RowMat lambda;  // accumulated weighted lengths
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> kappa;  // back-pointers
  Labels labels;
};

ViterbiTrace viterbi(const HmcModel& model, OpTally* ops = nullptr);

struct ProfileResult {
  RowMat profile;  // normalized profile marginals
  Labels labels;
};

ProfileResult bidirectional_viterbi(const HmcModel& model);

Labels ml_detect(const RowMat& Psi, OpTally* ops = nullptr);

struct PosteriorChainFactors {
  std::vector<RowMat> A;  // A[i](k, j) = Pr(l_i = j | l_{i+1} = k, x): rows sum to one
  std::vector<RowMat> B;  // B[i](j, k) = Pr(l_{i+1} = j | l_i = k, x): columns sum to one
};

PosteriorChainFactors posterior_chain_factors(const HmcModel& model, const SmoothingResult& sm);

// Exhaustive posterior over all M^n trajectories (guarded at 1e6).
class BruteForcePosterior {
 public:
  explicit BruteForcePosterior(const HmcModel& model);

  std::size_t size() const { return prob_.size(); }
  double prob(std::size_t idx) const { return prob_[idx]; }
  double log_prob(std::size_t idx) const { return logp_[idx]; }
  Labels decode(std::size_t idx) const;
  std::size_t encode(const Labels& l) const;
  double prob(const Labels& l) const { return prob_[encode(l)]; }

  RowMat marginals() const;
  std::size_t joint_argmax() const;  // smallest index among ties
  // Pr(l_i = j | l_{i+1} = k), returned as (k, j)
  RowMat backward_conditional(int i) const;
  // normalized max over the other coordinates, per time
  RowMat profile() const;

 private:
  int M_, n_;
  std::vector<double> logp_, prob_;
};

}  // namespace vbi
