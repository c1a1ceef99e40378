#include "vbi/hmc.hpp"

#include <cmath>
#include <limits>

namespace vbi {

namespace {
constexpr double kLog0 = -1e10;
}

void HmcModel::validate() const {
  const int m = M();
  if (m < 1) throw std::invalid_argument("HMC needs at least one state");
  if (T.rows() != m || T.cols() != m) throw std::invalid_argument("T must be M x M");
  if (Psi.cols() != m || Psi.rows() < 1) throw std::invalid_argument("Psi must be n x M, n >= 1");
  for (int k = 0; k < m; ++k) {
    if (std::abs(T.col(k).sum() - 1.0) > 1e-9) throw std::invalid_argument("T column does not sum to 1");
    if ((T.col(k).array() < 0.0).any()) throw std::invalid_argument("T has a negative entry");
  }
  if (std::abs(p.sum() - 1.0) > 1e-9 || (p.array() < 0.0).any())
    throw std::invalid_argument("p is not a simplex");
  if ((Psi.array() < 0.0).any()) throw std::invalid_argument("Psi has a negative entry");
}

double log0(double x) { return x > 0.0 ? std::log(x) : kLog0; }

RowMat log0(const RowMat& a) { return a.unaryExpr([](double x) { return log0(x); }); }

int argmax(const double* v, int len) {
  int best = 0;
  for (int k = 1; k < len; ++k)
    if (v[k] > v[best]) best = k;
  return best;
}

int argmin(const double* v, int len) {
  int best = 0;
  for (int k = 1; k < len; ++k)
    if (v[k] < v[best]) best = k;
  return best;
}

namespace {

// normalizes in place, throws when the mass vanishes
template <class Row>
void normalize_row(Row&& r, int t, OpTally* ops) {
  double s = r.sum();
  if (!(s > 0.0) || !std::isfinite(s)) throw DegenerateObservation(t);
  r /= s;
  if (ops) {
    ops->add += r.size() - 1;
    ops->div += r.size();
  }
}

}  // namespace

SmoothingResult fb_algorithm(const HmcModel& model, OpTally* ops) {
  model.validate();
  const int n = model.n(), M = model.M();
  SmoothingResult r;
  r.alpha.resize(n, M);
  r.beta.resize(n, M);
  r.gamma.resize(n, M);
  const std::uint64_t mm = static_cast<std::uint64_t>(M) * M;

  r.alpha.row(0) = model.Psi.row(0).array() * model.p.transpose().array();
  if (ops) ops->mul += M;
  normalize_row(r.alpha.row(0), 0, ops);
  Vec tmp(M);
  for (int i = 1; i < n; ++i) {
    tmp.noalias() = model.T * r.alpha.row(i - 1).transpose();
    r.alpha.row(i) = model.Psi.row(i).array() * tmp.transpose().array();
    if (ops) {
      ops->mul += mm + M;
      ops->add += mm - M;
    }
    normalize_row(r.alpha.row(i), i, ops);
  }

  r.beta.row(n - 1).setConstant(1.0 / M);
  for (int i = n - 2; i >= 0; --i) {
    tmp = model.Psi.row(i + 1).transpose().array() * r.beta.row(i + 1).transpose().array();
    r.beta.row(i).noalias() = (model.T.transpose() * tmp).transpose();
    if (ops) {
      ops->mul += mm + M;
      ops->add += mm - M;
    }
    normalize_row(r.beta.row(i), i, ops);
  }

  r.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    r.gamma.row(i) = r.alpha.row(i).array() * r.beta.row(i).array();
    if (ops) {
      ops->mul += M;
      ops->cmp += M - 1;
    }
    normalize_row(r.gamma.row(i), i, ops);
    r.labels[i] = argmax(r.gamma.row(i).data(), M);
  }
  return r;
}

ViterbiTrace viterbi(const HmcModel& model, OpTally* ops) {
  model.validate();
  const int n = model.n(), M = model.M();
  const RowMat logT = log0(model.T);
  ViterbiTrace v;
  v.lambda.resize(n, M);
  v.kappa.setZero(n, M);
  for (int j = 0; j < M; ++j) v.lambda(0, j) = -(log0(model.Psi(0, j)) + log0(model.p(j)));
  if (ops) {
    ops->log += static_cast<std::uint64_t>(n) * M + M * M + M;
    ops->add += M;
  }
  std::vector<double> cand(M);
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < M; ++j) {
      const double lpsi = log0(model.Psi(i, j));
      for (int k = 0; k < M; ++k) cand[k] = -lpsi - logT(j, k) + v.lambda(i - 1, k);
      int kk = argmin(cand.data(), M);
      v.lambda(i, j) = cand[kk];
      v.kappa(i, j) = kk;
    }
    if (ops) {
      ops->add += 2ull * M * M;
      ops->cmp += static_cast<std::uint64_t>(M) * (M - 1);
    }
  }
  v.labels.resize(n);
  v.labels[n - 1] = argmin(v.lambda.row(n - 1).data(), M);
  for (int i = n - 1; i >= 1; --i) v.labels[i - 1] = v.kappa(i, v.labels[i]);
  if (ops) ops->cmp += M - 1;
  return v;
}

ProfileResult bidirectional_viterbi(const HmcModel& model) {
  const ViterbiTrace fw = viterbi(model);
  const int n = model.n(), M = model.M();
  const RowMat logT = log0(model.T);
  RowMat mu = RowMat::Zero(n, M);
  for (int i = n - 2; i >= 0; --i) {
    for (int k = 0; k < M; ++k) {
      double best = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < M; ++j)
        best = std::max(best, logT(j, k) + log0(model.Psi(i + 1, j)) + mu(i + 1, j));
      mu(i, k) = best;
    }
  }
  ProfileResult r;
  r.profile.resize(n, M);
  r.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    Eigen::RowVectorXd s = mu.row(i) - fw.lambda.row(i);
    s.array() -= s.maxCoeff();
    s = s.array().exp();
    r.profile.row(i) = s / s.sum();
    r.labels[i] = argmax(r.profile.row(i).data(), M);
  }
  return r;
}

Labels ml_detect(const RowMat& Psi, OpTally* ops) {
  const int n = static_cast<int>(Psi.rows()), M = static_cast<int>(Psi.cols());
  Labels l(n);
  for (int i = 0; i < n; ++i) l[i] = argmax(Psi.row(i).data(), M);
  if (ops) ops->cmp += static_cast<std::uint64_t>(n) * (M - 1);
  return l;
}

PosteriorChainFactors posterior_chain_factors(const HmcModel& model, const SmoothingResult& sm) {
  const int n = model.n(), M = model.M();
  PosteriorChainFactors f;
  for (int i = 0; i + 1 < n; ++i) {
    RowMat A(M, M), B(M, M);
    for (int k = 0; k < M; ++k) {
      A.row(k) = model.T.row(k).array() * sm.alpha.row(i).array();
      double s = A.row(k).sum();
      if (!(s > 0.0)) throw DegenerateObservation(i);
      A.row(k) /= s;
    }
    for (int k = 0; k < M; ++k) {
      for (int j = 0; j < M; ++j) B(j, k) = sm.beta(i + 1, j) * model.Psi(i + 1, j) * model.T(j, k);
      double s = B.col(k).sum();
      if (!(s > 0.0)) throw DegenerateObservation(i + 1);
      B.col(k) /= s;
    }
    f.A.push_back(std::move(A));
    f.B.push_back(std::move(B));
  }
  return f;
}

BruteForcePosterior::BruteForcePosterior(const HmcModel& model) : M_(model.M()), n_(model.n()) {
  model.validate();
  if (std::pow(static_cast<double>(M_), n_) > 1e6)
    throw std::length_error("brute-force posterior: M^n exceeds 1e6");
  std::size_t N = 1;
  for (int i = 0; i < n_; ++i) N *= M_;
  logp_.resize(N);
  prob_.resize(N);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < N; ++idx) {
    Labels l = decode(idx);
    double lp = log0(model.p(l[0])) + log0(model.Psi(0, l[0]));
    for (int i = 1; i < n_; ++i) lp += log0(model.T(l[i], l[i - 1])) + log0(model.Psi(i, l[i]));
    logp_[idx] = lp;
    mx = std::max(mx, lp);
  }
  double s = 0.0;
  for (std::size_t idx = 0; idx < N; ++idx) s += std::exp(logp_[idx] - mx);
  const double lz = mx + std::log(s);
  for (std::size_t idx = 0; idx < N; ++idx) {
    logp_[idx] -= lz;
    prob_[idx] = std::exp(logp_[idx]);
  }
}

Labels BruteForcePosterior::decode(std::size_t idx) const {
  Labels l(n_);
  for (int i = n_ - 1; i >= 0; --i) {
    l[i] = static_cast<int>(idx % M_);
    idx /= M_;
  }
  return l;
}

std::size_t BruteForcePosterior::encode(const Labels& l) const {
  std::size_t idx = 0;
  for (int v : l) idx = idx * M_ + v;
  return idx;
}

RowMat BruteForcePosterior::marginals() const {
  RowMat g = RowMat::Zero(n_, M_);
  for (std::size_t idx = 0; idx < size(); ++idx) {
    Labels l = decode(idx);
    for (int i = 0; i < n_; ++i) g(i, l[i]) += prob_[idx];
  }
  return g;
}

std::size_t BruteForcePosterior::joint_argmax() const {
  std::size_t best = 0;
  for (std::size_t idx = 1; idx < size(); ++idx)
    if (logp_[idx] > logp_[best]) best = idx;
  return best;
}

RowMat BruteForcePosterior::backward_conditional(int i) const {
  RowMat c = RowMat::Zero(M_, M_);
  for (std::size_t idx = 0; idx < size(); ++idx) {
    Labels l = decode(idx);
    c(l[i + 1], l[i]) += prob_[idx];
  }
  for (int k = 0; k < M_; ++k) c.row(k) /= c.row(k).sum();
  return c;
}

RowMat BruteForcePosterior::profile() const {
  RowMat pr = RowMat::Constant(n_, M_, 0.0);
  for (std::size_t idx = 0; idx < size(); ++idx) {
    Labels l = decode(idx);
    for (int i = 0; i < n_; ++i) pr(i, l[i]) = std::max(pr(i, l[i]), prob_[idx]);
  }
  for (int i = 0; i < n_; ++i) pr.row(i) /= pr.row(i).sum();
  return pr;
}

}  // namespace vbi
