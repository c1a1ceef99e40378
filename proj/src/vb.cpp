#include "vbi/vb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vbi {

double ks_distance(const double* p, const double* q, int M) {
  double cp = 0.0, cq = 0.0, d = 0.0;
  for (int k = 0; k < M; ++k) {
    cp += p[k];
    cq += q[k];
    d = std::max(d, std::abs(cp - cq));
  }
  return d;
}

double ks_distance(const Vec& p, const Vec& q) {
  if (p.size() != q.size()) throw std::invalid_argument("ks_distance: length mismatch");
  return ks_distance(p.data(), q.data(), static_cast<int>(p.size()));
}

RowMat init_shaping(InitMode mode, const RowMat& Psi) {
  const auto M = Psi.cols();
  if (mode == InitMode::uniform) return RowMat::Constant(Psi.rows(), M, 1.0 / M);
  RowMat p = Psi;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    double s = p.row(i).sum();
    if (!(s > 0.0)) throw DegenerateObservation(static_cast<int>(i));
    p.row(i) /= s;
  }
  return p;
}

namespace {

const double kMinNormalLog = std::log(std::numeric_limits<double>::min());

// tau update shared by both accelerated schemes
void raise_neighbours(std::vector<char>& tau, int i, int n) {
  if (i > 0) tau[i - 1] = 1;
  if (i + 1 < n) tau[i + 1] = 1;
}

}  // namespace

VbResult ivb_run(const HmcModel& model, const RowMat& init, const StoppingConfig& cfg,
                 OpTally* ops, const VbCycleHook& on_cycle) {
  model.validate();
  const int n = model.n(), M = model.M();
  if (init.rows() != n || init.cols() != M) throw std::invalid_argument("init must be n x M");
  if (cfg.xi < 0.0) throw std::invalid_argument("xi must be >= 0");
  const RowMat logT = log0(model.T);
  const RowMat logTt = logT.transpose();
  const RowMat logPsi = log0(model.Psi);
  Eigen::RowVectorXd logp(M);
  for (int k = 0; k < M; ++k) logp(k) = log0(model.p(k));
  if (ops) ops->log += static_cast<std::uint64_t>(n) * M + M * M + M;

  VbResult r;
  r.p = init;
  std::vector<char> tau(n, 1);
  Eigen::RowVectorXd s(M), prev(M);
  const std::uint64_t mm = static_cast<std::uint64_t>(M) * M;
  for (int cycle = 1; cycle <= cfg.max_cycles; ++cycle) {
    bool any_change = false;
    for (int i = 0; i < n; ++i) {
      if (cfg.accelerated && !tau[i]) continue;
      prev = r.p.row(i);
      s = logPsi.row(i);
      if (i + 1 < n) s.noalias() += r.p.row(i + 1) * logT;
      if (i > 0) s.noalias() += r.p.row(i - 1) * logTt;
      if (i == 0) s += logp;
      s.array() -= s.maxCoeff();
      // anything that would land in the subnormal range becomes an exact zero
      s = (s.array() < kMinNormalLog).select(0.0, s.array().exp());
      r.p.row(i) = s / s.sum();
      ++r.updates;
      if (ops) {
        std::uint64_t terms = (i > 0) + (i + 1 < n);
        ops->mul += terms * mm;
        ops->add += terms * mm + M + (M - 1) + 2 * M;
        ops->exp += M;
        ops->div += M;
        ops->cmp += 2 * M - 1;
      }
      // At xi = 0 any change counts; rounding can hide one from the CDF sums.
      const bool changed = cfg.xi == 0.0 ? r.p.row(i) != prev
                                         : ks_distance(r.p.row(i).data(), prev.data(), M) > cfg.xi;
      if (changed) {
        any_change = true;
        raise_neighbours(tau, i, n);
      } else {
        tau[i] = 0;
      }
    }
    if (on_cycle) on_cycle(cycle, r.p);
    r.nu_c = cycle;
    bool done = cfg.accelerated ? std::none_of(tau.begin(), tau.end(), [](char t) { return t; })
                                : !any_change;
    if (done) {
      r.converged = true;
      break;
    }
  }
  r.nu_e = static_cast<double>(r.updates) / n;
  r.labels.resize(n);
  for (int i = 0; i < n; ++i) r.labels[i] = argmax(r.p.row(i).data(), M);
  return r;
}

FcvbResult fcvb_run(const HmcModel& model, const Labels& init, const StoppingConfig& cfg,
                    OpTally* ops, const FcvbUpdateHook& on_update) {
  model.validate();
  const int n = model.n(), M = model.M();
  if (static_cast<int>(init.size()) != n) throw std::invalid_argument("init must have n labels");
  for (int k : init)
    if (k < 0 || k >= M) throw std::invalid_argument("init label out of range");
  const RowMat logT = log0(model.T);
  const RowMat logPsi = log0(model.Psi);
  if (ops) ops->log += static_cast<std::uint64_t>(n) * M + M * M + M;
  // theta[(a*M + b)*M + k] = log T(a,k) + log T(k,b)
  const bool use_theta = static_cast<double>(M) * M * M <= static_cast<double>(n) * M;
  std::vector<double> theta;
  if (use_theta) {
    theta.resize(static_cast<std::size_t>(M) * M * M);
    for (int a = 0; a < M; ++a)
      for (int b = 0; b < M; ++b)
        for (int k = 0; k < M; ++k) theta[(a * M + b) * M + k] = logT(a, k) + logT(k, b);
    if (ops) ops->add += static_cast<std::uint64_t>(M) * M * M;
  }

  FcvbResult r;
  r.labels = init;
  std::vector<char> tau(n, 1);
  std::vector<double> score(M);
  for (int cycle = 1; cycle <= cfg.max_cycles; ++cycle) {
    bool any_change = false;
    for (int i = 0; i < n; ++i) {
      if (cfg.accelerated && !tau[i]) continue;
      const bool has_next = i + 1 < n, has_prev = i > 0;
      if (has_next && has_prev) {
        const int a = r.labels[i + 1], b = r.labels[i - 1];
        if (use_theta) {
          const double* th = &theta[(a * M + b) * M];
          for (int k = 0; k < M; ++k) score[k] = logPsi(i, k) + th[k];
        } else {
          for (int k = 0; k < M; ++k) score[k] = logPsi(i, k) + (logT(a, k) + logT(k, b));
        }
        if (ops) ops->add += use_theta ? M : 2 * M;
      } else {
        for (int k = 0; k < M; ++k) {
          double v = logPsi(i, k);
          if (has_next) v += logT(r.labels[i + 1], k);
          if (has_prev) v += logT(k, r.labels[i - 1]);
          if (i == 0) v += log0(model.p(k));
          score[k] = v;
        }
        if (ops) ops->add += 2 * M;
      }
      if (ops) ops->cmp += M;
      const int k = argmax(score.data(), M);
      ++r.updates;
      if (k != r.labels[i]) {
        r.labels[i] = k;
        any_change = true;
        raise_neighbours(tau, i, n);
      } else {
        tau[i] = 0;
      }
      if (on_update) on_update(i, r.labels);
    }
    r.nu_c = cycle;
    bool done = cfg.accelerated ? std::none_of(tau.begin(), tau.end(), [](char t) { return t; })
                                : !any_change;
    if (done) {
      r.converged = true;
      break;
    }
  }
  r.nu_e = static_cast<double>(r.updates) / n;
  return r;
}

namespace {

double neg_entropy(const RowMat& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    double v = p.data()[i];
    if (v > 0.0) h += v * std::log(v);
  }
  return h;
}

}  // namespace

double kld_vb(const HmcModel& model, const SmoothingResult& sm, const RowMat& p) {
  const int n = model.n(), M = model.M();
  const RowMat logT = log0(model.T);
  const RowMat logAlpha = log0(sm.alpha);
  double cross = 0.0;
  Vec logZ(M);
  for (int i = 0; i + 1 < n; ++i) {
    logZ = model.T * sm.alpha.row(i).transpose();
    for (int k = 0; k < M; ++k) logZ(k) = log0(logZ(k));
    for (int k = 0; k < M; ++k) {
      const double pk = p(i + 1, k);
      if (pk == 0.0) continue;
      double acc = 0.0;
      for (int j = 0; j < M; ++j) acc += p(i, j) * (logT(k, j) + logAlpha(i, j) - logZ(k));
      cross += pk * acc;
    }
  }
  for (int k = 0; k < M; ++k) cross += p(n - 1, k) * logAlpha(n - 1, k);
  return neg_entropy(p) - cross;
}

double kld_vb(const SmoothingResult& sm, const PosteriorChainFactors& cf, const RowMat& p) {
  const auto n = p.rows();
  double cross = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) cross += p.row(i + 1) * log0(cf.A[i]) * p.row(i).transpose();
  for (Eigen::Index k = 0; k < p.cols(); ++k) cross += p(n - 1, k) * log0(sm.alpha(n - 1, k));
  return neg_entropy(p) - cross;
}

}  // namespace vbi
