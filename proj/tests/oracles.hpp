#pragma once

// Test-side reference computations.  Everything here is written from the
// definitions by plain enumeration and shares no code paths with the library
// beyond the data types.

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "vbi/gdl.hpp"
#include "vbi/hmc.hpp"

namespace oracle {

using vbi::RowMat;
using vbi::Vec;

inline double lg(double x) { return x > 0.0 ? std::log(x) : -1e10; }

// ---- factor models ---------------------------------------------------------

template <class V>
struct Table {
  std::vector<int> vars;  // ascending
  std::vector<V> values;  // row-major, last variable fastest
};

// Enumerates every assignment of the m variables, multiplies factor entries
// looked up by direct mixed-radix indexing, then reduces over S.
template <class V>
Table<V> enumerate_reduce(const vbi::FactorModel<V>& model, const std::set<int>& S,
                          std::function<V(V, V)> add, std::function<V(V, V)> mul) {
  const int m = model.m, M = model.M;
  Table<V> out;
  for (int v = 1; v <= m; ++v)
    if (!S.count(v)) out.vars.push_back(v);
  std::size_t nout = 1;
  for (std::size_t k = 0; k < out.vars.size(); ++k) nout *= M;
  out.values.resize(nout);
  std::vector<char> seen(nout, 0);
  std::size_t total = 1;
  for (int v = 0; v < m; ++v) total *= M;
  std::vector<int> x(m + 1, 0);
  for (std::size_t a = 0; a < total; ++a) {
    std::size_t r = a;
    for (int v = m; v >= 1; --v) {
      x[v] = static_cast<int>(r % M);
      r /= M;
    }
    V prod{};
    bool first = true;
    for (const auto& f : model.factors) {
      std::size_t idx = 0;
      for (int v = 1; v <= m; ++v)
        if (f.scope >> (v - 1) & 1) idx = idx * M + x[v];
      prod = first ? f.table[idx] : mul(prod, f.table[idx]);
      first = false;
    }
    std::size_t o = 0;
    for (int v : out.vars) o = o * M + x[v];
    out.values[o] = seen[o] ? add(out.values[o], prod) : prod;
    seen[o] = 1;
  }
  return out;
}

inline std::set<int> members(vbi::VarSet s) {
  std::set<int> r;
  for (int v = 1; v <= 64; ++v)
    if (s >> (v - 1) & 1) r.insert(v);
  return r;
}

inline std::set<int> unite(const std::vector<std::set<int>>& w, int from, int to) {
  std::set<int> r;
  for (int i = from; i <= to; ++i)
    if (i >= 1 && i <= static_cast<int>(w.size())) r.insert(w[i - 1].begin(), w[i - 1].end());
  return r;
}

inline std::set<int> minus(const std::set<int>& a, const std::set<int>& b) {
  std::set<int> r;
  for (int v : a)
    if (!b.count(v)) r.insert(v);
  return r;
}

inline std::set<int> intersect(const std::set<int>& a, const std::set<int>& b) {
  std::set<int> r;
  for (int v : a)
    if (b.count(v)) r.insert(v);
  return r;
}

// [i] = (w_i u ... u w_n) \ (w_{i+1} u ... u w_n)
inline std::set<int> nln(const std::vector<std::set<int>>& w, int i) {
  const int n = static_cast<int>(w.size());
  return minus(unite(w, i, n), unite(w, i + 1, n));
}

// (i) = (w_1 u ... u w_i) \ (w_1 u ... u w_{i-1})
inline std::set<int> fa(const std::vector<std::set<int>>& w, int i) {
  return minus(unite(w, 1, i), unite(w, 1, i - 1));
}

inline std::set<int> eta(const std::vector<std::set<int>>& w, int i) {
  return intersect(unite(w, i + 1, static_cast<int>(w.size())), unite(w, 1, i));
}

// Random model with every variable covered.
template <class V, class Gen>
vbi::FactorModel<V> random_model(std::mt19937_64& rng, int m, int M, int n, Gen gen) {
  vbi::FactorModel<V> model;
  model.m = m;
  model.M = M;
  std::uniform_int_distribution<int> var(1, m);
  std::uniform_int_distribution<int> width(1, std::min(m, 3));
  std::vector<vbi::VarSet> scopes(n, 0);
  for (int i = 0; i < n; ++i) {
    int w = width(rng);
    for (int k = 0; k < w; ++k) scopes[i] |= vbi::var_bit(var(rng));
  }
  // place uncovered variables into random factors
  vbi::VarSet cover = 0;
  for (auto s : scopes) cover |= s;
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int v = 1; v <= m; ++v)
    if (!(cover & vbi::var_bit(v))) scopes[pick(rng)] |= vbi::var_bit(v);
  for (auto s : scopes) {
    vbi::Factor<V> f;
    f.scope = s;
    std::size_t size = 1;
    for (int k = 0; k < vbi::set_size(s); ++k) size *= M;
    for (std::size_t k = 0; k < size; ++k) f.table.push_back(gen(rng));
    model.factors.push_back(std::move(f));
  }
  return model;
}

// ---- hidden Markov chains --------------------------------------------------

inline vbi::HmcModel random_hmc(std::mt19937_64& rng, int M, int n, bool uniform_T = false) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  vbi::HmcModel m;
  m.T.resize(M, M);
  for (int r = 0; r < M; ++r)
    for (int c = 0; c < M; ++c) m.T(r, c) = uniform_T ? 1.0 : u(rng);
  for (int c = 0; c < M; ++c) m.T.col(c) /= m.T.col(c).sum();
  m.p.resize(M);
  for (int k = 0; k < M; ++k) m.p(k) = u(rng);
  m.p /= m.p.sum();
  m.Psi.resize(n, M);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < M; ++k) m.Psi(i, k) = u(rng);
  return m;
}

// All M^n trajectories with their normalized posterior probabilities,
// trajectory index = sum_i l_i M^{n-1-i}.
struct Joint {
  int M, n;
  std::vector<std::vector<int>> paths;
  std::vector<double> prob;
};

inline Joint joint(const vbi::HmcModel& m) {
  Joint J;
  J.M = m.M();
  J.n = m.n();
  std::size_t N = 1;
  for (int i = 0; i < J.n; ++i) N *= J.M;
  double z = 0.0;
  for (std::size_t a = 0; a < N; ++a) {
    std::vector<int> l(J.n);
    std::size_t r = a;
    for (int i = J.n - 1; i >= 0; --i) {
      l[i] = static_cast<int>(r % J.M);
      r /= J.M;
    }
    double pr = m.p(l[0]) * m.Psi(0, l[0]);
    for (int i = 1; i < J.n; ++i) pr *= m.T(l[i], l[i - 1]) * m.Psi(i, l[i]);
    J.paths.push_back(l);
    J.prob.push_back(pr);
    z += pr;
  }
  for (double& v : J.prob) v /= z;
  return J;
}

inline RowMat marginals(const Joint& J) {
  RowMat g = RowMat::Zero(J.n, J.M);
  for (std::size_t a = 0; a < J.prob.size(); ++a)
    for (int i = 0; i < J.n; ++i) g(i, J.paths[a][i]) += J.prob[a];
  return g;
}

// first trajectory (in index order) attaining the maximum
inline std::vector<int> joint_argmax(const Joint& J) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < J.prob.size(); ++a)
    if (J.prob[a] > J.prob[best]) best = a;
  return J.paths[best];
}

inline double path_prob(const Joint& J, const std::vector<int>& l) {
  std::size_t a = 0;
  for (int v : l) a = a * J.M + v;
  return J.prob[a];
}

// KL(prod_i q_i || joint) by direct summation
inline double kld(const Joint& J, const RowMat& q) {
  double s = 0.0;
  for (std::size_t a = 0; a < J.prob.size(); ++a) {
    double qa = 1.0;
    for (int i = 0; i < J.n; ++i) qa *= q(i, J.paths[a][i]);
    if (qa > 0.0) s += qa * (std::log(qa) - lg(J.prob[a]));
  }
  return s;
}

inline double ks(const std::vector<double>& p, const std::vector<double>& q) {
  double best = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    double a = 0.0, b = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
      a += p[j];
      b += q[j];
    }
    best = std::max(best, std::abs(a - b));
  }
  return best;
}

inline int popcount_bits(unsigned v) {
  int c = 0;
  for (; v; v >>= 1) c += v & 1u;
  return c;
}

}  // namespace oracle
