#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "vbi/semiring.hpp"
#include "vbi/topology.hpp"

namespace vbi {

struct OpCount {
  std::uint64_t ring_sum = 0;
  std::uint64_t ring_product = 0;
  std::uint64_t total() const { return ring_sum + ring_product; }
  OpCount& operator+=(const OpCount& o) {
    ring_sum += o.ring_sum;
    ring_product += o.ring_product;
    return *this;
  }
};

// Saturating integer power, enough for operator tallies.
std::uint64_t ipow(std::uint64_t base, int exp);

// Dense table over the variables of `scope`, row-major with ascending
// variable indices (the largest index varies fastest).
template <class V>
struct Factor {
  VarSet scope = 0;
  std::vector<V> table;
};

template <class V>
struct FactorModel {
  int m = 0;
  int M = 0;
  std::vector<Factor<V>> factors;

  int n() const { return static_cast<int>(factors.size()); }
  Topology topology() const {
    std::vector<VarSet> s;
    for (const auto& f : factors) s.push_back(f.scope);
    return Topology(m, s);
  }
  void validate() const {
    if (M < 1) throw std::invalid_argument("alphabet size must be >= 1");
    topology();
    for (const auto& f : factors)
      if (f.table.size() != ipow(M, set_size(f.scope)))
        throw std::invalid_argument("factor table length must be M^|omega|");
  }
};

class NofViolation : public std::invalid_argument {
 public:
  NofViolation(int which, VarSet sbar)
      : std::invalid_argument("objective set " + std::to_string(which + 1) + " " +
                              format_set(sbar) + " is not non-overflowed"),
        index(which), set(sbar) {}
  int index;
  VarSet set;
};

namespace detail {

// stride of variable v inside a table over `scope`
inline std::size_t stride_in(VarSet scope, int v, int M) {
  if (!(scope & var_bit(v))) return 0;
  VarSet above = scope & ~((var_bit(v) << 1) - 1);
  return static_cast<std::size_t>(ipow(M, set_size(above)));
}

}  // namespace detail

template <class SR>
Factor<typename SR::value_type> ring_product(const Factor<typename SR::value_type>& f,
                                             const Factor<typename SR::value_type>& g, int M,
                                             OpCount* count = nullptr) {
  using V = typename SR::value_type;
  Factor<V> out;
  out.scope = f.scope | g.scope;
  const auto vars = set_members(out.scope);
  const int d = static_cast<int>(vars.size());
  std::vector<std::size_t> sf(d), sg(d);
  for (int p = 0; p < d; ++p) {
    sf[p] = detail::stride_in(f.scope, vars[p], M);
    sg[p] = detail::stride_in(g.scope, vars[p], M);
  }
  const std::size_t N = ipow(M, d);
  out.table.resize(N);
  std::vector<int> x(d, 0);
  std::size_t jf = 0, jg = 0;
  for (std::size_t k = 0; k < N; ++k) {
    out.table[k] = SR::mul(f.table[jf], g.table[jg]);
    for (int p = d - 1; p >= 0; --p) {
      if (++x[p] < M) {
        jf += sf[p];
        jg += sg[p];
        break;
      }
      x[p] = 0;
      jf -= sf[p] * (M - 1);
      jg -= sg[p] * (M - 1);
    }
  }
  if (count) count->ring_product += N;
  return out;
}

template <class SR>
Factor<typename SR::value_type> ring_sum(const Factor<typename SR::value_type>& f, VarSet S,
                                         int M, OpCount* count = nullptr) {
  using V = typename SR::value_type;
  S &= f.scope;
  if (S == 0) return f;
  Factor<V> out;
  out.scope = f.scope & ~S;
  const auto vars = set_members(f.scope);
  const int d = static_cast<int>(vars.size());
  std::vector<std::size_t> so(d);
  for (int p = 0; p < d; ++p) so[p] = detail::stride_in(out.scope, vars[p], M);
  const std::size_t N = f.table.size();
  const std::size_t No = ipow(M, set_size(out.scope));
  out.table.resize(No);
  std::vector<char> seen(No, 0);
  std::vector<int> x(d, 0);
  std::size_t jo = 0;
  for (std::size_t k = 0; k < N; ++k) {
    if (seen[jo]) {
      out.table[jo] = SR::add(out.table[jo], f.table[k]);
    } else {
      out.table[jo] = f.table[k];
      seen[jo] = 1;
    }
    for (int p = d - 1; p >= 0; --p) {
      if (++x[p] < M) {
        jo += so[p];
        break;
      }
      x[p] = 0;
      jo -= so[p] * (M - 1);
    }
  }
  if (count) count->ring_sum += N - No;
  return out;
}

// Value of a table at a full assignment x[1..m] (x[0] unused).
template <class V>
const V& factor_at(const Factor<V>& f, const std::vector<int>& x, int M) {
  std::size_t idx = 0;
  for (int v : set_members(f.scope)) idx = idx * M + x[v];
  return f.table[idx];
}

// Direct evaluation: full joint by left-fold ring products, then ring-sum over S.
template <class SR>
Factor<typename SR::value_type> naive_reduce(const FactorModel<typename SR::value_type>& model,
                                             VarSet S, OpCount* count = nullptr) {
  registered_semiring<SR>();
  if (static_cast<double>(ipow(model.M, model.m)) > 1e7)
    throw std::length_error("naive_reduce: M^m exceeds 1e7");
  model.validate();
  if (!subset_of(S, full_set(model.m))) throw std::invalid_argument("S not inside the universe");
  auto joint = model.factors[0];
  for (int j = 1; j < model.n(); ++j)
    joint = ring_product<SR>(joint, model.factors[j], model.M, count);
  return ring_sum<SR>(joint, S, model.M, count);
}

inline int default_split(int n) { return n <= 1 ? 1 : std::min(n - 1, (n + 1) / 2); }

namespace detail {

template <class SR>
void rescale(Factor<typename SR::value_type>& f, double* log_scale) {
  if constexpr (std::is_same_v<SR, SumProduct>) {
    if (!log_scale) return;
    double mx = 0.0;
    for (double v : f.table) mx = std::max(mx, std::abs(v));
    if (mx > 0.0 && std::isfinite(mx)) {
      for (double& v : f.table) v /= mx;
      *log_scale += std::log(mx);
    }
  } else {
    (void)f;
    (void)log_scale;
  }
}

template <class SR>
Factor<typename SR::value_type> fb_single_impl(const FactorModel<typename SR::value_type>& model,
                                               VarSet S, int split, OpCount* count,
                                               double* log_scale) {
  registered_semiring<SR>();
  model.validate();
  const Topology topo = model.topology();
  const int n = model.n(), M = model.M;
  if (!subset_of(S, topo.universe())) throw std::invalid_argument("S not inside the universe");
  if (n == 1) return ring_sum<SR>(model.factors[0], S, M, count);
  if (split == 0) split = default_split(n);
  if (split < 1 || split > n - 1) throw std::out_of_range("split index must lie in 1..n-1");

  auto fwd = ring_sum<SR>(model.factors[0], S & topo.nln(1), M, count);
  rescale<SR>(fwd, log_scale);
  for (int j = 2; j <= split; ++j) {
    fwd = ring_sum<SR>(ring_product<SR>(model.factors[j - 1], fwd, M, count), S & topo.nln(j), M,
                       count);
    rescale<SR>(fwd, log_scale);
  }
  auto bwd = ring_sum<SR>(model.factors[n - 1], S & topo.fa(n), M, count);
  rescale<SR>(bwd, log_scale);
  for (int j = n - 1; j >= split + 1; --j) {
    bwd = ring_sum<SR>(ring_product<SR>(model.factors[j - 1], bwd, M, count), S & topo.fa(j), M,
                       count);
    rescale<SR>(bwd, log_scale);
  }
  return ring_sum<SR>(ring_product<SR>(bwd, fwd, M, count), S & topo.eta(split), M, count);
}

}  // namespace detail

// Ring-sum over S of the ring-product of all factors, by one forward recursion
// over factors 1..split and one backward recursion over n..split+1.
// split = 0 selects ceil(n/2).
template <class SR>
Factor<typename SR::value_type> fb_reduce_single(const FactorModel<typename SR::value_type>& model,
                                                 VarSet S, int split = 0,
                                                 OpCount* count = nullptr) {
  return detail::fb_single_impl<SR>(model, S, split, count, nullptr);
}

struct ScaledFactor {
  Factor<double> table;  // true value = table * exp(log_scale)
  double log_scale = 0.0;
};

// Sum-product variant rescaling every intermediate table by its maximum.
inline ScaledFactor fb_reduce_single_scaled(const FactorModel<double>& model, VarSet S,
                                            int split = 0) {
  ScaledFactor r;
  r.table = detail::fb_single_impl<SumProduct>(model, S, split, nullptr, &r.log_scale);
  return r;
}

// Intermediate tables of a full forward and backward sweep.
template <class V>
struct FbSweep {
  std::vector<Factor<V>> fwd_bar;  // [j-1] = g_j (.) ghat_{1:j-1}
  std::vector<Factor<V>> bwd_bar;  // [j-1] = g_j (.) ghat_{j+1:n}
};

template <class SR>
FbSweep<typename SR::value_type> fb_sweep(const FactorModel<typename SR::value_type>& model,
                                          VarSet S, OpCount* count = nullptr) {
  registered_semiring<SR>();
  model.validate();
  const Topology topo = model.topology();
  const int n = model.n(), M = model.M;
  FbSweep<typename SR::value_type> sw;
  sw.fwd_bar.resize(n);
  sw.bwd_bar.resize(n);
  // bwd_bar[0] is never needed by an extraction and is left empty
  sw.fwd_bar[0] = model.factors[0];
  for (int j = 2; j <= n; ++j) {
    auto hat = ring_sum<SR>(sw.fwd_bar[j - 2], S & topo.nln(j - 1), M, count);
    sw.fwd_bar[j - 1] = ring_product<SR>(model.factors[j - 1], hat, M, count);
  }
  sw.bwd_bar[n - 1] = model.factors[n - 1];
  for (int j = n - 1; j >= 2; --j) {
    auto hat = ring_sum<SR>(sw.bwd_bar[j], S & topo.fa(j + 1), M, count);
    sw.bwd_bar[j - 1] = ring_product<SR>(model.factors[j - 1], hat, M, count);
  }
  return sw;
}

// Several objective sets from one forward and one backward sweep.  Result j
// lives on (universe \ S) u sbars[j].
template <class SR>
std::vector<Factor<typename SR::value_type>> fb_reduce_sequential(
    const FactorModel<typename SR::value_type>& model, VarSet S, const std::vector<VarSet>& sbars,
    OpCount* count = nullptr) {
  model.validate();
  const Topology topo = model.topology();
  const int n = model.n(), M = model.M;
  if (!subset_of(S, topo.universe())) throw std::invalid_argument("S not inside the universe");
  std::vector<int> idx(sbars.size());
  for (std::size_t k = 0; k < sbars.size(); ++k) {
    if (sbars[k] == 0) throw std::invalid_argument("objective sets must be non-empty");
    idx[k] = topo.nof_index(S, sbars[k]);
    if (idx[k] == 0) throw NofViolation(static_cast<int>(k), sbars[k]);
  }
  const auto sw = fb_sweep<SR>(model, S, count);
  std::vector<Factor<typename SR::value_type>> out;
  for (std::size_t k = 0; k < sbars.size(); ++k) {
    const int i = idx[k];
    const VarSet keep = ~sbars[k];
    auto left = ring_sum<SR>(sw.fwd_bar[i - 1], S & topo.nln(i) & keep, M, count);
    if (i == n) {
      out.push_back(std::move(left));
      continue;
    }
    auto right = ring_sum<SR>(sw.bwd_bar[i], S & topo.fa(i + 1) & keep, M, count);
    out.push_back(ring_sum<SR>(ring_product<SR>(right, left, M, count), S & topo.eta(i) & keep,
                               M, count));
  }
  return out;
}

enum class CountMode { fb, direct, naive };

// Closed-form tally of ring-sum/ring-product operations for evaluating the
// reduction over S.  fb: the recursion with split i; direct: the same binary
// tree with every ring-sum deferred to the end; naive: left-fold product then sum.
OpCount count_operators(const Topology& topo, int M, VarSet S, int split, CountMode mode);

// M^{W_i} + sum_{j>i} M^{B_j} + sum_{j<=i} M^{F_j}
std::uint64_t phi_fb(const Topology& topo, int M, VarSet S, int split);

struct NaiveBounds {
  std::uint64_t lower = 0;
  std::uint64_t upper = 0;
};
NaiveBounds naive_bounds(const Topology& topo, int M);

// True when the recursion pushes at least one ring-sum inside a product.
bool gdl_applies(const Topology& topo, VarSet S, int split);

constexpr double kLogZero = -1e10;
inline double safe_log(double x) { return x > 0.0 ? std::log(x) : kLogZero; }

// E_f log q via the dual-number semiring; f and q share factor scopes.
double dual_entropy(const FactorModel<double>& f, const FactorModel<double>& q);

FactorModel<double> read_factor_model(std::istream& in);
void write_factor_model(std::ostream& out, const FactorModel<double>& model);

}  // namespace vbi
