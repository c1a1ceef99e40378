#include "vbi/topology.hpp"

#include <stdexcept>

namespace vbi {

VarSet make_set(std::initializer_list<int> vars) {
  return make_set(std::vector<int>(vars));
}

VarSet make_set(const std::vector<int>& vars) {
  VarSet s = 0;
  for (int v : vars) {
    if (v < 1 || v > kMaxVars) throw std::out_of_range("variable index out of range");
    s |= var_bit(v);
  }
  return s;
}

VarSet full_set(int m) {
  return m >= kMaxVars ? ~VarSet{0} : (VarSet{1} << m) - 1;
}

std::vector<int> set_members(VarSet s) {
  std::vector<int> out;
  while (s) {
    int b = std::countr_zero(s);
    out.push_back(b + 1);
    s &= s - 1;
  }
  return out;
}

std::string format_set(VarSet s) {
  auto v = set_members(s);
  std::string out = "{";
  for (auto it = v.rbegin(); it != v.rend(); ++it) {
    if (it != v.rbegin()) out += ",";
    out += std::to_string(*it);
  }
  return out + "}";
}

Topology::Topology(int m, std::vector<VarSet> scopes) : m_(m), scopes_(std::move(scopes)) {
  if (m < 1 || m > kMaxVars) throw std::invalid_argument("m must lie in 1..64");
  if (scopes_.empty()) throw std::invalid_argument("model has no factors");
  const int n = this->n();
  for (VarSet s : scopes_) {
    if (s == 0) throw std::invalid_argument("empty factor scope");
    if (!subset_of(s, full_set(m))) throw std::invalid_argument("scope outside 1..m");
    universe_ |= s;
  }
  if (universe_ != full_set(m)) throw std::invalid_argument("some variable appears in no factor");

  prefix_.assign(n + 1, 0);
  suffix_.assign(n + 2, 0);
  for (int i = 1; i <= n; ++i) prefix_[i] = prefix_[i - 1] | scopes_[i - 1];
  for (int i = n; i >= 1; --i) suffix_[i] = suffix_[i + 1] | scopes_[i - 1];
  nln_.resize(n);
  fa_.resize(n);
  for (int i = 1; i <= n; ++i) {
    nln_[i - 1] = scopes_[i - 1] & ~suffix_[i + 1];
    fa_[i - 1] = scopes_[i - 1] & ~prefix_[i - 1];
  }
}

VarSet Topology::suffix(int i) const { return suffix_[i]; }

VarSet Topology::eta(int i) const { return suffix_[i + 1] & prefix_[i]; }

VarSet Topology::in_process(int i) const {
  return i < n() ? scopes_[i] | scopes_[i - 1] : scopes_[i - 1];
}

Ternary Topology::ternary(int i) const {
  if (i < 1 || i > n()) throw std::out_of_range("split index out of range");
  Ternary t{};
  t.eta = eta(i);
  for (int j = i + 1; j <= n(); ++j) t.fa_after |= fa_[j - 1];
  for (int j = 1; j <= i; ++j) t.nln_before |= nln_[j - 1];
  return t;
}

int Topology::nof_index(VarSet S, VarSet sbar) const {
  for (int i = 1; i <= n(); ++i)
    if (subset_of(sbar, S & in_process(i))) return i;
  return 0;
}

int OccupancyMatrix::at(int var, int factor) const {
  for (size_t r = 0; r < row_vars.size(); ++r)
    for (size_t c = 0; c < col_factors.size(); ++c)
      if (row_vars[r] == var && col_factors[c] == factor) return bits[r][c];
  throw std::out_of_range("no such occupancy entry");
}

OccupancyMatrix build_occupancy_matrix(const Topology& topo) {
  OccupancyMatrix om;
  for (int v = topo.m(); v >= 1; --v) om.row_vars.push_back(v);
  for (int i = topo.n(); i >= 1; --i) om.col_factors.push_back(i);
  for (int v : om.row_vars) {
    std::vector<int> row;
    for (int i : om.col_factors) row.push_back((topo.scope(i) & var_bit(v)) ? 1 : 0);
    om.bits.push_back(std::move(row));
  }
  return om;
}

}  // namespace vbi
