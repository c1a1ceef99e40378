#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace vbi {

// Set of variable indices 1..64 as a bitmask; bit v-1 marks variable v.
using VarSet = std::uint64_t;

constexpr int kMaxVars = 64;

inline VarSet var_bit(int v) { return VarSet{1} << (v - 1); }
inline int set_size(VarSet s) { return std::popcount(s); }
inline bool subset_of(VarSet a, VarSet b) { return (a & ~b) == 0; }
VarSet make_set(std::initializer_list<int> vars);
VarSet make_set(const std::vector<int>& vars);
VarSet full_set(int m);
std::vector<int> set_members(VarSet s);  // ascending
std::string format_set(VarSet s);        // "{5,3,1}", descending, "{}" when empty

struct Ternary {
  VarSet fa_after;    // FA(i+1:n)
  VarSet eta;         // common set at split i
  VarSet nln_before;  // NLN(1:i)
};

// Conditionally-independent topology of an ordered factor list.
// Factor positions are 1-based in the accessors to mirror the usual notation.
class Topology {
 public:
  Topology(int m, std::vector<VarSet> scopes);

  int m() const { return m_; }
  int n() const { return static_cast<int>(scopes_.size()); }
  VarSet universe() const { return universe_; }
  VarSet scope(int i) const { return scopes_[i - 1]; }
  VarSet nln(int i) const { return nln_[i - 1]; }
  VarSet fa(int i) const { return fa_[i - 1]; }
  VarSet prefix(int i) const { return prefix_[i]; }  // omega_1 u ... u omega_i
  VarSet suffix(int i) const;                         // omega_i u ... u omega_n
  VarSet eta(int i) const;
  VarSet in_process(int i) const;  // omega_{i+1} u omega_i
  Ternary ternary(int i) const;

  // smallest i with sbar inside S n A_i, or 0 when none exists
  int nof_index(VarSet S, VarSet sbar) const;

 private:
  int m_;
  std::vector<VarSet> scopes_;
  std::vector<VarSet> nln_, fa_, prefix_, suffix_;
  VarSet universe_ = 0;
};

// Occupancy matrix with rows ordered m..1 and columns omega_n..omega_1.
struct OccupancyMatrix {
  std::vector<int> row_vars;
  std::vector<int> col_factors;
  std::vector<std::vector<int>> bits;
  int at(int var, int factor) const;
};

OccupancyMatrix build_occupancy_matrix(const Topology& topo);

}  // namespace vbi
