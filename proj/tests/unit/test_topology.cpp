#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vbi/topology.hpp"

using namespace vbi;

namespace {

Topology example5() {
  return Topology(5, {make_set({2, 1}), make_set({3, 2}), make_set({4, 3}), make_set({5, 3, 1})});
}

Topology chain5() {
  return Topology(5, {make_set({2, 1}), make_set({3, 2}), make_set({4, 3}), make_set({5, 4})});
}

std::vector<std::set<int>> as_sets(const Topology& t) {
  std::vector<std::set<int>> w;
  for (int i = 1; i <= t.n(); ++i) w.push_back(oracle::members(t.scope(i)));
  return w;
}

}  // namespace

TEST_CASE("set helpers") {
  CHECK(format_set(make_set({5, 3, 1})) == "{5,3,1}");
  CHECK(format_set(0) == "{}");
  CHECK(set_members(make_set({4, 1, 2})) == std::vector<int>{1, 2, 4});
  CHECK(full_set(3) == make_set({1, 2, 3}));
  CHECK(set_size(full_set(64)) == 64);
}

TEST_CASE("NLN sets of the five-variable example") {
  const auto t = example5();
  CHECK(t.nln(4) == make_set({5, 3, 1}));
  CHECK(t.nln(3) == make_set({4}));
  CHECK(t.nln(2) == make_set({2}));
  CHECK(t.nln(1) == 0);
}

TEST_CASE("NLN sets of the first-order chain") {
  const auto t = chain5();
  CHECK(t.nln(4) == make_set({5, 4}));
  CHECK(t.nln(3) == make_set({3}));
  CHECK(t.nln(2) == make_set({2}));
  CHECK(t.nln(1) == make_set({1}));
}

TEST_CASE("FA sets of the five-variable example") {
  const auto t = example5();
  CHECK(t.fa(1) == make_set({2, 1}));
  CHECK(t.fa(2) == make_set({3}));
  CHECK(t.fa(3) == make_set({4}));
  CHECK(t.fa(4) == make_set({5}));
}

TEST_CASE("ternary partition at i = 3") {
  const auto tp = example5().ternary(3);
  CHECK(tp.eta == make_set({3, 1}));
  CHECK(tp.fa_after == make_set({5}));
  CHECK(tp.nln_before == make_set({4, 2}));
}

TEST_CASE("occupancy matrix of the five-variable example") {
  const auto occ = build_occupancy_matrix(example5());
  CHECK(occ.row_vars == std::vector<int>{5, 4, 3, 2, 1});
  CHECK(occ.col_factors == std::vector<int>{4, 3, 2, 1});
  const std::vector<std::vector<int>> want{
      {1, 0, 0, 0}, {0, 1, 0, 0}, {1, 1, 1, 0}, {0, 0, 1, 1}, {1, 0, 0, 1}};
  CHECK(occ.bits == want);
  CHECK(occ.at(3, 2) == 1);
  CHECK(occ.at(1, 3) == 0);
}

TEST_CASE("NLN and FA are partitions and match the set-algebra oracle") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 300; ++t) {
    const int m = 1 + static_cast<int>(rng() % 8), n = 1 + static_cast<int>(rng() % 6);
    auto model = oracle::random_model<double>(rng, m, 2, n, [](std::mt19937_64&) { return 1.0; });
    const auto topo = model.topology();
    const auto w = as_sets(topo);
    VarSet un = 0, uf = 0;
    for (int i = 1; i <= n; ++i) {
      CHECK(oracle::members(topo.nln(i)) == oracle::nln(w, i));
      CHECK(oracle::members(topo.fa(i)) == oracle::fa(w, i));
      if (i < n) CHECK(oracle::members(topo.eta(i)) == oracle::eta(w, i));
      CHECK((un & topo.nln(i)) == 0);
      CHECK((uf & topo.fa(i)) == 0);
      un |= topo.nln(i);
      uf |= topo.fa(i);
    }
    CHECK(un == topo.universe());
    CHECK(uf == topo.universe());
    for (int i = 1; i < n; ++i) {
      const auto tp = topo.ternary(i);
      // disjoint cover of the in-process set
      CHECK((tp.eta & tp.fa_after) == 0);
      CHECK((tp.eta & tp.nln_before) == 0);
      CHECK((tp.fa_after & tp.nln_before) == 0);
      CHECK((tp.eta | tp.fa_after | tp.nln_before) == topo.universe());
    }
  }
}

TEST_CASE("invalid topologies are rejected") {
  CHECK_THROWS_AS(Topology(3, {make_set({1, 2})}), std::invalid_argument);  // variable 3 unused
  CHECK_THROWS_AS(Topology(2, {make_set({1, 2}), 0}), std::invalid_argument);
  CHECK_THROWS_AS(Topology(2, {make_set({1, 3})}), std::invalid_argument);
  CHECK_THROWS_AS(Topology(2, {}), std::invalid_argument);
}

TEST_CASE("NOF index is the first in-process set covering the objective") {
  const auto t = example5();
  const VarSet S = t.universe();
  CHECK(t.nof_index(S, make_set({2})) == 1);
  CHECK(t.nof_index(S, make_set({4, 3})) == 2);
  CHECK(t.nof_index(S, make_set({5})) == 3);
  CHECK(t.nof_index(S, make_set({5, 2})) == 0);
  CHECK(t.nof_index(make_set({1, 2}), make_set({3})) == 0);
}
