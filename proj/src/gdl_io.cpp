#include <istream>
#include <ostream>
#include <sstream>

#include "vbi/gdl.hpp"

namespace vbi {

std::uint64_t ipow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int k = 0; k < exp; ++k) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base)
      return std::numeric_limits<std::uint64_t>::max();
    r *= base;
  }
  return r;
}

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max()
                                                           : a + b;
}

// cost of summing set s out of a table over d
void tally_sum(OpCount& c, int M, VarSet d, VarSet s) {
  s &= d;
  if (s) c.ring_sum = sat_add(c.ring_sum, ipow(M, set_size(d)) - ipow(M, set_size(d & ~s)));
}

}  // namespace

OpCount count_operators(const Topology& topo, int M, VarSet S, int split, CountMode mode) {
  const int n = topo.n();
  OpCount c;
  if (mode == CountMode::naive || n == 1) {
    VarSet d = topo.scope(1);
    for (int j = 2; j <= n; ++j) {
      d |= topo.scope(j);
      c.ring_product = sat_add(c.ring_product, ipow(M, set_size(d)));
    }
    tally_sum(c, M, d, S);
    return c;
  }
  if (split == 0) split = default_split(n);
  if (mode == CountMode::direct) {
    for (int j = 2; j <= split; ++j)
      c.ring_product = sat_add(c.ring_product, ipow(M, set_size(topo.prefix(j))));
    for (int j = n - 1; j >= split + 1; --j)
      c.ring_product = sat_add(c.ring_product, ipow(M, set_size(topo.suffix(j))));
    c.ring_product = sat_add(c.ring_product, ipow(M, topo.m()));
    tally_sum(c, M, topo.universe(), S);
    return c;
  }
  VarSet fwd = topo.scope(1);
  tally_sum(c, M, fwd, S & topo.nln(1));
  fwd &= ~(S & topo.nln(1));
  for (int j = 2; j <= split; ++j) {
    VarSet u = fwd | topo.scope(j);
    c.ring_product = sat_add(c.ring_product, ipow(M, set_size(u)));
    tally_sum(c, M, u, S & topo.nln(j));
    fwd = u & ~(S & topo.nln(j));
  }
  VarSet bwd = topo.scope(n);
  tally_sum(c, M, bwd, S & topo.fa(n));
  bwd &= ~(S & topo.fa(n));
  for (int j = n - 1; j >= split + 1; --j) {
    VarSet u = bwd | topo.scope(j);
    c.ring_product = sat_add(c.ring_product, ipow(M, set_size(u)));
    tally_sum(c, M, u, S & topo.fa(j));
    bwd = u & ~(S & topo.fa(j));
  }
  VarSet w = fwd | bwd;
  c.ring_product = sat_add(c.ring_product, ipow(M, set_size(w)));
  tally_sum(c, M, w, S & topo.eta(split));
  return c;
}

std::uint64_t phi_fb(const Topology& topo, int M, VarSet S, int split) {
  const int n = topo.n();
  if (n == 1) return ipow(M, set_size(topo.scope(1)));
  if (split == 0) split = default_split(n);
  std::uint64_t phi = 0;
  VarSet fbar = topo.scope(1);
  phi = sat_add(phi, ipow(M, set_size(fbar)));
  for (int j = 2; j <= split; ++j) {
    fbar = topo.scope(j) | (fbar & ~(S & topo.nln(j - 1)));
    phi = sat_add(phi, ipow(M, set_size(fbar)));
  }
  VarSet bbar = topo.scope(n);
  phi = sat_add(phi, ipow(M, set_size(bbar)));
  for (int j = n - 1; j >= split + 1; --j) {
    bbar = topo.scope(j) | (bbar & ~(S & topo.fa(j + 1)));
    phi = sat_add(phi, ipow(M, set_size(bbar)));
  }
  VarSet w = (fbar & ~(S & topo.nln(split))) | (bbar & ~(S & topo.fa(split + 1)));
  return sat_add(phi, ipow(M, set_size(w)));
}

NaiveBounds naive_bounds(const Topology& topo, int M) {
  NaiveBounds b;
  b.lower = ipow(M, topo.m());
  b.upper = ipow(M, topo.m());
  for (int j = 2; j <= topo.n(); ++j) b.upper = sat_add(b.upper, ipow(M, topo.m()));
  return b;
}

bool gdl_applies(const Topology& topo, VarSet S, int split) {
  if (topo.n() == 1) return false;
  if (split == 0) split = default_split(topo.n());
  Ternary t = topo.ternary(split);
  return (S & (t.nln_before | t.fa_after)) != 0;
}

double dual_entropy(const FactorModel<double>& f, const FactorModel<double>& q) {
  f.validate();
  q.validate();
  if (f.m != q.m || f.M != q.M || f.n() != q.n())
    throw std::invalid_argument("f and q models must share variables and factor count");
  FactorModel<Dual> g;
  g.m = f.m;
  g.M = f.M;
  for (int i = 0; i < f.n(); ++i) {
    if (f.factors[i].scope != q.factors[i].scope)
      throw std::invalid_argument("f and q factors must share index sets");
    Factor<Dual> d;
    d.scope = f.factors[i].scope;
    d.table.resize(f.factors[i].table.size());
    for (std::size_t k = 0; k < d.table.size(); ++k) {
      double fv = f.factors[i].table[k];
      if (fv < 0.0) throw std::invalid_argument("f factor has a negative entry");
      d.table[k] = {fv, fv == 0.0 ? 0.0 : fv * safe_log(q.factors[i].table[k])};
    }
    g.factors.push_back(std::move(d));
  }
  Dual total = fb_reduce_single<DualSemiring>(g, g.topology().universe()).table.at(0);
  if (std::abs(total.a - 1.0) > 1e-9) throw std::invalid_argument("f does not sum to one");
  return total.angle();
}

FactorModel<double> read_factor_model(std::istream& in) {
  FactorModel<double> model;
  int n = 0;
  std::string line;
  auto next_line = [&](std::istringstream& ss) {
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ss.clear();
      ss.str(line);
      return true;
    }
    return false;
  };
  std::istringstream ss;
  if (!next_line(ss) || !(ss >> model.m >> model.M >> n) || n < 1)
    throw std::runtime_error("model file: bad header, expected 'm M n'");
  for (int i = 0; i < n; ++i) {
    if (!next_line(ss)) throw std::runtime_error("model file: missing factor line");
    int w = 0;
    if (!(ss >> w) || w < 1) throw std::runtime_error("model file: bad scope size");
    std::vector<int> vars(w);
    for (int& v : vars)
      if (!(ss >> v)) throw std::runtime_error("model file: bad variable index");
    Factor<double> f;
    f.scope = make_set(vars);
    if (set_size(f.scope) != w) throw std::runtime_error("model file: repeated variable in scope");
    f.table.resize(ipow(model.M, w));
    for (double& v : f.table)
      if (!(ss >> v)) throw std::runtime_error("model file: too few table values");
    double extra;
    if (ss >> extra) throw std::runtime_error("model file: too many table values");
    model.factors.push_back(std::move(f));
  }
  model.validate();
  return model;
}

void write_factor_model(std::ostream& out, const FactorModel<double>& model) {
  out << model.m << ' ' << model.M << ' ' << model.n() << '\n';
  out.precision(17);
  for (const auto& f : model.factors) {
    auto vars = set_members(f.scope);
    out << vars.size();
    for (int v : vars) out << ' ' << v;
    for (double v : f.table) out << ' ' << v;
    out << '\n';
  }
}

}  // namespace vbi
