#include "selftest.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "vbi/gdl.hpp"
#include "vbi/hmc.hpp"
#include "vbi/vb.hpp"

namespace {

using vbi::HmcModel;

HmcModel random_hmc(std::mt19937_64& rng, int M, int n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  HmcModel m;
  m.T.resize(M, M);
  for (int r = 0; r < M; ++r)
    for (int c = 0; c < M; ++c) m.T(r, c) = u(rng);
  for (int c = 0; c < M; ++c) m.T.col(c) /= m.T.col(c).sum();
  m.p = vbi::Vec::NullaryExpr(M, [&] { return u(rng); });
  m.p /= m.p.sum();
  m.Psi = vbi::RowMat::NullaryExpr(n, M, [&] { return u(rng); });
  return m;
}

template <class V, class Gen>
vbi::FactorModel<V> random_model(std::mt19937_64& rng, Gen gen) {
  std::uniform_int_distribution<int> dm(2, 6), dM(2, 3), dn(2, 5), dw(1, 3);
  vbi::FactorModel<V> model;
  model.m = dm(rng);
  model.M = dM(rng);
  const int n = dn(rng);
  std::uniform_int_distribution<int> var(1, model.m), pick(0, n - 1);
  std::vector<vbi::VarSet> scopes(n, 0);
  for (auto& s : scopes)
    for (int k = dw(rng); k > 0; --k) s |= vbi::var_bit(var(rng));
  for (int v = 1; v <= model.m; ++v) {
    bool covered = false;
    for (auto s : scopes) covered |= (s & vbi::var_bit(v)) != 0;
    if (!covered) scopes[pick(rng)] |= vbi::var_bit(v);
  }
  for (auto s : scopes) {
    vbi::Factor<V> f;
    f.scope = s;
    f.table.resize(vbi::ipow(model.M, vbi::set_size(s)));
    for (auto& x : f.table) x = gen(rng);
    model.factors.push_back(std::move(f));
  }
  return model;
}

template <class SR>
bool gdl_agrees(std::mt19937_64& rng, int instances) {
  for (int t = 0; t < instances; ++t) {
    auto model = random_model<typename SR::value_type>(
        rng, [](std::mt19937_64& r) { return SR::sample(r); });
    std::uniform_int_distribution<vbi::VarSet> ds(0, vbi::full_set(model.m));
    const vbi::VarSet S = ds(rng);
    const auto a = vbi::naive_reduce<SR>(model, S);
    const auto b = vbi::fb_reduce_single<SR>(model, S);
    if (a.scope != b.scope || a.table.size() != b.table.size()) return false;
    for (std::size_t k = 0; k < a.table.size(); ++k)
      if (!SR::close(a.table[k], b.table[k], 1e-9)) return false;
  }
  return true;
}

}  // namespace

int run_selftest(std::ostream& out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dM(2, 4), dn(1, 6);
  int failures = 0;
  auto report = [&](const std::string& name, bool ok) {
    out << (ok ? "PASS  " : "FAIL  ") << name << '\n';
    failures += !ok;
  };

  bool fb_ok = true, va_ok = true, fcvb_ok = true;
  for (int t = 0; t < 100; ++t) {
    const auto model = random_hmc(rng, dM(rng), dn(rng));
    const vbi::BruteForcePosterior bf(model);
    const auto sm = vbi::fb_algorithm(model);
    if ((sm.gamma - bf.marginals()).cwiseAbs().maxCoeff() > 1e-10) fb_ok = false;
    if (vbi::viterbi(model).labels != bf.decode(bf.joint_argmax())) va_ok = false;
    // FCVB fixed points are coordinate-wise maxima of the joint posterior
    const auto fc = vbi::fcvb_run(model, vbi::ml_detect(model.Psi), {});
    if (!fc.converged) {
      fcvb_ok = false;
      continue;
    }
    const double at = bf.log_prob(bf.encode(fc.labels));
    for (int i = 0; i < model.n(); ++i)
      for (int k = 0; k < model.M(); ++k) {
        auto l = fc.labels;
        l[i] = k;
        if (bf.log_prob(bf.encode(l)) > at + 1e-12) fcvb_ok = false;
      }
  }
  report("forward-backward marginals vs enumeration (100 chains)", fb_ok);
  report("Viterbi path vs enumerated joint argmax (100 chains)", va_ok);
  report("FCVB fixed point is a coordinate-wise maximum (100 chains)", fcvb_ok);

  report("GDL sum-product vs naive (50 models)", gdl_agrees<vbi::SumProduct>(rng, 50));
  report("GDL max-product vs naive (50 models)", gdl_agrees<vbi::MaxProduct>(rng, 50));
  report("GDL max-sum vs naive (50 models)", gdl_agrees<vbi::MaxSum>(rng, 50));
  report("GDL dual-number vs naive (50 models)", gdl_agrees<vbi::DualSemiring>(rng, 50));
  out << (failures == 0 ? "selftest passed" : "selftest FAILED") << '\n';
  return failures;
}
