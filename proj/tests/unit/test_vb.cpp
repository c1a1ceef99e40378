#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vbi/vb.hpp"

using namespace vbi;

TEST_CASE("KS distance") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const int M = 1 + static_cast<int>(rng() % 6);
    std::vector<double> p(M), q(M);
    for (int k = 0; k < M; ++k) {
      p[k] = u(rng);
      q[k] = u(rng);
    }
    CHECK(ks_distance(p.data(), q.data(), M) == doctest::Approx(oracle::ks(p, q)).epsilon(1e-14));
    CHECK(ks_distance(p.data(), p.data(), M) == 0.0);
  }
  Vec a(2), b(2);
  a << 1.0, 0.0;
  b << 0.0, 1.0;
  CHECK(ks_distance(a, b) == 1.0);
  CHECK_THROWS_AS(ks_distance(a, Vec::Zero(3)), std::invalid_argument);
}

TEST_CASE("initial shaping") {
  RowMat psi(2, 3);
  psi << 0.0, 1.0, 0.0, 2.0, 1.0, 1.0;
  const auto ml = init_shaping(InitMode::ml, psi);
  CHECK(ml(0, 1) == 1.0);
  CHECK(ml(1, 0) == 0.5);
  const auto un = init_shaping(InitMode::uniform, psi);
  CHECK(un(1, 2) == doctest::Approx(1.0 / 3));
  psi.row(0).setZero();
  CHECK_THROWS_AS(init_shaping(InitMode::ml, psi), DegenerateObservation);
}

TEST_CASE("accelerated IVB with zero threshold reproduces plain IVB") {
  std::mt19937_64 rng(2);
  int converged = 0;
  for (int t = 0; t < 200; ++t) {
    const int M = 2 + static_cast<int>(rng() % 3), n = 2 + static_cast<int>(rng() % 30);
    const auto model = oracle::random_hmc(rng, M, n);
    const auto init = init_shaping(t % 2 ? InitMode::ml : InitMode::uniform, model.Psi);
    StoppingConfig plain{0.0, 500, false}, acc{0.0, 500, true};
    const auto a = ivb_run(model, init, plain), b = ivb_run(model, init, acc);
    CHECK(a.converged == b.converged);
    converged += a.converged;
    CHECK(a.nu_c == b.nu_c);
    CHECK(a.labels == b.labels);
    CHECK((a.p - b.p).cwiseAbs().maxCoeff() == 0.0);
    CHECK(b.updates <= a.updates);
  }
  CHECK(converged > 0);
}

TEST_CASE("accelerated FCVB reproduces plain FCVB") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const int M = 2 + static_cast<int>(rng() % 4), n = 2 + static_cast<int>(rng() % 40);
    const auto model = oracle::random_hmc(rng, M, n);
    const auto init = ml_detect(model.Psi);
    const auto a = fcvb_run(model, init, {0.01, 500, false});
    const auto b = fcvb_run(model, init, {0.01, 500, true});
    CHECK(a.converged);
    CHECK(a.labels == b.labels);
    CHECK(a.nu_c == b.nu_c);
    CHECK(b.nu_e <= a.nu_e);
    CHECK(a.nu_e == static_cast<double>(a.nu_c));
  }
}

TEST_CASE("FCVB converges to a coordinate-wise maximum of the joint posterior") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const int M = 2 + static_cast<int>(rng() % 3), n = 1 + static_cast<int>(rng() % 6);
    const auto model = oracle::random_hmc(rng, M, n);
    const auto J = oracle::joint(model);
    const auto r = fcvb_run(model, ml_detect(model.Psi), {});
    REQUIRE(r.converged);
    const double at = oracle::path_prob(J, r.labels);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < M; ++k) {
        auto l = r.labels;
        l[i] = k;
        CHECK(oracle::path_prob(J, l) <= at * (1 + 1e-12));
      }
  }
}

TEST_CASE("KLD is non-increasing over plain IVB cycles") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const int M = 2 + static_cast<int>(rng() % 3), n = 2 + static_cast<int>(rng() % 30);
    const auto model = oracle::random_hmc(rng, M, n);
    const auto sm = fb_algorithm(model);
    const auto init = init_shaping(InitMode::uniform, model.Psi);
    double prev = kld_vb(model, sm, init);
    bool monotone = true;
    ivb_run(model, init, {0.0, 500, false}, nullptr, [&](int, const RowMat& p) {
      const double k = kld_vb(model, sm, p);
      if (k > prev + 1e-9) monotone = false;
      prev = k;
    });
    CHECK(monotone);
    CHECK(prev >= -1e-12);
  }
}

TEST_CASE("KLD formula matches exhaustive summation") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const auto model = oracle::random_hmc(rng, 2, n);
    RowMat q(n, 2);
    for (int i = 0; i < n; ++i) {
      q(i, 0) = u(rng);
      q(i, 1) = u(rng);
      q.row(i) /= q.row(i).sum();
    }
    const auto sm = fb_algorithm(model);
    const double want = oracle::kld(oracle::joint(model), q);
    CHECK(std::abs(kld_vb(model, sm, q) - want) < 1e-9);
    CHECK(std::abs(kld_vb(sm, posterior_chain_factors(model, sm), q) - want) < 1e-9);
  }
}

TEST_CASE("IVB on a single site is exact") {
  std::mt19937_64 rng(7);
  const auto model = oracle::random_hmc(rng, 4, 1);
  const auto r = ivb_run(model, init_shaping(InitMode::uniform, model.Psi), {});
  CHECK((r.p - fb_algorithm(model).gamma).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("independent labels: VB equals the exact marginals") {
  // T with identical columns makes the labels independent a priori
  std::mt19937_64 rng(8);
  auto model = oracle::random_hmc(rng, 3, 6);
  for (int c = 1; c < 3; ++c) model.T.col(c) = model.T.col(0);
  model.p = model.T.col(0);
  const auto r = ivb_run(model, init_shaping(InitMode::uniform, model.Psi), {0.0, 100, false});
  CHECK((r.p - fb_algorithm(model).gamma).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("invalid inputs") {
  std::mt19937_64 rng(9);
  const auto model = oracle::random_hmc(rng, 3, 4);
  CHECK_THROWS_AS(ivb_run(model, RowMat::Zero(3, 3), {}), std::invalid_argument);
  CHECK_THROWS_AS(ivb_run(model, init_shaping(InitMode::uniform, model.Psi), {-1.0, 10, false}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fcvb_run(model, Labels{0, 1}, {}), std::invalid_argument);
  CHECK_THROWS_AS(fcvb_run(model, Labels{0, 1, 2, 3}, {}), std::invalid_argument);
}
