#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vbi/pe.hpp"
#include "vbi/special.hpp"

using namespace vbi;

TEST_CASE("power-exponential density is normalized") {
  PeModel m;
  m.rho = 0.6;
  auto f = [&](double a, double b) { return std::exp(m.log_density(Eigen::Vector2d(a, b))); };
  const double z = tensor_simpson(f, m.mu(0) - 8 * m.sigma1, m.mu(0) + 8 * m.sigma1, m.mu(1) - 8 * m.sigma2,
                                  m.mu(1) + 8 * m.sigma2);
  CHECK(z == doctest::Approx(1.0).epsilon(1e-7));
  m.rho = 1.0;
  CHECK_THROWS(m.validate());
}

TEST_CASE("VB marginals are normalized and match their moments") {
  int cycles = 0;
  const auto g = pe_vb_standardized(0.5, &cycles);
  CHECK(cycles > 1);
  for (const auto& q : g) {
    const double z = adaptive_simpson([&](double t) { return std::exp(q.log_pdf(t)); }, -8, 8, 1e-12);
    CHECK(z == doctest::Approx(1.0).epsilon(1e-7));
    const double m1 = adaptive_simpson([&](double t) { return t * std::exp(q.log_pdf(t)); }, -8, 8, 1e-12);
    CHECK(std::abs(m1 - q.moments[0]) < 1e-7);
  }
  // coordinate ascent fixed point: each marginal's coefficients use the other's moments
  CHECK(g[0].a2 == doctest::Approx((2 + 4 * 0.25) * g[1].moments[1]).epsilon(1e-10));
  CHECK(g[1].a3 == doctest::Approx(-4 * 0.5 * g[0].moments[0]).epsilon(1e-10));
}

TEST_CASE("transforms are unit-determinant decorrelators") {
  PeModel m;
  m.rho = 0.7;
  const Eigen::Matrix2d P = m.Sigma().inverse();
  for (auto method : {PeMethod::tvb_eigen, PeMethod::tvb_ldu}) {
    const auto a = pe_approximate(m, method);
    CHECK(std::abs(std::abs(a.A.determinant()) - 1.0) < 1e-12);
    // A^{-T} P A^{-1} is diagonal
    const Eigen::Matrix2d Ai = a.A.inverse();
    const Eigen::Matrix2d D = Ai.transpose() * P * Ai;
    CHECK(std::abs(D(0, 1)) < 1e-10);
    CHECK(a.scale(0) == doctest::Approx(1.0 / std::sqrt(D(0, 0))));
    CHECK(a.rho_eff == 0.0);
  }
}

TEST_CASE("zero correlation: VB and TVB coincide") {
  PeModel m;
  m.rho = 0.0;
  const double v = pe_approximate(m, PeMethod::vb).kld;
  CHECK(v > 0.0);
  CHECK(std::abs(pe_approximate(m, PeMethod::tvb_eigen).kld - v) < 1e-6);
  CHECK(std::abs(pe_approximate(m, PeMethod::tvb_ldu).kld - v) < 1e-6);
}

TEST_CASE("TVB is no worse than VB and nearly invariant in rho") {
  double lo = 1e300, hi = 0.0;
  for (double r : {0.2, 0.5, 0.8}) {
    PeModel m;
    m.rho = r;
    const double v = pe_approximate(m, PeMethod::vb).kld;
    const double t = pe_approximate(m, PeMethod::tvb_eigen).kld;
    CHECK(t <= v);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  CHECK((hi - lo) / lo < 0.05);
}

TEST_CASE("method names") {
  CHECK(parse_pe_method("vb") == PeMethod::vb);
  CHECK(parse_pe_method("tvb") == PeMethod::tvb_eigen);
  CHECK(parse_pe_method("ldu") == PeMethod::tvb_ldu);
  CHECK_THROWS(parse_pe_method("nope"));
}
