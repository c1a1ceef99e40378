#include <doctest.h>

#include <random>

#include "vbi/semiring.hpp"

using namespace vbi;

TEST_CASE_TEMPLATE("semiring laws hold on random samples", SR, SumProduct, MaxProduct, MaxSum,
                   DualSemiring) {
  std::mt19937_64 rng(11);
  const auto r = check_semiring_laws<SR>(rng, 1000);
  CHECK(r.ok());
  CHECK(registered_semiring<SR>().ok());
}

TEST_CASE("dual numbers: product multiplies magnitudes and adds angles") {
  const Dual x = Dual::polar(2.0, 0.25), y = Dual::polar(3.0, -1.5);
  const Dual p = x * y;
  CHECK(p.a == doctest::Approx(6.0));
  CHECK(p.angle() == doctest::Approx(-1.25));
  // eps^2 = 0
  const Dual e{0.0, 1.0};
  CHECK((e * e) == Dual{0.0, 0.0});
}

TEST_CASE("max-sum is the log image of max-product") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int k = 0; k < 100; ++k) {
    const double a = u(rng), b = u(rng);
    CHECK(MaxSum::add(std::log(a), std::log(b)) == doctest::Approx(std::log(MaxProduct::add(a, b))));
    CHECK(MaxSum::mul(std::log(a), std::log(b)) == doctest::Approx(std::log(MaxProduct::mul(a, b))));
  }
}

namespace {
// min is not distributive over + on signed reals when used as ring-product,
// so swapping the roles must be caught.
struct Broken {
  using value_type = double;
  static constexpr const char* name = "broken";
  static double add(double x, double y) { return x * y; }
  static double mul(double x, double y) { return x + y; }
  template <class Rng>
  static double sample(Rng& rng) { return std::uniform_real_distribution<double>(-2.0, 2.0)(rng); }
  static bool close(double x, double y, double tol = 1e-12) { return detail::close_rel(x, y, tol); }
};
}  // namespace

TEST_CASE("law check rejects a structure without distributivity") {
  std::mt19937_64 rng(5);
  const auto r = check_semiring_laws<Broken>(rng, 50);
  CHECK_FALSE(r.ok());
  CHECK(r.distrib_fail > 0);
  CHECK_THROWS_AS(registered_semiring<Broken>(), std::logic_error);
}
