#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace vbi {

// Dual number a + b*eps with eps^2 = 0, i.e. the matrix [[a, b], [0, a]].
struct Dual {
  double a = 0.0;
  double b = 0.0;

  // b/a, the additive part under multiplication
  double angle() const { return b / a; }
  static Dual polar(double magnitude, double angle) { return {magnitude, magnitude * angle}; }
};

inline Dual operator+(Dual x, Dual y) { return {x.a + y.a, x.b + y.b}; }
inline Dual operator*(Dual x, Dual y) { return {x.a * y.a, x.a * y.b + x.b * y.a}; }
inline bool operator==(Dual x, Dual y) { return x.a == y.a && x.b == y.b; }

namespace detail {
inline bool close_rel(double x, double y, double tol) {
  double scale = std::max({1.0, std::abs(x), std::abs(y)});
  return std::abs(x - y) <= tol * scale;
}
}  // namespace detail

// Each semiring type provides value_type, add (ring-sum), mul (ring-product),
// sample() for law checks and close() for comparisons.  None is required to
// have identities (pre-semiring); has_identities records whether they exist.

struct SumProduct {
  using value_type = double;
  static constexpr const char* name = "sum-product";
  static constexpr const char* domain = "nonnegative reals";
  static constexpr bool has_identities = true;
  static constexpr bool exact = false;
  static double add(double x, double y) { return x + y; }
  static double mul(double x, double y) { return x * y; }
  template <class Rng>
  static double sample(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 2.0)(rng); }
  static bool close(double x, double y, double tol = 1e-12) { return detail::close_rel(x, y, tol); }
};

struct MaxProduct {
  using value_type = double;
  static constexpr const char* name = "max-product";
  static constexpr const char* domain = "nonnegative reals";
  static constexpr bool has_identities = true;
  static constexpr bool exact = false;
  static double add(double x, double y) { return x < y ? y : x; }
  static double mul(double x, double y) { return x * y; }
  template <class Rng>
  static double sample(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 2.0)(rng); }
  static bool close(double x, double y, double tol = 1e-12) { return detail::close_rel(x, y, tol); }
};

// log domain: ring-product is +, ring-sum is max
struct MaxSum {
  using value_type = double;
  static constexpr const char* name = "max-sum";
  static constexpr const char* domain = "reals (log domain)";
  static constexpr bool has_identities = true;
  static constexpr bool exact = false;
  static double add(double x, double y) { return x < y ? y : x; }
  static double mul(double x, double y) { return x + y; }
  template <class Rng>
  static double sample(Rng& rng) { return std::uniform_real_distribution<double>(-5.0, 5.0)(rng); }
  static bool close(double x, double y, double tol = 1e-12) { return detail::close_rel(x, y, tol); }
};

struct DualSemiring {
  using value_type = Dual;
  static constexpr const char* name = "dual-number";
  static constexpr const char* domain = "dual numbers";
  static constexpr bool has_identities = true;
  static constexpr bool exact = false;
  static Dual add(Dual x, Dual y) { return x + y; }
  static Dual mul(Dual x, Dual y) { return x * y; }
  template <class Rng>
  static Dual sample(Rng& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    return {u(rng), u(rng)};
  }
  static bool close(Dual x, Dual y, double tol = 1e-12) {
    return detail::close_rel(x.a, y.a, tol) && detail::close_rel(x.b, y.b, tol);
  }
};

struct LawReport {
  int samples = 0;
  int add_assoc_fail = 0;
  int add_comm_fail = 0;
  int mul_assoc_fail = 0;
  int mul_comm_fail = 0;
  int distrib_fail = 0;
  bool ok() const {
    return add_assoc_fail + add_comm_fail + mul_assoc_fail + mul_comm_fail + distrib_fail == 0;
  }
};

template <class SR, class Rng>
LawReport check_semiring_laws(Rng& rng, int samples = 100) {
  LawReport r;
  r.samples = samples;
  for (int s = 0; s < samples; ++s) {
    auto a = SR::sample(rng), b = SR::sample(rng), c = SR::sample(rng);
    if (!SR::close(SR::add(SR::add(a, b), c), SR::add(a, SR::add(b, c)))) ++r.add_assoc_fail;
    if (!SR::close(SR::add(a, b), SR::add(b, a))) ++r.add_comm_fail;
    if (!SR::close(SR::mul(SR::mul(a, b), c), SR::mul(a, SR::mul(b, c)))) ++r.mul_assoc_fail;
    if (!SR::close(SR::mul(a, b), SR::mul(b, a))) ++r.mul_comm_fail;
    if (!SR::close(SR::mul(a, SR::add(b, c)), SR::add(SR::mul(a, b), SR::mul(a, c))))
      ++r.distrib_fail;
  }
  return r;
}

// Runs the law check once per semiring type on first use.
template <class SR>
const LawReport& registered_semiring() {
  static const LawReport report = [] {
    std::mt19937_64 rng(0x5eed);
    LawReport r = check_semiring_laws<SR>(rng, 100);
    if (!r.ok()) throw std::logic_error(std::string("semiring laws violated: ") + SR::name);
    return r;
  }();
  return report;
}

}  // namespace vbi
