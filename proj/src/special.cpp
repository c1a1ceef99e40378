#include "vbi/special.hpp"

#include <numbers>
#include <vector>

namespace vbi {

namespace series {

double bessel_j0(double x) {
  const long double q = -0.25L * x * x;
  long double term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 400; ++k) {
    term *= q / (static_cast<long double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-22L * std::abs(sum) && k > 2) break;
  }
  return static_cast<double>(sum);
}

double bessel_i0(double x) {
  const long double q = 0.25L * x * x;
  long double term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 1000; ++k) {
    term *= q / (static_cast<long double>(k) * k);
    sum += term;
    if (term < 1e-20L * sum) break;
  }
  return static_cast<double>(sum);
}

}  // namespace series

namespace asymptotic {

// Hankel expansion with P, Q summed until the terms stop shrinking.
double bessel_j0(double x) {
  x = std::abs(x);
  const double z = 8.0 * x;
  double P = 1.0, Q = 0.0;
  double t = 1.0, prev = INFINITY;
  for (int k = 1; k < 60; ++k) {
    const double a = 2.0 * k - 1.0;
    t *= -a * a / (k * z);
    if (std::abs(t) >= prev) break;
    prev = std::abs(t);
    const double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 1) Q += sgn * t;
    else P += sgn * t;
    if (std::abs(t) < 1e-17) break;
  }
  const double chi = x - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (P * std::cos(chi) - Q * std::sin(chi));
}

double log_bessel_i0(double x) {
  double s = 1.0, t = 1.0, prev = INFINITY;
  for (int k = 1; k < 60; ++k) {
    const double a = 2.0 * k - 1.0;
    t *= a * a / (8.0 * k * x);
    if (t >= prev) break;
    prev = t;
    s += t;
    if (t < 1e-17) break;
  }
  return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(s);
}

}  // namespace asymptotic

double bessel_j0(double x) {
  x = std::abs(x);
  return x < kBesselSwitch ? series::bessel_j0(x) : asymptotic::bessel_j0(x);
}

double bessel_i0(double x) { return std::exp(log_bessel_i0(x)); }

double log_bessel_i0(double x) {
  x = std::abs(x);
  return x < kBesselSwitch ? std::log(series::bessel_i0(x)) : asymptotic::log_bessel_i0(x);
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw QuadratureError("adaptive Simpson: recursion depth exhausted");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double composite(const std::function<double(double, double)>& f, double ax, double bx, double ay,
                 double by, int N) {
  const double hx = (bx - ax) / N, hy = (by - ay) / N;
  std::vector<double> w(N + 1);
  for (int k = 0; k <= N; ++k) w[k] = (k == 0 || k == N) ? 1.0 : (k % 2 ? 4.0 : 2.0);
  double s = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double x = ax + i * hx;
    double row = 0.0;
    for (int j = 0; j <= N; ++j) row += w[j] * f(x, ay + j * hy);
    s += w[i] * row;
  }
  return s * hx * hy / 9.0;
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double coarse = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // seed the tolerance from a fixed 16-panel estimate so peaked integrands are not missed
  double seed = 0.0;
  const int panels = 16;
  std::vector<double> xs(2 * panels + 1);
  for (int k = 0; k <= 2 * panels; ++k) xs[k] = a + (b - a) * k / (2.0 * panels);
  std::vector<double> fs(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) fs[k] = f(xs[k]);
  // scale by the integral of |f| so integrals that cancel to ~0 stay attainable
  for (int p = 0; p < panels; ++p)
    seed += (xs[2 * p + 2] - xs[2 * p]) / 6.0 *
            (std::abs(fs[2 * p]) + 4.0 * std::abs(fs[2 * p + 1]) + std::abs(fs[2 * p + 2]));
  const double scale = std::max(seed, std::abs(coarse));
  const double tol = rel_tol * (scale > 0.0 ? scale : 1.0);
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double whole =
        (xs[2 * p + 2] - xs[2 * p]) / 6.0 * (fs[2 * p] + 4.0 * fs[2 * p + 1] + fs[2 * p + 2]);
    total += simpson_rec(f, xs[2 * p], xs[2 * p + 2], fs[2 * p], fs[2 * p + 1], fs[2 * p + 2],
                         whole, tol / panels, max_depth);
  }
  return total;
}

double tensor_simpson(const std::function<double(double, double)>& f, double ax, double bx,
                      double ay, double by, int start, double rel_tol, double abs_floor,
                      int max_per_axis) {
  int N = start + (start % 2);
  double prev = composite(f, ax, bx, ay, by, N);
  while (N * 2 <= max_per_axis) {
    N *= 2;
    const double cur = composite(f, ax, bx, ay, by, N);
    const double d = std::abs(cur - prev);
    if (d <= rel_tol * std::abs(cur) || d < abs_floor) return cur;
    prev = cur;
  }
  throw QuadratureError("tensor Simpson did not converge");
}

}  // namespace vbi
