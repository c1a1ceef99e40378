#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace vbi {

// Argument where the Bessel routines leave the power series for the
// asymptotic expansions.
constexpr double kBesselSwitch = 15.0;

double bessel_j0(double x);
double bessel_i0(double x);
double log_bessel_i0(double x);

namespace series {
double bessel_j0(double x);
double bessel_i0(double x);
}  // namespace series
namespace asymptotic {
double bessel_j0(double x);
double log_bessel_i0(double x);
}  // namespace asymptotic

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive Simpson on [a, b] to relative tolerance rel_tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, int max_depth = 50);

// Composite tensor Simpson on [ax,bx] x [ay,by] starting from `start`
// sub-intervals per axis and doubling until the relative change is below
// rel_tol (or the absolute change below abs_floor).
double tensor_simpson(const std::function<double(double, double)>& f, double ax, double bx,
                      double ay, double by, int start = 64, double rel_tol = 1e-8,
                      double abs_floor = 1e-14, int max_per_axis = 4096);

}  // namespace vbi
