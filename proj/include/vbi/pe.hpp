#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

namespace vbi {

// Bivariate power exponential density
//   f(t) = sqrt(2) / pi^{3/2} |S|^{-1/2} exp(-0.5 ((t-mu)' S^{-1} (t-mu))^2).
struct PeModel {
  Eigen::Vector2d mu{2.5, 1.0};
  double sigma1 = 0.5, sigma2 = 1.5, rho = 0.0;
  Eigen::Matrix2d Sigma() const;
  double log_density(const Eigen::Vector2d& t) const;
  void validate() const;
};

enum class PeMethod { vb, tvb_eigen, tvb_ldu };
PeMethod parse_pe_method(const std::string& s);

// VB marginal in a standardized coordinate:
//   g(t) = exp(-c (t^4 + a3 t^3 + a2 t^2 + a1 t) - logZ)
struct QuarticMarginal {
  double c = 0.5, a3 = 0.0, a2 = 0.0, a1 = 0.0;
  double logZ = 0.0;
  std::array<double, 3> moments{};  // E t, E t^2, E t^3
  double log_pdf(double t) const { return -c * (t * (t * (t * (t + a3) + a2) + a1)) - logZ; }
};

struct PeApprox {
  PeMethod method = PeMethod::vb;
  Eigen::Matrix2d A = Eigen::Matrix2d::Identity();  // phi = A (theta - mu)
  Eigen::Vector2d scale{1.0, 1.0};                    // phi_i = scale_i * t_i
  double rho_eff = 0.0;                               // correlation in the standardized frame
  std::array<QuarticMarginal, 2> marg;
  int cycles = 0;
  double kld = 0.0;
  double log_density(const Eigen::Vector2d& theta, const Eigen::Vector2d& mu) const;
};

// Coordinate-ascent VB for exp(-0.5 (x^2 - 2 r x y + y^2)^2 / (1-r^2)^2).
std::array<QuarticMarginal, 2> pe_vb_standardized(double r, int* cycles = nullptr,
                                                  double tol = 1e-12, int max_cycles = 500);

PeApprox pe_approximate(const PeModel& model, PeMethod method);

// KL(approx || f) by tensor Simpson on mu +- 8 sigma.
double pe_kld(const PeModel& model, const PeApprox& approx);

}  // namespace vbi
