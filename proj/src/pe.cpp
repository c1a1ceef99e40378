#include "vbi/pe.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vbi/special.hpp"

namespace vbi {

namespace {
constexpr double kSpan = 8.0;
constexpr double kRelTol = 1e-7;
}  // namespace

Eigen::Matrix2d PeModel::Sigma() const {
  Eigen::Matrix2d S;
  S << sigma1 * sigma1, rho * sigma1 * sigma2, rho * sigma1 * sigma2, sigma2 * sigma2;
  return S;
}

void PeModel::validate() const {
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) throw std::invalid_argument("PE scales must be positive");
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("PE correlation must lie in (-1, 1)");
}

double PeModel::log_density(const Eigen::Vector2d& t) const {
  const Eigen::Matrix2d S = Sigma();
  const Eigen::Vector2d d = t - mu;
  const double u = d.dot(S.inverse() * d);
  return 0.5 * std::log(2.0) - 1.5 * std::log(std::numbers::pi) - 0.5 * std::log(S.determinant()) -
         0.5 * u * u;
}

PeMethod parse_pe_method(const std::string& s) {
  if (s == "vb") return PeMethod::vb;
  if (s == "tvb" || s == "tvb-eigen" || s == "eigen") return PeMethod::tvb_eigen;
  if (s == "tvb-ldu" || s == "ldu") return PeMethod::tvb_ldu;
  throw std::invalid_argument("unknown PE method: " + s);
}

double PeApprox::log_density(const Eigen::Vector2d& theta, const Eigen::Vector2d& mu) const {
  const Eigen::Vector2d phi = A * (theta - mu);
  return marg[0].log_pdf(phi(0) / scale(0)) - std::log(scale(0)) + marg[1].log_pdf(phi(1) / scale(1)) -
         std::log(scale(1));
}

namespace {

void fit_marginal(QuarticMarginal& g) {
  auto kernel = [&g](double t) { return -g.c * (t * (t * (t * (t + g.a3) + g.a2) + g.a1)); };
  // shift by the kernel maximum on a coarse scan to keep exp() in range
  double kmax = -INFINITY;
  for (int k = -800; k <= 800; ++k) kmax = std::max(kmax, kernel(k * kSpan / 800.0));
  auto w = [&](double t) { return std::exp(kernel(t) - kmax); };
  const double z = adaptive_simpson(w, -kSpan, kSpan, kRelTol * 1e-2);
  g.logZ = kmax + std::log(z);
  for (int p = 1; p <= 3; ++p)
    g.moments[p - 1] =
        adaptive_simpson([&](double t) { return std::pow(t, p) * w(t); }, -kSpan, kSpan,
                         kRelTol * 1e-2) /
        z;
}

}  // namespace

std::array<QuarticMarginal, 2> pe_vb_standardized(double r, int* cycles, double tol,
                                                  int max_cycles) {
  const double c = 0.5 / ((1.0 - r * r) * (1.0 - r * r));
  std::array<QuarticMarginal, 2> g;
  // start from unit-variance, zero-mean moments for the partner coordinate
  std::array<std::array<double, 3>, 2> mom{{{0.0, 1.0, 0.0}, {0.0, 1.0, 0.0}}};
  int nu = 0;
  for (nu = 1; nu <= max_cycles; ++nu) {
    double change = 0.0;
    for (int i = 0; i < 2; ++i) {
      const auto& o = mom[1 - i];
      g[i].c = c;
      g[i].a3 = -4.0 * r * o[0];
      g[i].a2 = (2.0 + 4.0 * r * r) * o[1];
      g[i].a1 = -4.0 * r * o[2];
      fit_marginal(g[i]);
      for (int p = 0; p < 3; ++p) change = std::max(change, std::abs(g[i].moments[p] - mom[i][p]));
      mom[i] = g[i].moments;
    }
    if (change < tol) break;
  }
  if (cycles) *cycles = std::min(nu, max_cycles);
  return g;
}

PeApprox pe_approximate(const PeModel& model, PeMethod method) {
  model.validate();
  PeApprox a;
  a.method = method;
  if (method == PeMethod::vb) {
    a.A = Eigen::Matrix2d::Identity();
    a.scale = {model.sigma1, model.sigma2};
    a.rho_eff = model.rho;
  } else {
    const Eigen::Matrix2d P = model.Sigma().inverse();
    Eigen::Vector2d d;
    if (method == PeMethod::tvb_eigen) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(P);
      a.A = es.eigenvectors().transpose();
      d = es.eigenvalues();
    } else {
      a.A << 1.0, P(0, 1) / P(0, 0), 0.0, 1.0;
      d << P(0, 0), P(1, 1) - P(0, 1) * P(0, 1) / P(0, 0);
    }
    a.scale = d.cwiseInverse().cwiseSqrt();
    a.rho_eff = 0.0;
  }
  a.marg = pe_vb_standardized(a.rho_eff, &a.cycles);
  a.kld = pe_kld(model, a);
  return a;
}

double pe_kld(const PeModel& model, const PeApprox& approx) {
  const double s1 = model.sigma1, s2 = model.sigma2;
  // integrate over standardized (x, y) with theta = mu + (s1 x, s2 y)
  auto integrand = [&](double x, double y) {
    const Eigen::Vector2d th = model.mu + Eigen::Vector2d(s1 * x, s2 * y);
    const double lq = approx.log_density(th, model.mu);
    const double q = std::exp(lq);
    if (q == 0.0) return 0.0;
    return s1 * s2 * q * (lq - model.log_density(th));
  };
  return tensor_simpson(integrand, -kSpan, kSpan, -kSpan, kSpan, 64, kRelTol, 1e-14, 2048);
}

}  // namespace vbi
