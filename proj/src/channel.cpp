#include "vbi/channel.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "vbi/special.hpp"

namespace vbi {

QamConstellation qam_constellation(int M) {
  QamConstellation q;
  q.M = M;
  if (M == 2) {
    q.bits = 1;
    q.points = {cplx(1.0, 0.0), cplx(-1.0, 0.0)};
    q.gray = {0u, 1u};
    return q;
  }
  if (M != 4 && M != 16 && M != 64) throw std::invalid_argument("unsupported QAM order");
  q.bits = std::countr_zero(static_cast<unsigned>(M));
  const int L = 1 << (q.bits / 2);
  const double d = std::sqrt(3.0 * q.bits / (2.0 * (L * L - 1)));
  for (int k = 0; k < M; ++k) {
    const unsigned I = k / L, Q = k % L;
    q.points.emplace_back((2.0 * I - (L - 1)) * d, (2.0 * Q - (L - 1)) * d);
    q.gray.push_back(((I ^ (I >> 1)) << (q.bits / 2)) | (Q ^ (Q >> 1)));
  }
  return q;
}

RowMat random_transition_matrix(int M, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RowMat T(M, M);
  for (int r = 0; r < M; ++r)
    for (int c = 0; c < M; ++c) T(r, c) = u(rng);
  for (int c = 0; c < M; ++c) T.col(c) /= T.col(c).sum();
  return T;
}

MarkovSource random_source(int M, Rng& rng) {
  return {random_transition_matrix(M, rng), Vec::Constant(M, 1.0 / M)};
}

namespace {

template <class Col>
int draw_from(const Col& pmf, double u) {
  const int M = static_cast<int>(pmf.size());
  double c = 0.0;
  for (int k = 0; k < M - 1; ++k) {
    c += pmf(k);
    if (u < c) return k;
  }
  return M - 1;
}

}  // namespace

Labels draw_chain(const RowMat& T, const Vec& p, int n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Labels l(n);
  l[0] = draw_from(p, u(rng));
  for (int i = 1; i < n; ++i) l[i] = draw_from(T.col(l[i - 1]), u(rng));
  return l;
}

double noise_density(double ebn0_db) { return std::pow(10.0, -ebn0_db / 10.0); }

RowMat soft_classify(const std::vector<cplx>& x, const std::vector<cplx>& means, double N0) {
  const int n = static_cast<int>(x.size()), M = static_cast<int>(means.size());
  RowMat Psi(n, M);
  std::vector<double> d(M);
  for (int i = 0; i < n; ++i) {
    double dmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < M; ++k) {
      d[k] = std::norm(x[i] - means[k]);
      dmin = std::min(dmin, d[k]);
    }
    for (int k = 0; k < M; ++k) Psi(i, k) = std::exp(-(d[k] - dmin) / N0);
  }
  return Psi;
}

AwgnTrial simulate_awgn_trial(const MarkovSource& src, const QamConstellation& qam,
                              double ebn0_db, int n, Rng& rng) {
  AwgnTrial t;
  t.truth = draw_chain(src.T, src.p, n, rng);
  const double N0 = noise_density(ebn0_db);
  std::normal_distribution<double> g(0.0, std::sqrt(N0 / 2.0));
  t.x.resize(n);
  for (int i = 0; i < n; ++i) {
    const double re = g(rng), im = g(rng);
    t.x[i] = qam.points[t.truth[i]] + cplx(re, im);
  }
  t.model.T = src.T;
  t.model.p = src.p;
  t.model.Psi = soft_classify(t.x, qam.points, N0);
  return t;
}

double rho_from_doppler(double fdts) {
  if (fdts < 0.0) throw std::invalid_argument("f_D T_s must be >= 0");
  return bessel_j0(2.0 * std::numbers::pi * fdts);
}

double rayleigh_cdf(double g, double sigma2) {
  return g <= 0.0 ? 0.0 : -std::expm1(-g * g / (2.0 * sigma2));
}

double bivariate_rayleigh_log_density(double g1, double g2, double sigma2, double rho) {
  if (g1 <= 0.0 || g2 <= 0.0) return -std::numeric_limits<double>::infinity();
  const double c = 1.0 - rho * rho;
  return std::log(g1) + std::log(g2) - 2.0 * std::log(sigma2) - std::log(c) -
         (g1 * g1 + g2 * g2) / (2.0 * sigma2 * c) +
         log_bessel_i0(g1 * g2 * std::abs(rho) / (sigma2 * c));
}

RayleighQuantizer rayleigh_quantizer(int K, double sigma2, double rho) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma^2 must be positive");
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("|rho| must be < 1");
  RayleighQuantizer q;
  q.K = K;
  q.sigma2 = sigma2;
  q.rho = rho;
  q.zeta.resize(K + 1);
  q.zeta[0] = 0.0;
  for (int k = 1; k < K; ++k)
    q.zeta[k] = std::sqrt(-2.0 * sigma2 * std::log(1.0 - static_cast<double>(k) / K));
  q.zeta[K] = 5.0 * std::sqrt(2.0 * sigma2);

  auto pdf = [sigma2](double g) { return g / sigma2 * std::exp(-g * g / (2.0 * sigma2)); };
  double total = 0.0;
  for (int k = 1; k <= K; ++k) {
    const double a = q.zeta[k - 1], b = q.zeta[k];
    const double mass = rayleigh_cdf(b, sigma2) - rayleigh_cdf(a, sigma2);
    const double first = adaptive_simpson([&](double g) { return g * pdf(g); }, a, b, 1e-12);
    q.mass.push_back(mass);
    q.levels.push_back(first / mass);
    total += mass;
  }
  q.tail_residual = 1.0 - total;
  q.p = Vec::Constant(K, 1.0 / K);

  q.Tc.resize(K, K);
  if (K == 1) {
    q.Tc(0, 0) = 1.0;
    return q;
  }
  // Joint cell masses are symmetric in (k, m).  The absolute floor is on the
  // probability scale: cells far below 1e-10 barely move a column sum.
  auto f = [&](double g_prev, double g_next) {
    return std::exp(bivariate_rayleigh_log_density(g_next, g_prev, sigma2, rho));
  };
  for (int m = 0; m < K; ++m)
    for (int k = m; k < K; ++k) {
      q.Tc(k, m) = tensor_simpson(f, q.zeta[m], q.zeta[m + 1], q.zeta[k], q.zeta[k + 1], 64, 1e-8,
                                  1e-10, 8192);
      q.Tc(m, k) = q.Tc(k, m);
    }
  for (int m = 0; m < K; ++m) q.Tc.col(m) /= q.Tc.col(m).sum();
  return q;
}

AugmentedModel augmented_model(const RayleighQuantizer& q, const MarkovSource& src) {
  AugmentedModel a;
  a.M = static_cast<int>(src.p.size());
  a.K = q.K;
  const int S = a.M * a.K;
  a.model.T.resize(S, S);
  for (int c = 0; c < a.K; ++c)
    for (int cp = 0; cp < a.K; ++cp)
      a.model.T.block(c * a.M, cp * a.M, a.M, a.M) = q.Tc(c, cp) * src.T;
  a.model.p = Vec::Constant(S, 1.0 / S);
  return a;
}

FadingTrial simulate_fading_trial(const RayleighQuantizer& q, const MarkovSource& src,
                                  const QamConstellation& qam, double ebn0_db, int n, Rng& rng) {
  FadingTrial t;
  t.aug = augmented_model(q, src);
  t.source = draw_chain(src.T, src.p, n, rng);
  t.channel = draw_chain(q.Tc, q.p, n, rng);
  const double N0 = noise_density(ebn0_db);
  std::normal_distribution<double> g(0.0, std::sqrt(N0 / 2.0));
  t.x.resize(n);
  for (int i = 0; i < n; ++i) {
    const double re = g(rng), im = g(rng);
    t.x[i] = q.levels[t.channel[i]] * qam.points[t.source[i]] + cplx(re, im);
  }
  std::vector<cplx> means(static_cast<std::size_t>(qam.M) * q.K);
  for (int c = 0; c < q.K; ++c)
    for (int s = 0; s < qam.M; ++s) means[c * qam.M + s] = q.levels[c] * qam.points[s];
  t.aug.model.Psi = soft_classify(t.x, means, N0);
  return t;
}

Labels source_labels(const AugmentedModel& aug, const Labels& augmented) {
  Labels s(augmented.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = aug.source_of(augmented[i]);
  return s;
}

Labels source_marginal_map(const AugmentedModel& aug, const RowMat& gamma) {
  Labels s(gamma.rows());
  std::vector<double> acc(aug.M);
  for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int idx = 0; idx < aug.M * aug.K; ++idx) acc[aug.source_of(idx)] += gamma(i, idx);
    s[i] = argmax(acc.data(), aug.M);
  }
  return s;
}

std::uint64_t bit_errors(const Labels& truth, const Labels& est, const QamConstellation& qam) {
  if (truth.size() != est.size()) throw std::invalid_argument("label length mismatch");
  std::uint64_t e = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    e += std::popcount(qam.gray[truth[i]] ^ qam.gray[est[i]]);
  return e;
}

double ber(const Labels& truth, const Labels& est, const QamConstellation& qam) {
  if (truth.empty()) return 0.0;
  return static_cast<double>(bit_errors(truth, est, qam)) /
         (static_cast<double>(truth.size()) * qam.bits);
}

}  // namespace vbi
