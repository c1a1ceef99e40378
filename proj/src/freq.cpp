#include "vbi/freq.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "vbi/channel.hpp"

namespace vbi {

std::vector<double> dft_grid(int n, int pad) {
  if (n < 1 || pad < 1) throw std::invalid_argument("grid needs n >= 1 and pad >= 1");
  std::vector<double> g;
  const double step = 2.0 * std::numbers::pi / (static_cast<double>(pad) * n);
  for (int m = 0; m * step < std::numbers::pi; ++m) g.push_back(m * step);
  return g;
}

double periodogram_ml(const cvec& x, const std::vector<double>& grid) {
  if (x.size() < 2) throw std::invalid_argument("periodogram needs n >= 2");
  double best = -1.0, arg = 0.0;
  for (double w : grid) {
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * std::polar(1.0, -w * static_cast<double>(i));
    const double p = std::norm(s);
    if (p > best) {
      best = p;
      arg = w;
    }
  }
  return arg;
}

double periodogram_ml(const std::vector<double>& x, const std::vector<double>& grid) {
  return periodogram_ml(cvec(x.begin(), x.end()), grid);
}

std::vector<double> kay_weights(int n) {
  if (n < 2) throw std::invalid_argument("Kay estimator needs n >= 2");
  std::vector<double> w(n - 1);
  const double c = 1.5 * n / (static_cast<double>(n) * n - 1.0);
  for (int t = 1; t <= n - 1; ++t) {
    const double z = (2.0 * t - n) / n;
    w[t - 1] = c * (1.0 - z * z);
  }
  return w;
}

double kay_estimate(const cvec& x) {
  const int n = static_cast<int>(x.size());
  const auto w = kay_weights(n);
  for (const auto& v : x)
    if (v == 0.0) throw std::domain_error("Kay estimator: zero sample has no phase");
  double est = 0.0;
  for (int t = 1; t < n; ++t) est += w[t - 1] * std::arg(x[t] * std::conj(x[t - 1]));
  return est;
}

FitzResult fitz_estimate(const cvec& x, int L, FitzNorm norm) {
  const int n = static_cast<int>(x.size());
  if (L < 1 || L > n - 1) throw std::invalid_argument("Fitz window must satisfy 1 <= L <= n-1");
  FitzResult r;
  double s = 0.0;
  for (int m = 1; m <= L; ++m) {
    std::complex<double> R = 0.0;
    for (int i = m; i < n; ++i) R += x[i] * std::conj(x[i - m]);
    R /= static_cast<double>(n - m);
    const double a = std::arg(R);
    if (std::abs(a) > 0.9 * std::numbers::pi) r.wrap_warning = true;
    s += a;
  }
  const double c = norm == FitzNorm::window ? 2.0 / (static_cast<double>(L) * (L + 1))
                                            : 2.0 / (static_cast<double>(n) * (n - 1));
  r.omega = c * s;
  return r;
}

FreqBasis::FreqBasis(int n_, std::vector<double> grid) : n(n_), omega(std::move(grid)) {
  const int G = static_cast<int>(omega.size());
  sin_table.resize(G, n);
  sum_sin2.resize(G);
  for (int g = 0; g < G; ++g) {
    double s2 = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double s = std::sin(omega[g] * i);
      sin_table(g, i - 1) = s;
      s2 += s * s;
    }
    sum_sin2(g) = s2;
  }
}

namespace {

// exp(v - max v) normalized
Vec softmax(const Vec& v) {
  Vec e = (v.array() - v.maxCoeff()).exp();
  return e / e.sum();
}

double expect(const Vec& w, const Vec& v) { return w.dot(v); }
double expect(const Vec& w, const std::vector<double>& v) {
  double s = 0.0;
  for (Eigen::Index g = 0; g < w.size(); ++g) s += w(g) * v[g];
  return s;
}

}  // namespace

FreqPosteriorGrid freq_posterior(const std::vector<double>& x, double r_e, const FreqPrior& prior,
                                 const FreqBasis& basis) {
  if (static_cast<int>(x.size()) != basis.n) throw std::invalid_argument("sample count mismatch");
  if (!(prior.r_a > 0.0) || !(r_e > 0.0)) throw std::invalid_argument("variances must be positive");
  const int G = static_cast<int>(basis.omega.size());
  FreqPosteriorGrid p;
  p.omega = basis.omega;
  const Eigen::Map<const Vec> xv(x.data(), basis.n);
  const Vec xs = basis.sin_table * xv;
  p.r = (basis.sum_sin2.array() / r_e + 1.0 / prior.r_a).inverse();
  p.mu = p.r.array() * (xs.array() / r_e + prior.mu_a / prior.r_a);
  const Vec joint = p.mu.array().square() / (2.0 * p.r.array());
  const Vec logm = joint.array() + 0.5 * p.r.array().log();
  p.marginal = softmax(logm);
  p.mean = expect(p.marginal, p.omega);
  p.marginal_map = p.omega[argmax(p.marginal)];
  p.joint_map_index = argmax(joint);
  p.joint_map = p.omega[p.joint_map_index];
  p.a_hat = p.mu(p.joint_map_index);
  (void)G;
  return p;
}

namespace {

// Shared iteration: u12 = 0 is plain VB.
ShapingState shaping(const FreqPosteriorGrid& post, double u12, int cycles, double tol) {
  const Eigen::Map<const Vec> om(post.omega.data(), static_cast<Eigen::Index>(post.omega.size()));
  const Vec mu0 = post.mu.array() + u12 * om.array();
  const Vec extra = (post.mu.array().square() - mu0.array().square()) / (2.0 * post.r.array());
  ShapingState s;
  s.u12 = u12;
  s.marginal = post.marginal;
  for (int c = 1; c <= cycles; ++c) {
    const double prev = s.mu;
    s.mu = expect(s.marginal, mu0);
    s.sigma2 = expect(s.marginal, post.r);
    s.c1 = 2.0 * s.mu;
    s.c2 = -(s.mu * s.mu + s.sigma2);
    const Vec logf = (s.c1 * mu0.array() + s.c2) / (2.0 * post.r.array()) + extra.array();
    s.marginal = softmax(logf);
    s.mu_trace.push_back(s.mu);
    s.cycles = c;
    if (tol > 0.0 && c > 1 && std::abs(s.mu - prev) < tol) break;
  }
  s.omega_mean = expect(s.marginal, post.omega);
  return s;
}

}  // namespace

ShapingState vb_freq(const FreqPosteriorGrid& post, int cycles, double tol) {
  return shaping(post, 0.0, cycles, tol);
}

double tvb_u12(const std::vector<double>& x, double r_e, const FreqPosteriorGrid& post,
               U12Form form) {
  const double w = post.joint_map, a = post.a_hat, r = post.r(post.joint_map_index);
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double i = static_cast<double>(k + 1);
    const double ci = form == U12Form::printed ? 2.0 * i : i;
    s += ci * std::cos(w * i) * (x[k] - 2.0 * a * std::sin(w * i));
  }
  s *= r / r_e;
  return form == U12Form::printed ? s : -s;
}

ShapingState tvb_freq(const FreqPosteriorGrid& post, double u12, int cycles, double tol) {
  return shaping(post, u12, cycles, tol);
}

const std::vector<std::string>& freq_methods() {
  static const std::vector<std::string> m{"periodogram", "kay",       "fitz", "posterior-mean",
                                          "marginal-map", "joint-map", "vb",   "tvb"};
  return m;
}

namespace {

struct FreqTrial {
  double err[8];
};

FreqTrial freq_trial(const FreqConfig& cfg, const FreqBasis& basis, double r_e, double omega,
                     int trial) {
  auto rng = trial_rng(cfg.seed, static_cast<std::uint64_t>(trial));
  std::normal_distribution<double> amp(cfg.prior.mu_a, std::sqrt(cfg.prior.r_a));
  std::normal_distribution<double> noise(0.0, std::sqrt(r_e));
  const double a = amp(rng);
  std::vector<double> x(cfg.n);
  for (int i = 1; i <= cfg.n; ++i) x[i - 1] = a * std::sin(omega * i) + noise(rng);
  cvec xc(cfg.n);
  for (int i = 1; i <= cfg.n; ++i)
    xc[i - 1] = a * std::polar(1.0, omega * i) + std::complex<double>(noise(rng), noise(rng));

  const auto post = freq_posterior(x, r_e, cfg.prior, basis);
  const auto vb = vb_freq(post, cfg.cycles);
  const auto tvb = tvb_freq(post, tvb_u12(x, r_e, post, cfg.u12_form), cfg.cycles);
  const double est[8] = {periodogram_ml(x, basis.omega),
                         kay_estimate(xc),
                         fitz_estimate(xc, cfg.n - 1, cfg.fitz_norm).omega,
                         post.mean,
                         post.marginal_map,
                         post.joint_map,
                         vb.omega_mean,
                         tvb.omega_mean};
  FreqTrial t;
  for (int k = 0; k < 8; ++k) t.err[k] = est[k] - omega;
  return t;
}

}  // namespace

std::vector<FreqRow> run_freq_experiment(const FreqConfig& cfg) {
  if (cfg.n < 2) throw std::invalid_argument("n must be >= 2");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (cfg.cycles < 1) throw std::invalid_argument("cycles must be >= 1");
  const FreqBasis basis(cfg.n, dft_grid(cfg.n, cfg.pad));
  const double bin = 2.0 * std::numbers::pi / cfg.n;
  const double omega = cfg.omega_bins * bin;
  auto snrs = cfg.snr_db;
  std::sort(snrs.begin(), snrs.end());
  std::vector<FreqRow> rows;
  for (double snr_db : snrs) {
    const double snr = std::pow(10.0, snr_db / 10.0);
    const double r_e = (cfg.prior.mu_a * cfg.prior.mu_a + cfg.prior.r_a) / (2.0 * snr);
    std::vector<FreqTrial> res(cfg.trials);
#ifdef VBI_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(cfg.jobs) if (cfg.jobs > 1)
#endif
    for (int t = 0; t < cfg.trials; ++t) res[t] = freq_trial(cfg, basis, r_e, omega, t);
    for (std::size_t k = 0; k < freq_methods().size(); ++k) {
      double ss = 0.0;
      for (const auto& r : res) ss += r.err[k] * r.err[k];
      rows.push_back({freq_methods()[k], snr_db, cfg.n, cfg.omega_bins,
                      std::sqrt(ss / cfg.trials) / bin, cfg.trials});
    }
  }
  return rows;
}

}  // namespace vbi
