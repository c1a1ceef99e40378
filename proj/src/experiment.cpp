#include "vbi/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <cstdio>
#include <stdexcept>

#ifdef VBI_HAVE_OPENMP
#include <omp.h>
#endif

namespace vbi {

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m{"ml", "fb", "va", "vb", "vb-acc", "fcvb", "fcvb-acc"};
  return m;
}

void ExperimentConfig::validate() const {
  if (scenario != "awgn" && scenario != "fading")
    throw std::invalid_argument("scenario must be awgn or fading");
  qam_constellation(M);
  if (scenario == "fading") {
    if (K < 1) throw std::invalid_argument("K must be >= 1");
    if (rho.empty()) throw std::invalid_argument("fading needs at least one rho");
    for (double r : rho)
      if (!(std::abs(r) < 1.0)) throw std::invalid_argument("|rho| must be < 1");
  }
  if (ebn0_db.empty()) throw std::invalid_argument("need at least one Eb/N0 value");
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (xi < 0.0) throw std::invalid_argument("xi must be >= 0");
  if (max_cycles < 1) throw std::invalid_argument("max_cycles must be >= 1");
  if (methods.empty()) throw std::invalid_argument("no methods selected");
  for (const auto& m : methods)
    if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
      throw std::invalid_argument("unknown method: " + m);
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_vb(const std::string& m) { return m == "vb" || m == "vb-acc"; }
bool is_iterative(const std::string& m) { return m.starts_with("vb") || m.starts_with("fcvb"); }

Labels source_from_dist(const RowMat& dist, const AugmentedModel* aug) {
  if (aug) return source_marginal_map(*aug, dist);
  Labels l(dist.rows());
  for (Eigen::Index i = 0; i < dist.rows(); ++i)
    l[i] = argmax(dist.row(i).data(), static_cast<int>(dist.cols()));
  return l;
}

Labels source_from_labels(const Labels& l, const AugmentedModel* aug) {
  return aug ? source_labels(*aug, l) : l;
}

}  // namespace

std::vector<MethodOutcome> run_trial(const ExperimentConfig& cfg, const GridPoint& pt, int trial) {
  auto rng = trial_rng(cfg.seed, static_cast<std::uint64_t>(trial));
  const QamConstellation qam = qam_constellation(cfg.M);
  const MarkovSource src = random_source(cfg.M, rng);
  HmcModel model;
  Labels truth;
  std::unique_ptr<FadingTrial> fading;
  const AugmentedModel* aug = nullptr;
  if (cfg.scenario == "awgn") {
    AwgnTrial t = simulate_awgn_trial(src, qam, pt.ebn0_db, cfg.n, rng);
    model = std::move(t.model);
    truth = std::move(t.truth);
  } else {
    fading = std::make_unique<FadingTrial>(
        simulate_fading_trial(*pt.quantizer, src, qam, pt.ebn0_db, cfg.n, rng));
    model = fading->aug.model;
    truth = fading->source;
    aug = &fading->aug;
  }
  const int n = model.n(), S = model.M();

  std::unique_ptr<SmoothingResult> smooth;
  auto smoothing = [&]() -> const SmoothingResult& {
    if (!smooth) smooth = std::make_unique<SmoothingResult>(fb_algorithm(model));
    return *smooth;
  };

  std::vector<MethodOutcome> out;
  for (const auto& m : cfg.methods) {
    MethodOutcome o;
    OpTally ops;
    Labels est;
    const auto t0 = std::chrono::steady_clock::now();
    StoppingConfig sc;
    sc.xi = cfg.xi;
    sc.max_cycles = cfg.max_cycles;
    sc.accelerated = m.ends_with("-acc");
    if (m == "ml") {
      est = source_from_labels(ml_detect(model.Psi, &ops), aug);
    } else if (m == "fb") {
      auto sm = fb_algorithm(model, &ops);
      est = source_from_dist(sm.gamma, aug);
      if (!smooth) smooth = std::make_unique<SmoothingResult>(std::move(sm));
    } else if (m == "va") {
      est = source_from_labels(viterbi(model, &ops).labels, aug);
    } else if (is_vb(m)) {
      RowMat init = init_shaping(InitMode::ml, model.Psi);
      ops.add += static_cast<std::uint64_t>(n) * (S - 1);
      ops.div += static_cast<std::uint64_t>(n) * S;
      VbResult r = ivb_run(model, init, sc, &ops);
      est = source_from_dist(r.p, aug);
      o.nu_c = r.nu_c;
      o.nu_e = r.nu_e;
      o.converged = r.converged;
      const auto t1 = std::chrono::steady_clock::now();
      o.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      o.kld = kld_vb(model, smoothing(), r.p);
    } else {
      Labels init = ml_detect(model.Psi, &ops);
      FcvbResult r = fcvb_run(model, init, sc, &ops);
      est = source_from_labels(r.labels, aug);
      o.nu_c = r.nu_c;
      o.nu_e = r.nu_e;
      o.converged = r.converged;
    }
    if (!is_vb(m)) {
      const auto t1 = std::chrono::steady_clock::now();
      o.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    if (!cfg.timing) o.wall_ms = 0.0;
    o.bit_errors = bit_errors(truth, est, qam);
    o.bits = static_cast<std::uint64_t>(n) * qam.bits;
    o.ops = ops.total();
    out.push_back(o);
  }
  return out;
}

namespace {

struct Accumulator {
  std::uint64_t bit_errors = 0, bits = 0;
  double nu_c = 0.0, nu_e = 0.0, kld = 0.0, wall = 0.0, ops = 0.0;
  int nonconverged = 0;
  void add(const MethodOutcome& o) {
    bit_errors += o.bit_errors;
    bits += o.bits;
    nu_c += o.nu_c;
    nu_e += o.nu_e;
    kld += o.kld;
    wall += o.wall_ms;
    ops += static_cast<double>(o.ops);
    nonconverged += o.converged ? 0 : 1;
  }
};

ResultRow finish(const ExperimentConfig& cfg, const GridPoint& pt, const std::string& method,
                 const Accumulator& a) {
  ResultRow r;
  r.method = method;
  r.scenario = cfg.scenario;
  r.M = cfg.M;
  r.K = cfg.scenario == "fading" ? cfg.K : 1;
  r.ebn0_db = pt.ebn0_db;
  r.rho = cfg.scenario == "fading" ? pt.rho : kNaN;
  r.n = cfg.n;
  r.trials = cfg.trials;
  const double N = cfg.trials;
  r.ber = static_cast<double>(a.bit_errors) / static_cast<double>(a.bits);
  r.ber_ci95 = 1.96 * std::sqrt(r.ber * (1.0 - r.ber) / static_cast<double>(a.bits));
  r.nu_c_mean = is_iterative(method) ? a.nu_c / N : kNaN;
  r.nu_e_mean = is_iterative(method) ? a.nu_e / N : kNaN;
  r.kld_mean = is_vb(method) ? a.kld / N : kNaN;
  r.wall_ms = a.wall / N;
  r.ops_mean = a.ops / N;
  r.nonconverged = a.nonconverged;
  return r;
}

struct Grid {
  std::vector<GridPoint> points;
  std::map<double, RayleighQuantizer> quantizers;
};

Grid make_grid(const ExperimentConfig& cfg) {
  Grid g;
  auto eb = cfg.ebn0_db;
  std::sort(eb.begin(), eb.end());
  if (cfg.scenario == "awgn") {
    for (double e : eb) g.points.push_back({e, kNaN, nullptr});
    return g;
  }
  auto rh = cfg.rho;
  std::sort(rh.begin(), rh.end());
  for (double r : rh)
    if (!g.quantizers.count(r)) g.quantizers.emplace(r, rayleigh_quantizer(cfg.K, cfg.sigma2, r));
  for (double e : eb)
    for (double r : rh) g.points.push_back({e, r, &g.quantizers.at(r)});
  return g;
}

}  // namespace

std::vector<ResultRow> run_experiment_serial(const ExperimentConfig& cfg) {
  cfg.validate();
  const Grid g = make_grid(cfg);
  std::vector<ResultRow> rows;
  for (const auto& pt : g.points) {
    std::vector<Accumulator> acc(cfg.methods.size());
    for (int t = 0; t < cfg.trials; ++t) {
      auto res = run_trial(cfg, pt, t);
      for (std::size_t k = 0; k < res.size(); ++k) acc[k].add(res[k]);
    }
    for (std::size_t k = 0; k < cfg.methods.size(); ++k)
      rows.push_back(finish(cfg, pt, cfg.methods[k], acc[k]));
  }
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
#ifndef VBI_HAVE_OPENMP
  return run_experiment_serial(cfg);
#else
  if (cfg.jobs <= 1) return run_experiment_serial(cfg);
  cfg.validate();
  const Grid g = make_grid(cfg);
  std::vector<ResultRow> rows;
  for (const auto& pt : g.points) {
    std::vector<std::vector<MethodOutcome>> per_trial(cfg.trials);
    std::string error;
#pragma omp parallel for schedule(dynamic, 4) num_threads(cfg.jobs)
    for (int t = 0; t < cfg.trials; ++t) {
      try {
        per_trial[t] = run_trial(cfg, pt, t);
      } catch (const std::exception& e) {
#pragma omp critical
        if (error.empty()) error = e.what();
      }
    }
    if (!error.empty()) throw std::runtime_error(error);
    std::vector<Accumulator> acc(cfg.methods.size());
    for (const auto& res : per_trial)
      for (std::size_t k = 0; k < res.size(); ++k) acc[k].add(res[k]);
    for (std::size_t k = 0; k < cfg.methods.size(); ++k)
      rows.push_back(finish(cfg, pt, cfg.methods[k], acc[k]));
  }
  return rows;
#endif
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void write_csv_header(std::ostream& out) {
  out << "method,scenario,M,K,ebn0_db,rho,n,trials,ber,ber_ci95,nu_c_mean,nu_e_mean,kld_mean,"
         "wall_ms\n";
}

void write_csv_rows(std::ostream& out, const std::vector<ResultRow>& rows) {
  for (const auto& r : rows)
    out << r.method << ',' << r.scenario << ',' << r.M << ',' << r.K << ',' << num(r.ebn0_db)
        << ',' << num(r.rho) << ',' << r.n << ',' << r.trials << ',' << num(r.ber) << ','
        << num(r.ber_ci95) << ',' << num(r.nu_c_mean) << ',' << num(r.nu_e_mean) << ','
        << num(r.kld_mean) << ',' << num(r.wall_ms) << '\n';
}

void write_plot_data(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "method,scenario,ebn0_db,rho,metric,value\n";
  for (const auto& r : rows) {
    const std::pair<const char*, double> metrics[] = {
        {"ber", r.ber},           {"ber_ci95", r.ber_ci95},   {"nu_c_mean", r.nu_c_mean},
        {"nu_e_mean", r.nu_e_mean}, {"kld_mean", r.kld_mean}, {"wall_ms", r.wall_ms},
        {"ops_mean", r.ops_mean}, {"nonconverged", static_cast<double>(r.nonconverged)}};
    for (const auto& [name, v] : metrics)
      out << r.method << ',' << r.scenario << ',' << num(r.ebn0_db) << ',' << num(r.rho) << ','
          << name << ',' << num(v) << '\n';
  }
}

}  // namespace vbi
