#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "selftest.hpp"
#include "vbi/channel.hpp"
#include "vbi/experiment.hpp"
#include "vbi/freq.hpp"
#include "vbi/gdl.hpp"
#include "vbi/pe.hpp"

#ifndef VBI_VERSION
#define VBI_VERSION "dev"
#endif

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

// key=value lines; '#' starts a comment.  Keys may be written with or without
// leading dashes and with '_' in place of '-'.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    for (char& c : key)
      if (c == '_') c = '-';
    kv.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return kv;
}

// Applies config-file values on top of whatever the command line set.
void apply_config(CLI::App& sub, const std::string& path) {
  for (const auto& [key, value] : read_config_file(path)) {
    if (key == "config") throw ConfigError("config files cannot include other config files");
    CLI::Option* opt = nullptr;
    try {
      opt = sub.get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw ConfigError("unknown config key '" + key + "' for " + sub.get_name());
    }
    opt->clear();
    if (opt->get_type_size_max() > 1 || opt->get_expected_max() > 1) {
      std::stringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ',')) opt->add_result(trim(tok));
    } else {
      opt->add_result(value);
    }
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

std::string join(const std::vector<double>& v) {
  std::string s;
  char buf[64];
  for (std::size_t k = 0; k < v.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.10g", v[k]);
    s += (k ? "," : "") + std::string(buf);
  }
  return s;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + v[k];
  return s;
}

template <class T>
std::string str(T v) {
  std::ostringstream o;
  o.precision(10);
  o << v;
  return o.str();
}

struct Manifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> config;
  std::uint64_t seed = 0;
  std::string out;

  void write(std::ostream& o) const {
    o << "# subcommand: " << subcommand << '\n';
    o << "# version: " << VBI_VERSION << '\n';
    o << "# seed: " << seed << '\n';
    o << "# output: " << out << '\n';
    for (const auto& [k, v] : config) o << "# config." << k << ": " << v << '\n';
  }
};

// Opens `path` or returns std::cout for "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw ConfigError("cannot open output file " + path);
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string config;
  int jobs = 1;
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* sub, CommonOpts& c) {
  c.seed_opt = sub->add_option("--seed", c.seed, "RNG seed (mandatory)");
  sub->add_option("--out", c.out, "output CSV path, '-' for stdout");
  sub->add_option("--jobs", c.jobs, "parallel Monte Carlo workers")->check(CLI::PositiveNumber);
  sub->add_option("--config", c.config, "key=value file; its values override flags");
}

void finish_common(CLI::App& sub, CommonOpts& c) {
  if (!c.config.empty()) apply_config(sub, c.config);
  if (c.seed_opt->count() == 0) throw ConfigError("--seed is required");
}

// ---------------------------------------------------------------------------

struct HmcOpts {
  CommonOpts common;
  vbi::ExperimentConfig cfg;
  std::vector<double> fdts;
  std::string plot_data;
  bool timing = false;
};

void setup_hmc(CLI::App* sub, HmcOpts& o, bool fading) {
  add_common(sub, o.common);
  o.cfg.scenario = fading ? "fading" : "awgn";
  sub->add_option("--scenario", o.cfg.scenario, "awgn | fading")
      ->check(CLI::IsMember({"awgn", "fading"}));
  sub->add_option("--m", o.cfg.M, "constellation size (2, 4, 16, 64)");
  sub->add_option("--k", o.cfg.K, "fading quantizer levels");
  sub->add_option("--ebn0", o.cfg.ebn0_db, "Eb/N0 grid in dB")->delimiter(',');
  auto* rho = sub->add_option("--rho", o.cfg.rho, "fading correlation grid")->delimiter(',');
  auto* fd = sub->add_option("--fdts", o.fdts, "normalized Doppler grid")->delimiter(',');
  rho->excludes(fd);
  sub->add_option("--n", o.cfg.n, "block length");
  sub->add_option("--trials", o.cfg.trials, "Monte Carlo trials per grid point");
  sub->add_option("--methods", o.cfg.methods, "subset of ml,fb,va,vb,vb-acc,fcvb,fcvb-acc")
      ->delimiter(',');
  sub->add_option("--xi", o.cfg.xi, "KS threshold for accelerated VB");
  sub->add_option("--max-cycles", o.cfg.max_cycles, "VB/FCVB cycle cap");
  sub->add_option("--sigma2", o.cfg.sigma2, "Rayleigh scale parameter");
  sub->add_option("--plot-data", o.plot_data, "additional long-format output file");
  sub->add_flag("--timing,!--no-timing", o.timing, "measure wall_ms (off: wall_ms = 0)");
}

int run_hmc(CLI::App& sub, HmcOpts& o) {
  finish_common(sub, o.common);
  auto& cfg = o.cfg;
  cfg.seed = o.common.seed;
  cfg.jobs = o.common.jobs;
  cfg.timing = o.timing;
  if (!o.fdts.empty()) {
    cfg.rho.clear();
    for (double f : o.fdts) cfg.rho.push_back(vbi::rho_from_doppler(f));
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  Manifest man{sub.get_name(),
               {{"scenario", cfg.scenario},
                {"m", str(cfg.M)},
                {"k", str(cfg.K)},
                {"ebn0", join(cfg.ebn0_db)},
                {"rho", cfg.scenario == "fading" ? join(cfg.rho) : "n/a"},
                {"fdts", o.fdts.empty() ? "n/a" : join(o.fdts)},
                {"n", str(cfg.n)},
                {"trials", str(cfg.trials)},
                {"methods", join(cfg.methods)},
                {"xi", str(cfg.xi)},
                {"max-cycles", str(cfg.max_cycles)},
                {"sigma2", str(cfg.sigma2)},
                {"timing", cfg.timing ? "on" : "off"},
                {"plot-data", o.plot_data.empty() ? "none" : o.plot_data}},
               cfg.seed,
               o.common.out};
  const auto rows = vbi::run_experiment(cfg);
  Sink sink(o.common.out);
  man.write(sink.get());
  vbi::write_csv_header(sink.get());
  vbi::write_csv_rows(sink.get(), rows);
  if (!o.plot_data.empty()) {
    Sink plot(o.plot_data);
    man.write(plot.get());
    vbi::write_plot_data(plot.get(), rows);
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct FreqOpts {
  CommonOpts common;
  vbi::FreqConfig cfg;
  std::string u12 = "derived";
  std::string fitz = "window";
};

void setup_freq(CLI::App* sub, FreqOpts& o) {
  add_common(sub, o.common);
  sub->add_option("--n", o.cfg.n, "samples per record");
  sub->add_option("--omega-bins", o.cfg.omega_bins, "true frequency in DFT bins");
  sub->add_option("--snr", o.cfg.snr_db, "SNR grid in dB")->delimiter(',');
  sub->add_option("--trials", o.cfg.trials, "Monte Carlo trials per SNR");
  sub->add_option("--pad", o.cfg.pad, "grid oversampling factor");
  sub->add_option("--cycles", o.cfg.cycles, "VB/TVB shaping cycles");
  sub->add_option("--prior-mean", o.cfg.prior.mu_a, "amplitude prior mean");
  sub->add_option("--prior-var", o.cfg.prior.r_a, "amplitude prior variance");
  sub->add_option("--u12-form", o.u12, "derived | printed")
      ->check(CLI::IsMember({"derived", "printed"}));
  sub->add_option("--fitz-norm", o.fitz, "window | printed")
      ->check(CLI::IsMember({"window", "printed"}));
}

int run_freq(CLI::App& sub, FreqOpts& o) {
  finish_common(sub, o.common);
  auto& cfg = o.cfg;
  cfg.seed = o.common.seed;
  cfg.jobs = o.common.jobs;
  cfg.u12_form = o.u12 == "printed" ? vbi::U12Form::printed : vbi::U12Form::derived;
  cfg.fitz_norm = o.fitz == "printed" ? vbi::FitzNorm::printed : vbi::FitzNorm::window;
  if (cfg.n < 2 || cfg.trials < 1 || cfg.cycles < 1 || cfg.pad < 1 || cfg.snr_db.empty())
    throw ConfigError("freq needs n >= 2, trials >= 1, cycles >= 1, pad >= 1 and an SNR grid");
  Manifest man{sub.get_name(),
               {{"n", str(cfg.n)},
                {"omega-bins", str(cfg.omega_bins)},
                {"snr", join(cfg.snr_db)},
                {"trials", str(cfg.trials)},
                {"pad", str(cfg.pad)},
                {"cycles", str(cfg.cycles)},
                {"prior-mean", str(cfg.prior.mu_a)},
                {"prior-var", str(cfg.prior.r_a)},
                {"u12-form", o.u12},
                {"fitz-norm", o.fitz}},
               cfg.seed,
               o.common.out};
  const auto rows = vbi::run_freq_experiment(cfg);
  Sink sink(o.common.out);
  auto& out = sink.get();
  man.write(out);
  out << "method,snr_db,n,omega_bins,rms_bins,trials\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.10g,%d,%.10g,%.10g,%d\n", r.method.c_str(), r.snr_db, r.n,
                  r.omega_bins, r.rms_bins, r.trials);
    out << buf;
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct PeOpts {
  CommonOpts common;
  std::vector<double> rho{0.2, 0.5, 0.8};
  std::string tvb = "eigen";
};

void setup_pe(CLI::App* sub, PeOpts& o) {
  add_common(sub, o.common);
  sub->add_option("--rho", o.rho, "correlation grid")->delimiter(',');
  sub->add_option("--tvb", o.tvb, "eigen | ldu")->check(CLI::IsMember({"eigen", "ldu"}));
}

int run_pe(CLI::App& sub, PeOpts& o) {
  finish_common(sub, o.common);
  auto rho = o.rho;
  std::sort(rho.begin(), rho.end());
  for (double r : rho)
    if (!(std::abs(r) < 1.0)) throw ConfigError("rho must lie in (-1, 1)");
  Manifest man{sub.get_name(), {{"rho", join(rho)}, {"tvb", o.tvb}}, o.common.seed, o.common.out};
  const auto tvb = vbi::parse_pe_method(o.tvb);
  Sink sink(o.common.out);
  auto& out = sink.get();
  man.write(out);
  out << "rho,kld_vb,kld_tvb\n";
  char buf[128];
  for (double r : rho) {
    vbi::PeModel model;
    model.rho = r;
    const double a = vbi::pe_approximate(model, vbi::PeMethod::vb).kld;
    const double b = vbi::pe_approximate(model, tvb).kld;
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", r, a, b);
    out << buf;
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct GdlOpts {
  std::string model;
  std::vector<int> keep;
  int split = 0;
};

void setup_gdl(CLI::App* sub, GdlOpts& o) {
  sub->add_option("model", o.model, "factor model file")->required()->check(CLI::ExistingFile);
  sub->add_option("--keep", o.keep, "variables left unsummed (default: none)")->delimiter(',');
  sub->add_option("--split", o.split, "forward/backward split index (0 = ceil(n/2))");
}

int run_gdl(GdlOpts& o) {
  std::ifstream in(o.model);
  vbi::FactorModel<double> model;
  try {
    model = vbi::read_factor_model(in);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const auto topo = model.topology();
  const int n = topo.n(), M = model.M;
  vbi::VarSet keep = 0;
  for (int v : o.keep) {
    if (v < 1 || v > model.m) throw ConfigError("--keep variable out of range");
    keep |= vbi::var_bit(v);
  }
  const vbi::VarSet S = topo.universe() & ~keep;
  const int split = o.split == 0 ? (n + 1) / 2 : o.split;
  if (n > 1 && (split < 1 || split > n - 1)) throw ConfigError("--split must lie in 1..n-1");
  auto& out = std::cout;
  out << "model: " << o.model << "  m=" << model.m << " M=" << M << " n=" << n << '\n';
  for (int i = 1; i <= n; ++i)
    out << "omega_" << i << " = " << vbi::format_set(topo.scope(i)) << '\n';
  out << "NLN:";
  for (int i = n; i >= 1; --i) out << "  [" << i << "]=" << vbi::format_set(topo.nln(i));
  out << "\nFA: ";
  for (int i = 1; i <= n; ++i) out << "  (" << i << ")=" << vbi::format_set(topo.fa(i));
  out << "\noccupancy (rows m..1, columns omega_n..omega_1):\n";
  const auto occ = vbi::build_occupancy_matrix(topo);
  out << "      ";
  for (int f : occ.col_factors) out << " w" << f;
  out << '\n';
  for (std::size_t r = 0; r < occ.row_vars.size(); ++r) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "  %3d ", occ.row_vars[r]);
    out << buf;
    for (int b : occ.bits[r]) out << "  " << b;
    out << '\n';
  }
  out << "S = " << vbi::format_set(S) << ", split = " << split << '\n';
  if (n > 1) {
    const auto fb = vbi::count_operators(topo, M, S, split, vbi::CountMode::fb);
    const auto direct = vbi::count_operators(topo, M, S, split, vbi::CountMode::direct);
    const auto naive = vbi::count_operators(topo, M, S, split, vbi::CountMode::naive);
    out << "operators fb:     sum=" << fb.ring_sum << " product=" << fb.ring_product
        << " total=" << fb.total() << '\n';
    out << "operators direct: sum=" << direct.ring_sum << " product=" << direct.ring_product
        << " total=" << direct.total() << '\n';
    out << "operators naive:  sum=" << naive.ring_sum << " product=" << naive.ring_product
        << " total=" << naive.total() << '\n';
    out << "phi_fb = " << vbi::phi_fb(topo, M, S, split)
        << ", gdl applies: " << (vbi::gdl_applies(topo, S, split) ? "yes" : "no") << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and variational inference for factored models and hidden Markov chains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", VBI_VERSION);

  HmcOpts awgn, fading;
  FreqOpts freq;
  PeOpts pe;
  GdlOpts gdl;
  std::uint64_t self_seed = 1;

  auto* s_awgn = app.add_subcommand("hmc-awgn", "M-QAM over AWGN with a Markov source");
  setup_hmc(s_awgn, awgn, false);
  auto* s_fade = app.add_subcommand("hmc-fading", "M-QAM over quantized Rayleigh fading");
  setup_hmc(s_fade, fading, true);
  auto* s_freq = app.add_subcommand("freq", "single-tone frequency estimation Monte Carlo");
  setup_freq(s_freq, freq);
  auto* s_gdl = app.add_subcommand("gdl-count", "topology sets and operator counts of a model file");
  setup_gdl(s_gdl, gdl);
  auto* s_pe = app.add_subcommand("pe-demo", "VB and transformed VB on the bivariate power-exponential");
  setup_pe(s_pe, pe);
  auto* s_self = app.add_subcommand("selftest", "exact-inference checks against enumeration");
  s_self->add_option("--seed", self_seed, "RNG seed for the random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (active == s_awgn) return run_hmc(*s_awgn, awgn);
    if (active == s_fade) return run_hmc(*s_fade, fading);
    if (active == s_freq) return run_freq(*s_freq, freq);
    if (active == s_pe) return run_pe(*s_pe, pe);
    if (active == s_gdl) return run_gdl(gdl);
    return run_selftest(std::cout, self_seed) == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << active->help();
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n\n" << active->help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
