#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
};

// Runs the CLI with stderr folded into stdout.
Run cli(const std::string& args) {
  const std::string cmd = std::string(VBI_CLI_PATH) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t k = std::fread(buf, 1, sizeof buf, p)) out.append(buf, k);
  const int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "vbi_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

bool has(const std::string& s, const std::string& what) { return s.find(what) != std::string::npos; }

std::string body(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line))
    if (!line.starts_with("#")) out += line + '\n';
  return out;
}

const std::string kSmall = "--m 4 --n 40 --trials 4 --ebn0 6,10 --seed 5";

}  // namespace

TEST_CASE("selftest exits cleanly") {
  const auto r = cli("selftest --seed 3");
  CHECK(r.status == 0);
  CHECK(has(r.out, "selftest passed"));
}

TEST_CASE("missing seed is a usage error") {
  const auto r = cli("hmc-awgn --n 10");
  CHECK(r.status == 1);
  CHECK(has(r.out, "--seed"));
}

TEST_CASE("unknown flag is a usage error") {
  CHECK(cli("hmc-awgn --seed 1 --bogus 3").status == 1);
  CHECK(cli("no-such-command").status == 1);
}

TEST_CASE("invalid values are rejected") {
  CHECK(cli("hmc-awgn --seed 1 --m 8").status == 1);
  CHECK(cli("hmc-fading --seed 1 --rho 0.9 --fdts 0.01").status == 1);
}

TEST_CASE("gdl-count reports the topology of the five-variable example") {
  const auto r = cli(std::string("gdl-count ") + VBI_DATA_DIR + "/example5.gdl");
  REQUIRE(r.status == 0);
  CHECK(has(r.out, "[4]={5,3,1}"));
  CHECK(has(r.out, "[3]={4}"));
  CHECK(has(r.out, "[2]={2}"));
  CHECK(has(r.out, "[1]={}"));
  CHECK(has(r.out, "(1)={2,1}"));
  CHECK(has(r.out, "(4)={5}"));
}

TEST_CASE("same manifest gives a byte-identical file") {
  const auto a = scratch("a.csv");
  REQUIRE(cli("hmc-awgn " + kSmall + " --out " + a.string()).status == 0);
  const auto sa = slurp(a);
  REQUIRE(cli("hmc-awgn " + kSmall + " --out " + a.string()).status == 0);
  CHECK(sa == slurp(a));
  CHECK(has(sa, "# seed: 5"));
  CHECK(has(sa, "method,scenario,M,K,ebn0_db,rho,n,trials,ber,"));
}

TEST_CASE("worker count does not change the table") {
  const auto a = cli("hmc-fading " + kSmall + " --k 4 --rho 0.5,0.9 --jobs 1");
  const auto b = cli("hmc-fading " + kSmall + " --k 4 --rho 0.5,0.9 --jobs 2");
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  CHECK(body(a.out) == body(b.out));
}

TEST_CASE("config file overrides flags") {
  const auto cfg = scratch("run.cfg");
  std::ofstream(cfg) << "# comment\ntrials = 3\nebn0=12\nmethods=fb,va\n";
  const auto r = cli("hmc-awgn " + kSmall + " --config " + cfg.string());
  REQUIRE(r.status == 0);
  const auto rows = body(r.out);
  CHECK(has(rows, "fb,awgn,4,1,12,nan,40,3,"));
  CHECK(has(rows, "va,awgn,4,1,12,nan,40,3,"));
  CHECK_FALSE(has(rows, "ml,"));
  CHECK_FALSE(has(rows, ",6,nan,"));

  std::ofstream(cfg) << "no_such_key = 1\n";
  CHECK(cli("hmc-awgn " + kSmall + " --config " + cfg.string()).status == 1);
}

TEST_CASE("plot data file is written") {
  const auto p = scratch("plot.csv");
  REQUIRE(cli("hmc-awgn " + kSmall + " --methods fb --plot-data " + p.string()).status == 0);
  const auto s = slurp(p);
  CHECK(has(s, "method,scenario,ebn0_db,rho,metric,value"));
  CHECK(has(s, "fb,awgn,10,nan,ops_mean,"));
}

TEST_CASE("freq and pe-demo tables") {
  const auto f = cli("freq --seed 2 --n 16 --trials 5 --snr 10");
  REQUIRE(f.status == 0);
  CHECK(has(f.out, "method,snr_db,n,omega_bins,rms_bins,trials"));
  const auto p = cli("pe-demo --seed 2 --rho 0.5");
  REQUIRE(p.status == 0);
  CHECK(has(p.out, "rho,kld_vb,kld_tvb\n0.5,"));
}
