#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nloc/cli.hpp"

using namespace nloc;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("nloc_cli_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string write_config(const std::filesystem::path& dir, const std::string& text) {
  const auto p = (dir / "run.toml").string();
  io::write_file(p, text);
  return p;
}

const char* kSimulate = R"([simulate]
n = 32
half_width = 8.0
dt = 0.02
t_end = 0.2
kernel = "rational"
D = 5.0
d = 0.5
seed = 7
ic = "random"
snapshot_every = 5
)";

const char* kSolveWave = R"([solve-wave]
tau = 0.2
kernel = "rational"
D = 5.0
d = 0.5
eps = 0.1
r_max = 20.0
N = 96
free_rotation = true
tol = 1e-9
write_field = true
grid_n = 32
)";

std::vector<std::string> digests(const std::string& manifest_path) {
  std::vector<std::string> d;
  for (const auto& o : manifest::read_manifest(manifest_path).outputs) d.push_back(o.sha256);
  return d;
}

}  // namespace

TEST(Cli, ValidateKernelReportsAlpha) {
  const auto r = run({"validate-kernel", "--family", "rational", "--D", "5", "--d", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["alpha"].get<double>(), 5.0);
  EXPECT_TRUE(j["zero_order_ok"].get<bool>());
}

TEST(Cli, MissingConfigIsDomainErrorNamingPath) {
  const auto r = run({"simulate", "--config", "missing.toml"});
  EXPECT_EQ(r.code, 1);
  const auto j = json::parse(r.err);
  EXPECT_EQ(j["error"], "io");
  EXPECT_NE(j["message"].get<std::string>().find("missing.toml"), std::string::npos);
  EXPECT_EQ(r.err.find('\n'), r.err.size() - 1);
}

TEST(Cli, HelpOnEverySubcommand) {
  for (const char* sub :
       {"validate-kernel", "simulate", "normal-form", "solve-wave", "residual-check", "hankel-selftest"}) {
    const auto r = run({sub, "--help"});
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("Usage"), std::string::npos) << sub;
  }
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"simulate"}).code, 2);
  EXPECT_EQ(run({"normal-form", "--tau", "abc"}).code, 2);
  const auto r = run({"validate-kernel", "--family", "gaussian"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err)["error"], "usage");
}

TEST(Cli, DomainErrorsAreStructured) {
  auto r = run({"validate-kernel", "--family", "rational", "--D", "-1", "--d", "0.5"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.err)["error"], "range");
  r = run({"normal-form", "--tau", "-0.5"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.err)["error"], "range");
}

TEST(Cli, NormalFormReport) {
  const auto r = run({"normal-form", "--tau", "0.25", "--beta", "1", "--delta", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["omega"].get<double>(), 2.0, 1e-14);
  for (const char* k : {"c_star", "W1", "W1_star", "V1", "V0", "Vm1", "nu1", "a1", "a2", "a"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_NEAR(j["a2"][0].get<double>(), -3.0 / (2 * 0.25 * 0.25 * 0.25), 1e-9);
  EXPECT_EQ(j["W1"].size(), 2u);
  EXPECT_EQ(j["W1"][0].size(), 2u);
}

TEST(Cli, HankelSelftestCsv) {
  const auto r = run({"hankel-selftest", "--N", "64", "--r-max", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "case,rho,analytic,computed,error");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 128);
}

TEST(Cli, SimulateIsReproducibleAndWritesManifest) {
  const auto dir = scratch("sim");
  const auto cfg = write_config(dir, kSimulate);
  const auto a = run({"simulate", "--config", cfg, "--out", (dir / "a").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = run({"simulate", "--config", cfg, "--out", (dir / "b").string()});
  ASSERT_EQ(b.code, 0) << b.err;
  const auto ma = manifest::read_manifest((dir / "a" / "manifest.json").string());
  const auto mb = manifest::read_manifest((dir / "b" / "manifest.json").string());
  EXPECT_EQ(ma.command, "simulate");
  EXPECT_EQ(ma.config_hash, mb.config_hash);
  EXPECT_EQ(digests((dir / "a" / "manifest.json").string()), digests((dir / "b" / "manifest.json").string()));
  // 1 initial + 2 cadence snapshots, each a dump and a PNG, plus probes and diagnostics
  EXPECT_EQ(ma.outputs.size(), 8u);
  const auto s = io::read_dump((dir / "a" / "snapshot_0002.bin").string());
  EXPECT_NEAR(s.t, 0.2, 1e-12);
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "snapshot_0000_u.png"));
  EXPECT_FALSE(std::filesystem::exists(dir / "a" / "manifest.json.tmp"));
}

TEST(Cli, ConfigTyposAndBadValuesAreConfigErrors) {
  const auto dir = scratch("typo");
  auto r = run({"simulate", "--config", write_config(dir, std::string(kSimulate) + "tmax = 3\n")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.err)["error"], "config");
  EXPECT_NE(r.err.find("tmax"), std::string::npos);
  r = run({"simulate", "--config", write_config(dir, "[simulate]\nscheme = \"rk45\"\n")});
  EXPECT_EQ(r.code, 1);
  r = run({"simulate", "--config", write_config(dir, "[other]\nn = 32\n")});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, SolveWaveIsReproducible) {
  const auto dir = scratch("wave");
  const auto cfg = write_config(dir, kSolveWave);
  const auto a = run({"solve-wave", "--config", cfg, "--out", (dir / "a").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = run({"solve-wave", "--config", cfg, "--out", (dir / "b").string()});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(digests((dir / "a" / "manifest.json").string()), digests((dir / "b" / "manifest.json").string()));
  const auto rep = json::parse(io::read_file((dir / "a" / "report.json").string()));
  EXPECT_LE(rep["residual_norm"].get<double>(), 1e-9);
  const auto profile = io::read_file((dir / "a" / "profile.csv").string());
  EXPECT_EQ(profile.substr(0, profile.find('\n')), "R,re_w,im_w,abs_w");
  const auto field = io::read_dump((dir / "a" / "field.bin").string());
  EXPECT_EQ(field.u.n(), 32);
}

TEST(Cli, ThreadEnvironmentVariable) {
  ::setenv("NLOC_THREADS", "zero", 1);
  EXPECT_EQ(run({"normal-form"}).code, 2);
  ::setenv("NLOC_THREADS", "2", 1);
  const auto dir = scratch("threads");
  const auto r = run({"simulate", "--config", write_config(dir, kSimulate), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  ::unsetenv("NLOC_THREADS");
}
