#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "hierent/cli.hpp"

using namespace hierent;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "hierent");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hierent-test-" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Cli, SpectrumCsv) {
  const Outcome r = run({"spectrum", "--system", "cat", "--steps", "10000"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("lambda,multiplicity\n0.96242", 0), 0u) << r.out;
}

TEST(Cli, DominateCsv) {
  const Outcome r = run({"dominate", "--system", "cat", "--steps", "10000"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("level,N,worst_ratio,samples\n1,1,0.14589803"), std::string::npos) << r.out;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--steps", "10"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--system", "nope"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--config", "/nonexistent.cfg"}).code, 2);
  EXPECT_EQ(run({"entropy", "--system", "cat", "--level", "2", "--steps", "10000"}).code, 2);
  EXPECT_EQ(run({"entropy", "--method", "magic"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, BadConfigExitsTwo) {
  const auto dir = temp_dir("badcfg");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "bad.cfg") << "[system s]\nmatrix = 2 0; 0 1\n";
  const Outcome r = run({"spectrum", "--config", (dir / "bad.cfg").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("matrix"), std::string::npos) << r.err;
}

TEST(Cli, EntropyWritesFiles) {
  const auto dir = temp_dir("entropy");
  const Outcome r = run({"entropy", "--system", "cat", "--steps", "10000", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "fits.csv"), r.out);
  EXPECT_EQ(slurp(dir / "fits.csv").rfind("system,level,method,h_estimate,stderr\ncat,1,volume,0.96242", 0), 0u);
  const std::string curves = slurp(dir / "curves.csv");
  EXPECT_EQ(curves.rfind("system,level,method,epsilon,n,value\n", 0), 0u);
  EXPECT_EQ(std::count(curves.begin(), curves.end(), '\n'), 1 + 3 * 11);
  EXPECT_TRUE(std::filesystem::exists(dir / "resolved.cfg"));
}

TEST(Cli, JobsDoNotChangeOutput) {
  const auto cfg_dir = temp_dir("jobs");
  std::filesystem::create_directories(cfg_dir);
  std::ofstream(cfg_dir / "p.cfg") << "samples = 3\nsteps = 10000\n[system p]\nkind = perturbed\nmatrix = 2 1; 1 1\n"
                                      "amplitude = 0.05\n";
  const std::string cfg = (cfg_dir / "p.cfg").string();
  const Outcome a = run({"entropy", "--config", cfg, "--jobs", "1", "--out", (cfg_dir / "a").string()});
  const Outcome b = run({"entropy", "--config", cfg, "--jobs", "8", "--out", (cfg_dir / "b").string()});
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(cfg_dir / "a" / "curves.csv"), slurp(cfg_dir / "b" / "curves.csv"));
  const Outcome c = run({"entropy", "--config", cfg, "--seed", "5", "--out", (cfg_dir / "c").string()});
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, VerifyExitCodeAndReport) {
  const auto dir = temp_dir("verify");
  const Outcome r = run({"verify", "--system", "cat", "--steps", "10000", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("1 rows: 1 ruelle ok, 1 pesin ok, 0 failed"), std::string::npos) << r.out;
  EXPECT_EQ(slurp(dir / "report.csv").rfind("system,level,method,h_estimate,stderr,rhs,", 0), 0u);
  const Outcome bad = run({"verify", "--system", "cat", "--level", "2", "--steps", "10000", "--out", dir.string()});
  EXPECT_EQ(bad.code, 1);
}

TEST(Cli, LeafDump) {
  const Outcome r = run({"leaf-dump", "--system", "cat", "--steps", "10000"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("w0,psi0,x0,x1\n", 0), 0u);
  EXPECT_GT(std::count(r.out.begin(), r.out.end(), '\n'), 100);
}
