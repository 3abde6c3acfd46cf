#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "hyperu/calibrate.hpp"
#include "hyperu/io.hpp"
#include "hyperu/random.hpp"
#include "hyperu/simulate.hpp"
#include "hyperu/spectral.hpp"

namespace hyperu {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "hyperu");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Data lines only; headers carry the command line and version.
std::string data_lines(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') out += line + '\n';
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hyperu_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  const Outcome unknown = run({"test", "--in", "x.csv", "--bogus"});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({"simulate", "--model", "ginibre", "--dim", "2", "--length", "10", "--out", path("p")}).code, 1);
  EXPECT_EQ(run({"test", "--in", path("missing.csv")}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, EmptyGridIsUsageError) {
  ASSERT_EQ(run({"simulate", "--model", "poisson", "--dim", "2", "--length", "5", "--out", path("p")}).code, 0);
  EXPECT_EQ(run({"scatter", "--in", path("p/poisson_00000.txt"), "--cutoff", "0.5"}).code, 1);
}

TEST_F(CliTest, EmptyPatternIsNumericalFailure) {
  std::ofstream(path("empty.txt")) << "2 10\n";
  EXPECT_EQ(run({"scatter", "--in", path("empty.txt")}).code, 2);
}

TEST_F(CliTest, PipelineMatchesInProcess) {
  ASSERT_EQ(run({"simulate", "--model", "matching", "--dim", "2", "--length", "30", "--thin", "0.99",
                 "--seed", "12", "--reps", "2", "--out", path("pats")})
                .code,
            0);
  const std::string file = path("pats/matching_00001.txt");
  ASSERT_TRUE(fs::exists(file));
  const std::string text = slurp(file);
  EXPECT_EQ(text.rfind("# hyperu ", 0), 0u);
  EXPECT_NE(text.find("seed=12"), std::string::npos);

  ASSERT_EQ(run({"scatter", "--in", file, "--cutoff", "0.75", "--out", path("s.csv")}).code, 0);
  const Outcome t = run({"test", "--in", path("s.csv")});
  ASSERT_EQ(t.code, 0);

  ModelConfig c;
  c.model = Model::matching;
  c.box_length = 30.0;
  c.retention = 0.99;
  const PointPattern p = simulate(c, derive_seed(12, 1));
  const SpectralSample s = spectral_sample(p, build_wave_grid(2, 30.0, 0.75));
  const TestReport r = run_test(s, NullModel::reference(), 0.05);
  EXPECT_NE(t.out.find("T=" + format_double(r.fit.T) + "\n"), std::string::npos) << t.out;
  EXPECT_NE(t.out.find("s_hat=" + format_double(r.fit.s_hat) + "\n"), std::string::npos);
  EXPECT_NE(t.out.find("p_value=" + format_double(r.p_value) + "\n"), std::string::npos);
  EXPECT_NE(t.out.find(std::string("reject=") + (r.reject ? "true" : "false")), std::string::npos);
}

TEST_F(CliTest, AtomSampleReportsUnitPValue) {
  std::ofstream(path("atom.csv")) << "kappa,x\n0.5,1\n1,2\n2,4\n";
  const Outcome t = run({"test", "--in", path("atom.csv")});
  ASSERT_EQ(t.code, 0);
  EXPECT_NE(t.out.find("T=0\n"), std::string::npos);
  EXPECT_NE(t.out.find("p_value=1\n"), std::string::npos);
  EXPECT_NE(t.out.find("reject=false\n"), std::string::npos);
}

TEST_F(CliTest, DeterministicOutputs) {
  for (const char* sub : {"a", "b"}) {
    ASSERT_EQ(run({"simulate", "--model", "thomas", "--dim", "2", "--length", "20", "--seed", "3",
                   "--out", path(sub)})
                  .code,
              0);
  }
  EXPECT_EQ(data_lines(slurp(path("a/thomas_00000.txt"))), data_lines(slurp(path("b/thomas_00000.txt"))));
  const Outcome one = run({"--threads", "1", "simulate", "--model", "rsa", "--dim", "2", "--length", "15",
                       "--seed", "4", "--out", "-"});
  const Outcome two = run({"--threads", "2", "simulate", "--model", "rsa", "--dim", "2", "--length", "15",
                       "--seed", "4", "--out", "-"});
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(data_lines(one.out), data_lines(two.out));
}

TEST_F(CliTest, CcdfOutput) {
  std::ofstream(path("s.csv")) << "kappa,x\n0.1,1\n0.2,2\n0.3,3\n";
  const Outcome r = run({"ccdf", "--in", path("s.csv"), "--points", "4"});
  ASSERT_EQ(r.code, 0);
  const std::string d = data_lines(r.out);
  EXPECT_EQ(d.rfind("z,ccdf\n0,1\n", 0), 0u);
  EXPECT_EQ(run({"ccdf", "--in", path("s.csv"), "--row", "7"}).code, 1);
}

TEST_F(CliTest, CalibrateAndPower) {
  const Outcome c = run({"calibrate", "--dim", "2", "--length", "35", "--reps", "2000", "--seed", "2", "--out",
                     path("null.json")});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.out.find("p0="), std::string::npos);
  const NullModel m = load_null_model(path("null.json"));
  EXPECT_EQ(m.reps, 2000u);
  EXPECT_EQ(m.n, 28u);
  const Outcome again = run({"calibrate", "--dim", "2", "--length", "35", "--reps", "2000", "--seed", "2",
                         "--out", path("null.json")});
  EXPECT_NE(again.out.find("cached"), std::string::npos);

  const Outcome p = run({"power", "--thin-list", "0,0.3", "--length-list", "20", "--reps", "20", "--null",
                     path("null.json"), "--out", path("power.csv")});
  ASSERT_EQ(p.code, 0) << p.err;
  const std::string d = data_lines(slurp(path("power.csv")));
  EXPECT_EQ(d.rfind("s,20\n0,", 0), 0u) << d;
  EXPECT_NE(d.find("\n0.3,"), std::string::npos);
}

}  // namespace
}  // namespace hyperu
