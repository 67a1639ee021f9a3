#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
  int status = 0;
  std::string output;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(SWARMCL_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {-1, "popen failed"};
  std::array<char, 512> buf;
  while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) r.output += buf.data();
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("swarmcl_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    write("run.cfg",
          "task = navigation\nn = 3\nL = 6\nK = 60\nT = 0.05\nseed = 5\nE = 12\nbatch = 4\n"
          "c_N = 3\nembed_dim = 8\ngoal_features = on\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write(const std::string& name, const std::string& text) { std::ofstream(dir_ / name) << text; }
  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenerateThenInspect) {
  const Result g = run("generate --config " + p("run.cfg") + " --out " + p("d.swcl"));
  ASSERT_EQ(g.status, 0) << g.output;
  const Result i = run("inspect --data " + p("d.swcl"));
  ASSERT_EQ(i.status, 0) << i.output;
  EXPECT_NE(i.output.find("n 3\n"), std::string::npos) << i.output;
  EXPECT_NE(i.output.find("L 6\n"), std::string::npos);
  EXPECT_NE(i.output.find("K 60\n"), std::string::npos);
  EXPECT_NE(i.output.find("T 0.05\n"), std::string::npos);
  EXPECT_NE(i.output.find("task navigation"), std::string::npos);
}

TEST_F(Cli, TrainWritesCurveWithStagedHorizon) {
  ASSERT_EQ(run("generate --config " + p("run.cfg") + " --out " + p("d.swcl")).status, 0);
  const Result t = run("train --quiet --config " + p("run.cfg") + " --data " + p("d.swcl") + " --out-dir " + p("out"));
  ASSERT_EQ(t.status, 0) << t.output;
  EXPECT_TRUE(fs::exists(dir_ / "out" / "final.swck"));
  std::istringstream curve(slurp(dir_ / "out" / "curve.csv"));
  std::string line;
  std::getline(curve, line);
  EXPECT_EQ(line, "step,K_e,loss");
  std::vector<int> change_steps;
  int previous = -1, rows = 0;
  while (std::getline(curve, line)) {
    ++rows;
    const int step = std::stoi(line.substr(0, line.find(',')));
    const int k = std::stoi(line.substr(line.find(',') + 1));
    if (previous != -1 && k != previous) change_steps.push_back(step);
    previous = k;
  }
  EXPECT_EQ(rows, 12);
  EXPECT_EQ(change_steps, (std::vector<int>{4, 7, 10}));
}

TEST_F(Cli, OracleEvalHasZeroLoss) {
  ASSERT_EQ(run("generate --config " + p("run.cfg") + " --out " + p("d.swcl")).status, 0);
  const Result e = run("eval --oracle --config " + p("run.cfg") + " --data " + p("d.swcl") + " --out " + p("m.csv"));
  ASSERT_EQ(e.status, 0) << e.output;
  const std::string csv = slurp(dir_ / "m.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "traj_id,loss,epos,frechet,ncomp");
  EXPECT_NE(csv.find("\nmean,0,0,0,3\n"), std::string::npos) << csv;
}

TEST_F(Cli, PolicyEvalAndPlots) {
  ASSERT_EQ(run("generate --config " + p("run.cfg") + " --out " + p("d.swcl")).status, 0);
  ASSERT_EQ(run("train --quiet --config " + p("run.cfg") + " --data " + p("d.swcl") + " --out-dir " + p("out")).status, 0);
  const Result e = run("eval --checkpoint " + p("out/final.swck") + " --data " + p("d.swcl") + " --sigma 0.1 --out " + p("m.csv"));
  ASSERT_EQ(e.status, 0) << e.output;
  EXPECT_NE(slurp(dir_ / "m.csv").find("\nmean,"), std::string::npos);

  const Result c = run("plot --curve " + p("out/curve.csv") + " --out " + p("curve.svg"));
  ASSERT_EQ(c.status, 0) << c.output;
  EXPECT_NE(slurp(dir_ / "curve.svg").find("<polyline"), std::string::npos);

  const Result t = run("plot --traj --checkpoint " + p("out/final.swck") + " --data " + p("d.swcl") +
                       " --index 2 --out " + p("traj.svg"));
  ASSERT_EQ(t.status, 0) << t.output;
  const std::string svg = slurp(dir_ / "traj.svg");
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_NE(svg.find("<circle"), std::string::npos);
}

TEST_F(Cli, RerunsAreBitwiseIdentical) {
  ASSERT_EQ(run("generate --config " + p("run.cfg") + " --out " + p("a.swcl")).status, 0);
  write("threads.cfg", slurp(dir_ / "run.cfg") + "threads = 3\n");
  ASSERT_EQ(run("generate --config " + p("threads.cfg") + " --out " + p("b.swcl")).status, 0);
  EXPECT_EQ(slurp(dir_ / "a.swcl"), slurp(dir_ / "b.swcl"));

  ASSERT_EQ(run("train --quiet --config " + p("run.cfg") + " --data " + p("a.swcl") + " --out-dir " + p("r1")).status, 0);
  ASSERT_EQ(run("train --quiet --config " + p("threads.cfg") + " --data " + p("a.swcl") + " --out-dir " + p("r2")).status, 0);
  EXPECT_EQ(slurp(dir_ / "r1/final.swck"), slurp(dir_ / "r2/final.swck"));
  EXPECT_EQ(slurp(dir_ / "r1/curve.csv"), slurp(dir_ / "r2/curve.csv"));

  for (const char* out : {"m1.csv", "m2.csv"}) {
    ASSERT_EQ(run("eval --checkpoint " + p("r1/final.swck") + " --data " + p("a.swcl") + " --sigma 0.2 --out " + p(out)).status, 0);
  }
  EXPECT_EQ(slurp(dir_ / "m1.csv"), slurp(dir_ / "m2.csv"));
}

TEST_F(Cli, FailuresExitNonZeroAndLeaveNoOutput) {
  Result r = run("inspect --data " + p("missing.swcl"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("error"), std::string::npos);

  write("bad.cfg", "n = 3\nmystery = 1\n");
  r = run("generate --config " + p("bad.cfg") + " --out " + p("x.swcl"));
  EXPECT_NE(r.status, 0);
  EXPECT_FALSE(fs::exists(dir_ / "x.swcl"));

  write("short.cfg", "n = 4\nL = 2\nK = 3\n");
  r = run("generate --config " + p("short.cfg") + " --out " + p("y.swcl"));
  EXPECT_NE(r.status, 0);
  EXPECT_FALSE(fs::exists(dir_ / "y.swcl"));
  EXPECT_FALSE(fs::exists(dir_ / "y.swcl.partial"));

  EXPECT_NE(run("frobnicate").status, 0);
}

TEST_F(Cli, EvalRejectsRobotCountMismatch) {
  ASSERT_EQ(run("generate --config " + p("run.cfg") + " --out " + p("d.swcl")).status, 0);
  ASSERT_EQ(run("train --quiet --config " + p("run.cfg") + " --data " + p("d.swcl") + " --out-dir " + p("out")).status, 0);
  write("four.cfg", "n = 4\nL = 2\nK = 60\nseed = 1\n");
  ASSERT_EQ(run("generate --config " + p("four.cfg") + " --out " + p("d4.swcl")).status, 0);
  const Result r = run("eval --checkpoint " + p("out/final.swck") + " --data " + p("d4.swcl") + " --out " + p("m.csv"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("n = 3"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(dir_ / "m.csv"));
}

TEST_F(Cli, TrainFailureRemovesFreshOutputDir) {
  ASSERT_EQ(run("generate --config " + p("run.cfg") + " --out " + p("d.swcl")).status, 0);
  write("passage.cfg", "task = passage\nn = 3\nE = 2\n");
  const Result r = run("train --quiet --config " + p("passage.cfg") + " --data " + p("d.swcl") + " --out-dir " + p("gone"));
  EXPECT_NE(r.status, 0);
  EXPECT_FALSE(fs::exists(dir_ / "gone"));
}
