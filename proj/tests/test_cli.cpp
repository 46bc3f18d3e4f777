#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Output {
  int code = -1;
  std::string text;
};

// runs the command line tool with stderr folded into the captured text
Output run(const std::string& args) {
  const std::string cmd = std::string(ELASTICFLOW_BIN) + " " + args + " 2>&1";
  Output out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) out.text += buf.data();
  const int status = pclose(pipe);
  out.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("elasticflow_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST(Cli, ZeroTimeRunWritesOneRow) {
  const auto dir = scratch("zero");
  write(dir / "run.cfg", "t_max = 0\nn_grid = 64\n");
  const auto r = run("simulate --config " + (dir / "run.cfg").string() + " --out " + (dir / "out").string() +
                     " --prepare --override-admissibility");
  ASSERT_EQ(r.code, 0) << r.text;
  EXPECT_EQ(count_lines(slurp(dir / "out" / "trajectory.csv")), 2u);
  EXPECT_TRUE(fs::exists(dir / "out" / "snapshot_0.curve"));
  EXPECT_NE(slurp(dir / "out" / "manifest.txt").find("reason = MaxTime"), std::string::npos);
}

TEST(Cli, InadmissibleStartIsReported) {
  const auto dir = scratch("inadmissible");
  const auto r = run("simulate --out " + (dir / "out").string());
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.text.find("error_category=InadmissibleInitial"), std::string::npos) << r.text;
}

TEST(Cli, CheckAdmissibleNamesSegmentFailures) {
  const auto r = run("check-admissible --initial 'builtin:segment(1)'");
  EXPECT_EQ(r.code, 1);
  std::istringstream in(r.text);
  std::string line;
  bool nondeg = false, third = false;
  while (std::getline(in, line)) {
    if (line.rfind("non-degeneracy", 0) == 0) nondeg = line.find("FAIL") != std::string::npos;
    if (line.rfind("third-order", 0) == 0) third = line.find("FAIL") != std::string::npos;
  }
  EXPECT_TRUE(nondeg) << r.text;
  EXPECT_TRUE(third) << r.text;
  EXPECT_NE(r.text.find("overall=fail"), std::string::npos);
}

TEST(Cli, MalformedConfigIsParseError) {
  const auto dir = scratch("badcfg");
  write(dir / "bad.cfg", "mu = 1\nwidth = 3\n");
  const auto r = run("simulate --config " + (dir / "bad.cfg").string() + " --out " + (dir / "out").string());
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.text.find("error_category=ParseError"), std::string::npos) << r.text;
  EXPECT_NE(r.text.find("line 2"), std::string::npos) << r.text;
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, InvalidValueNamesKey) {
  const auto dir = scratch("badvalue");
  write(dir / "bad.cfg", "dt = -1\n");
  const auto r = run("simulate --config " + (dir / "bad.cfg").string() + " --out " + (dir / "out").string());
  EXPECT_NE(r.text.find("error_category=InvalidValue"), std::string::npos) << r.text;
  EXPECT_NE(r.text.find("dt"), std::string::npos);
}

TEST(Cli, RunsAreByteIdenticalAndVerifiable) {
  const auto dir = scratch("repeat");
  write(dir / "run.cfg", "t_max = 3e-4\nn_grid = 128\nrecord_every = 5\n");
  const std::string common = "simulate --config " + (dir / "run.cfg").string() + " --prepare --override-admissibility";
  ASSERT_EQ(run(common + " --out " + (dir / "a").string()).code, 0);
  ASSERT_EQ(run(common + " --out " + (dir / "b").string()).code, 0);
  EXPECT_EQ(slurp(dir / "a" / "trajectory.csv"), slurp(dir / "b" / "trajectory.csv"));
  EXPECT_EQ(slurp(dir / "a" / "snapshot_60.curve"), slurp(dir / "b" / "snapshot_60.curve"));
  const auto v = run("verify-identities --out " + (dir / "a").string());
  EXPECT_EQ(v.code, 0) << v.text;
  EXPECT_NE(v.text.find("dissipation_defect="), std::string::npos);
  EXPECT_NE(v.text.find("curvature_evolution_defect="), std::string::npos);
}

TEST(Cli, MissingRunDirectoryIsIoError) {
  const auto r = run("verify-identities --out /nonexistent/elasticflow");
  EXPECT_NE(r.text.find("error_category=IoError"), std::string::npos) << r.text;
}

TEST(Cli, RequiresSubcommand) { EXPECT_NE(run("").code, 0); }
