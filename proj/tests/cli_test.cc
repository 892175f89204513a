#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

struct Invocation {
  int exit_code = -1;
  std::string output;
};

// Runs the CLI with `args`, capturing stdout and stderr together.
Invocation Cli(const std::string& args) {
  const std::string command = std::string(CONIC_QM_BIN) + " " + args + " 2>&1";
  Invocation result;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) {
    result.output.append(buf, n);
  }
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class CliTest : public testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("conic_qm_cli_" +
            std::string(
                testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream(path) << content;
    return path.string();
  }

  static std::string Sample(const std::string& name) {
    return std::string(CONIC_QM_SCENARIOS) + "/" + name;
  }

  fs::path dir_;
};

TEST_F(CliTest, RunIsDeterministic) {
  const std::string a = (dir_ / "a.json").string();
  const std::string b = (dir_ / "b.json").string();
  ASSERT_EQ(Cli("run " + Sample("qubit_dephasing.json") + " --out " + a)
                .exit_code,
            0);
  ASSERT_EQ(Cli("run " + Sample("qubit_dephasing.json") + " --out " + b)
                .exit_code,
            0);
  const std::string first = ReadFile(a);
  EXPECT_FALSE(first.empty());
  EXPECT_EQ(first, ReadFile(b));
  EXPECT_NE(first.find("\"status\": \"ok\""), std::string::npos);
}

TEST_F(CliTest, RunToStdout) {
  const Invocation r = Cli("run " + Sample("spin_rotation.json"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("\"results\""), std::string::npos);
}

TEST_F(CliTest, UnnormalizedStateExitsTwo) {
  const std::string path = Write("bad.json", R"({
    "cone": {"kind": "psd", "size": 2},
    "state": {"matrix": [[0.4, 0], [0, 0.5]]},
    "quantity": {"type": "hermitian", "matrix": [[1, 0], [0, -1]]}})");
  const Invocation r = Cli("run " + path);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("state not normalized"), std::string::npos)
      << r.output;
}

TEST_F(CliTest, SyntaxErrorExitsTwo) {
  const Invocation r = Cli("run " + Write("broken.json", "{\"cone\": "));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("broken.json"), std::string::npos) << r.output;
}

TEST_F(CliTest, BadFlagExitsTwo) {
  EXPECT_EQ(Cli("run " + Sample("qubit_dephasing.json") + " --route sideways")
                .exit_code,
            2);
  EXPECT_EQ(Cli("frobnicate").exit_code, 2);
}

TEST_F(CliTest, UnresolvableEpsilonExitsThree) {
  const Invocation r =
      Cli("run " + Sample("qubit_dephasing.json") + " --eps 0.001");
  EXPECT_EQ(r.exit_code, 3) << r.output;
}

TEST_F(CliTest, UnresolvedProjectionExitsFour) {
  // Two nodes cannot average out the flow, so the numeric projection is not
  // stationary and no report is written.
  const std::string out = (dir_ / "r.json").string();
  const Invocation r = Cli("run " + Sample("qubit_dephasing.json") +
                           " --nodes 2 --eps 2 --out " + out);
  EXPECT_EQ(r.exit_code, 4) << r.output;
  EXPECT_NE(r.output.find("not fixed by the flow"), std::string::npos)
      << r.output;
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, ConvergeWritesCsv) {
  const std::string out = (dir_ / "c.csv").string();
  const Invocation r = Cli("converge " + Sample("qubit_dephasing.json") +
                           " --eps 0.5,0.05 --out " + out);
  EXPECT_EQ(r.exit_code, 0) << r.output;
  const std::string csv = ReadFile(out);
  EXPECT_EQ(csv.rfind("epsilon,error_norm,nodes,wall_time_ms\n"
                      "0.5,0.09569649651041",
                      0),
            0u)
      << csv;
}

TEST_F(CliTest, BatchWritesDirectory) {
  const fs::path out = dir_ / "reports";
  const Invocation r =
      Cli("run " + Sample("qubit_dephasing.json") + " " +
          Sample("classical_die.json") + " " + Sample("spin_rotation.json") +
          " --out " + out.string());
  EXPECT_EQ(r.exit_code, 0) << r.output;
  for (const char* stem : {"qubit_dephasing", "classical_die", "spin_rotation"}) {
    EXPECT_TRUE(fs::exists(out / (std::string(stem) + ".report.json")))
        << stem;
  }
}

TEST_F(CliTest, SelfcheckPasses) {
  const Invocation r = Cli("selfcheck");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(r.output.find("FAIL"), std::string::npos) << r.output;
}

TEST_F(CliTest, SelfcheckNamesFailures) {
  const Invocation r = Cli("selfcheck --tolerance-scale 1e-30");
  EXPECT_EQ(r.exit_code, 4);
  EXPECT_NE(r.output.find("FAIL measurement.born_equivalence"), std::string::npos)
      << r.output;
}

}  // namespace
