#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "trustdyn/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kTmp = fs::temp_directory_path() / "trustdyn_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(TRUSTDYN_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string dir(const std::string& name) { return (kTmp / name).string(); }

std::string slurp(const std::string& d, const std::string& f) { return trustdyn::read_file(fs::path(d) / f); }

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fs::remove_all(kTmp);
    fs::create_directories(kTmp);
    ASSERT_EQ(run("simulate --agents 5 --trials 30 --seed 3 --mix 0.6,0.2,0.2 --out " + dir("sim")), 0);
  }
  static std::string data() { return dir("sim") + "/dataset.csv"; }
};

}  // namespace

TEST_F(Cli, SimulateIsReproducible) {
  ASSERT_EQ(run("simulate --agents 5 --trials 30 --seed 3 --mix 0.6,0.2,0.2 --out " + dir("sim2")), 0);
  for (const char* f : {"dataset.csv", "labels.csv", "simulate_config.ini"})
    EXPECT_EQ(slurp(dir("sim"), f), slurp(dir("sim2"), f)) << f;
  ASSERT_EQ(run("simulate --agents 5 --trials 30 --seed 4 --mix 0.6,0.2,0.2 --out " + dir("sim3")), 0);
  EXPECT_NE(slurp(dir("sim"), "dataset.csv"), slurp(dir("sim3"), "dataset.csv"));
}

TEST_F(Cli, ConfigFileReproducesRun) {
  ASSERT_EQ(run("--config " + dir("sim") + "/simulate_config.ini simulate --out " + dir("sim_cfg")), 0);
  EXPECT_EQ(slurp(dir("sim"), "dataset.csv"), slurp(dir("sim_cfg"), "dataset.csv"));
}

TEST_F(Cli, PipelineRunsAndIsByteIdentical) {
  for (const char* tag : {"a", "b"}) {
    const std::string d = dir(std::string("pipe_") + tag);
    ASSERT_EQ(run("fit-prior --data " + data() + " --out " + d), 0);
    ASSERT_EQ(run("predict --data " + data() + " --agent agent_001 --prior " + d + "/prior.json --out " + d), 0);
    ASSERT_EQ(run("evaluate --data " + data() + " --models proposed,armav --out " + d), 0);
    ASSERT_EQ(run("sweep --data " + data() + " --gaps 5,10 --out " + d), 0);
    ASSERT_EQ(run("cluster --data " + data() + " --rmse " + d + "/per_agent.csv --k 3 --labels " + dir("sim") +
                  "/labels.csv --out " + d),
              0);
  }
  for (const char* f : {"prior.json", "trajectory.csv", "per_agent.csv", "summary.csv", "differences.csv",
                        "sweep.csv", "clusters.csv", "evaluate_config.ini"})
    EXPECT_EQ(slurp(dir("pipe_a"), f), slurp(dir("pipe_b"), f)) << f;
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("bogus"), 2);
  EXPECT_EQ(run("simulate --reliability 1.5 --out " + dir("x")), 2);
  EXPECT_EQ(run("simulate --mix 0.5,0.5 --out " + dir("x")), 2);
  EXPECT_EQ(run("evaluate --data " + data() + " --models proposed,lstm --out " + dir("x")), 2);
  EXPECT_EQ(run("sweep --data " + data() + " --out " + dir("x")), 2);
  EXPECT_EQ(run("sweep --data " + data() + " --gaps 5 --durations 5 --out " + dir("x")), 2);
  EXPECT_EQ(run("fit-prior --data /nonexistent.csv --out " + dir("x")), 2);
  EXPECT_EQ(run("predict --data " + data() + " --agent nobody --prior " + dir("pipe_a") + "/prior.json --out " +
                dir("x")),
            2);
}

TEST_F(Cli, RuntimeFailuresExitOne) {
  trustdyn::write_file(kTmp / "bad.csv", "agent_id,trial,performance,trust\na,1,1,7\n");
  EXPECT_EQ(run("fit-prior --data " + (kTmp / "bad.csv").string() + " --out " + dir("x")), 1);
  trustdyn::write_file(kTmp / "prior.json", "{\"alpha0\": {\"family\": \"gamma\"}}");
  EXPECT_EQ(run("predict --data " + data() + " --agent agent_001 --prior " + (kTmp / "prior.json").string() +
                " --out " + dir("x")),
            1);
}
