#include "swarmcl/config.hpp"

#include <gtest/gtest.h>

using namespace swarmcl;

TEST(RunConfig, DefaultsWhenEmpty) {
  const RunConfig c = parse_run_config("");
  EXPECT_EQ(c.task, Task::kNavigation);
  EXPECT_EQ(c.n, 6u);
  EXPECT_EQ(c.L, 100u);
  EXPECT_EQ(c.K, 200u);
  EXPECT_EQ(c.T, 0.05);
  EXPECT_EQ(c.c_K, 1u);
  EXPECT_EQ(c.c_N, 150u);
  EXPECT_EQ(c.K_init, 1u);
  EXPECT_EQ(c.baseline_K, 5u);
  EXPECT_EQ(c.lr, 0.005);
  EXPECT_EQ(c.E, 5000u);
  EXPECT_TRUE(c.curriculum);
  EXPECT_EQ(c.expert, ExpertConfig{});
  EXPECT_FALSE(c.goal_features);
}

TEST(RunConfig, ParsesDocumentedKeys) {
  const RunConfig c = parse_run_config(R"(# passage run
task = passage
n = 4
L=20
K = 300   # long horizon
T = 0.1
sigma = 0.1
seed = 42
curriculum = off
c_K = 2
c_N = 50
K_init = 3
baseline_K = 7
lr = 0.001
E = 900
batch = 16
comm_radius = 1.2
u_max = 2
k_attract = 1.5
k_repulse = 0.4
k_damp = 1.1
safe_distance = 0.45
waypoint_offset = 0.6
switch_radius = 0.25
goal_features = on
split = test
)");
  EXPECT_EQ(c.task, Task::kPassage);
  EXPECT_EQ(c.n, 4u);
  EXPECT_EQ(c.L, 20u);
  EXPECT_EQ(c.K, 300u);
  EXPECT_EQ(c.T, 0.1);
  EXPECT_EQ(c.sigma, 0.1);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_FALSE(c.curriculum);
  EXPECT_EQ(c.c_K, 2u);
  EXPECT_EQ(c.c_N, 50u);
  EXPECT_EQ(c.K_init, 3u);
  EXPECT_EQ(c.baseline_K, 7u);
  EXPECT_EQ(c.lr, 0.001);
  EXPECT_EQ(c.E, 900u);
  EXPECT_EQ(c.batch, 16u);
  EXPECT_EQ(c.comm_radius, 1.2);
  EXPECT_EQ(c.u_max, 2.0);
  EXPECT_EQ(c.expert.k_attract, 1.5);
  EXPECT_EQ(c.expert.switch_radius, 0.25);
  EXPECT_TRUE(c.goal_features);
  EXPECT_EQ(c.split, Split::kTest);

  const DatasetSpec d = c.dataset_spec();
  EXPECT_EQ(d.task, Task::kPassage);
  EXPECT_EQ(d.robots, 4u);
  EXPECT_EQ(d.trajectories, 20u);
  EXPECT_EQ(d.horizon, 300u);
  EXPECT_EQ(d.dt, 0.1);
  EXPECT_EQ(d.expert.k_damp, 1.1);

  const TrainConfig t = c.train_config();
  EXPECT_EQ(t.steps, 900u);
  EXPECT_EQ(t.batch, 16u);
  EXPECT_EQ(t.sigma, 0.1);
  EXPECT_FALSE(t.curriculum);
  EXPECT_EQ(t.baseline_K, 7u);
  EXPECT_TRUE(t.policy.goal_features);
}

TEST(RunConfig, Errors) {
  EXPECT_THROW(parse_run_config("lerning_rate = 0.1\n"), ConfigError);
  EXPECT_THROW(parse_run_config("n 4\n"), ConfigError);
  EXPECT_THROW(parse_run_config("n = four\n"), ConfigError);
  EXPECT_THROW(parse_run_config("n = 4x\n"), ConfigError);
  EXPECT_THROW(parse_run_config("curriculum = maybe\n"), ConfigError);
  EXPECT_THROW(parse_run_config("task = swarming\n"), ConfigError);
  EXPECT_THROW(load_run_config("/nonexistent/run.cfg"), ConfigError);
}

TEST(RunConfig, UnknownKeyNamesLine) {
  try {
    parse_run_config("n = 3\n\nbogus = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(RunConfig, KeyListCoversEveryParsableKey) {
  for (const std::string& key : run_config_keys()) {
    const std::string value = key == "task" ? "navigation" : key == "split" ? "train"
                              : (key == "curriculum" || key == "goal_features") ? "on" : "1";
    EXPECT_NO_THROW(parse_run_config(key + " = " + value + "\n")) << key;
  }
}
