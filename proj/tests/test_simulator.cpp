#include <doctest.h>
#include <fscil/simulator.hpp>

#include <cmath>
#include <string>

using namespace fscil;

namespace {

#define CHECK_CODE(expr, expected)                      \
  do {                                                  \
    try {                                               \
      (void)(expr);                                     \
      FAIL_CHECK("expected " #expected " from " #expr); \
    } catch (const Error& e) {                          \
      CHECK(e.code() == ErrorCode::expected);           \
    }                                                   \
  } while (0)

ScenarioConfig small_scenario() {
  ScenarioConfig cfg;
  cfg.layout = TaskLayout{4, 8, 2, 5};
  cfg.dim = 12;
  cfg.layers = {{3, 0.15, 0.10, LayerRole::Intermediate},
                {7, 0.08, 0.80, LayerRole::Final}};
  cfg.train_per_base_class = 16;
  cfg.test_per_class = 10;
  cfg.seed = 1;
  return cfg;
}

TrainingConfig small_training() {
  TrainingConfig t;
  t.epochs = 4;
  t.step_size = 0.05;
  t.batch_size = 16;
  t.replay_per_class = 3;
  return t;
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("config validation rejects broken scenarios") {
  ScenarioConfig cfg = small_scenario();
  CHECK_NOTHROW(validate_config(cfg));

  ScenarioConfig bad = cfg;
  bad.layers.clear();
  CHECK_CODE(validate_config(bad), BadConfig);

  bad = cfg;
  bad.layers[0].sigma = 0.0;
  CHECK_CODE(validate_config(bad), BadConfig);

  bad = cfg;
  bad.layers[1].gamma = 1.5;
  CHECK_CODE(validate_config(bad), BadConfig);

  bad = cfg;
  bad.layers[0].id = 7;
  CHECK_CODE(validate_config(bad), BadConfig);

  bad = cfg;
  bad.layers[1].role = LayerRole::Intermediate;
  CHECK_CODE(validate_config(bad), BadConfig);

  bad = cfg;
  bad.layers[0].role = LayerRole::Final;
  CHECK_CODE(validate_config(bad), BadConfig);

  bad = cfg;  // final layer must collapse harder than every intermediate
  bad.layers[1].gamma = 0.05;
  CHECK_CODE(validate_config(bad), BadConfig);

  bad = cfg;
  bad.dim = 0;
  CHECK_CODE(validate_config(bad), BadConfig);

  bad = cfg;
  bad.train_per_base_class = 1;
  CHECK_CODE(validate_config(bad), BadConfig);

  bad = cfg;
  bad.layout.n_tasks = 0;
  CHECK_CODE(validate_config(bad), NonPositiveLayout);
}

TEST_CASE("config json round trips and rejects unknown keys") {
  SimulationConfig def = default_simulation_config();
  std::string text = simulation_config_json(def);
  SimulationConfig back = simulation_config_from_json(text);
  CHECK(simulation_config_json(back) == text);

  SimulationConfig partial = simulation_config_from_json(R"({"seed": 5})");
  CHECK(partial.scenario.seed == 5);
  CHECK(partial.scenario.dim == def.scenario.dim);
  CHECK(partial.training.epochs == def.training.epochs);

  CHECK_CODE(simulation_config_from_json(R"({"sed": 5})"), BadConfig);
  CHECK_CODE(simulation_config_from_json("not json"), BadConfig);
  CHECK_CODE(simulation_config_from_json(R"({"weights": {"beta_cos": -1}})"), BadConfig);
}

TEST_CASE("generated banks have the advertised shapes") {
  ScenarioConfig cfg = small_scenario();
  FeatureBank bank = generate_scenario(cfg);
  int classes = cfg.layout.classes_after(cfg.layout.n_tasks);
  REQUIRE(classes == 14);
  REQUIRE(bank.train.size() == cfg.layers.size());
  REQUIRE(bank.test.size() == cfg.layers.size());
  CHECK(bank.class_means.size() == static_cast<std::size_t>(classes));
  CHECK(bank.final_layer == 1);
  REQUIRE(bank.intermediate_layers.size() == 1);
  CHECK(bank.intermediate_layers[0] == 0);
  for (std::size_t l = 0; l < cfg.layers.size(); ++l) {
    REQUIRE(bank.train[l].size() == static_cast<std::size_t>(classes));
    for (int c = 0; c < classes; ++c) {
      std::size_t want = c < cfg.layout.base_classes
                             ? static_cast<std::size_t>(cfg.train_per_base_class)
                             : static_cast<std::size_t>(cfg.layout.shots);
      CHECK(bank.train[l][c].size() == want);
      CHECK(bank.test[l][c].size() == static_cast<std::size_t>(cfg.test_per_class));
      CHECK(bank.train[l][c][0].size() == static_cast<std::size_t>(cfg.dim));
    }
  }
}

TEST_CASE("task class ranges partition the label space") {
  TaskLayout layout{4, 8, 2};
  CHECK(task_class_range(layout, 1) == std::pair<int, int>{0, 8});
  CHECK(task_class_range(layout, 2) == std::pair<int, int>{8, 10});
  CHECK(task_class_range(layout, 4) == std::pair<int, int>{12, 14});
}

TEST_CASE("scenario generation and runs are deterministic") {
  ScenarioConfig cfg = small_scenario();
  FeatureBank a = generate_scenario(cfg);
  FeatureBank b = generate_scenario(cfg);
  CHECK(a.class_means == b.class_means);
  CHECK(a.train[0][0][0] == b.train[0][0][0]);
  CHECK(a.test[1][13] == b.test[1][13]);

  AccuracyMatrix base1 = run_baseline(cfg);
  AccuracyMatrix base2 = run_baseline(cfg);
  CHECK(base1 == base2);

  LossWeights w;
  TrainingConfig t = small_training();
  FrRunResult r1 = run_fr(cfg, w, t);
  FrRunResult r2 = run_fr(cfg, w, t);
  CHECK(r1.ensemble == r2.ensemble);
  REQUIRE(r1.per_branch.size() == r2.per_branch.size());
  for (std::size_t i = 0; i < r1.per_branch.size(); ++i) {
    CHECK(r1.per_branch[i] == r2.per_branch[i]);
  }

  ScenarioConfig other = cfg;
  other.seed = 2;
  CHECK_FALSE(run_baseline(other) == base1);
}

TEST_CASE("near-zero noise makes the baseline almost perfect") {
  ScenarioConfig cfg = small_scenario();
  cfg.layers[0].sigma = 1e-6;
  cfg.layers[0].gamma = 0.0;
  cfg.layers[1].sigma = 1e-6;
  cfg.layers[1].gamma = 0.01;
  AccuracyMatrix m = run_baseline(cfg);
  for (int i = 1; i <= m.sessions(); ++i) {
    for (int j = 1; j <= i; ++j) CHECK(m.at(i, j) >= 99.0);
  }
}

TEST_CASE("stronger final-layer collapse hurts baseline novel accuracy") {
  ScenarioConfig cfg = small_scenario();
  cfg.layers[0].gamma = 0.05;
  cfg.layers[1].sigma = 0.05;
  cfg.test_per_class = 20;
  cfg.layers[1].gamma = 0.10;
  double gentle = novel_only(run_baseline(cfg), cfg.layout.n_tasks);
  cfg.layers[1].gamma = 0.95;
  double harsh = novel_only(run_baseline(cfg), cfg.layout.n_tasks);
  CHECK(gentle > harsh);
}

TEST_CASE("fr runs produce valid matrices for every branch and the ensemble") {
  ScenarioConfig cfg = small_scenario();
  FrRunResult r = run_fr(cfg, LossWeights{}, small_training());
  CHECK(r.ensemble.layout() == cfg.layout);
  CHECK_NOTHROW(r.ensemble.validate());
  REQUIRE(r.per_branch.size() == 1);
  CHECK_NOTHROW(r.per_branch[0].validate());
  REQUIRE(r.branch_layer_ids.size() == 1);
  CHECK(r.branch_layer_ids[0] == 3);
}

TEST_CASE("ablation suite names every cell") {
  SimulationConfig cfg;
  cfg.scenario = small_scenario();
  cfg.training = small_training();
  auto cells = run_ablation_suite(cfg, 4);
  REQUIRE(cells.size() == 6);
  CHECK(cells[0].name == "baseline");
  CHECK(cells[1].name == "full");
  CHECK(cells[2].name == "no_cos");
  CHECK(cells[3].name == "no_cr");
  CHECK(cells[4].name == "no_ir");
  CHECK(cells[5].name == "branch_3");
  for (const auto& cell : cells) {
    CHECK(cell.report.layout == cfg.scenario.layout);
    CHECK(cell.report.per_session.size() == 4);
  }
  std::string table = ablation_json(cells);
  CHECK(table.find("\"no_cr\"") != std::string::npos);
}

}  // TEST_SUITE
