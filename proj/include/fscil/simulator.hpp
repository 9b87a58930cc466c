#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fscil/gaussian.hpp"
#include "fscil/metrics.hpp"
#include "fscil/rectifier.hpp"
#include "fscil/task_matrix.hpp"

namespace fscil {

// ===== configuration ========================================================

enum class LayerRole { Intermediate, Final };

struct LayerSpec {
  int id = 0;
  double sigma = 0.1;  // within-class noise scale
  double gamma = 0.0;  // novel-mean shrinkage toward the nearest base mean
  LayerRole role = LayerRole::Intermediate;
};

// Synthetic feature-space scenario. Novel-class means collapse toward base
// means more strongly at the final layer (gamma_final > gamma_intermediate),
// so intermediate layers generalize better to novel classes by construction.
struct ScenarioConfig {
  TaskLayout layout{9, 60, 5, 5};
  int dim = 32;
  std::vector<LayerSpec> layers;
  int train_per_base_class = 50;
  int test_per_class = 20;
  std::uint64_t seed = 0;
};

struct TrainingConfig {
  int epochs = 15;
  double step_size = 0.05;
  int batch_size = 32;
  int replay_per_class = 5;  // Gaussian draws per old class per epoch
};

struct SimulationConfig {
  ScenarioConfig scenario;
  TrainingConfig training;
  LossWeights weights;
};

// throws BadConfig on violated invariants (positive counts, sigma > 0,
// exactly one final layer, at least one intermediate, gamma ordering)
void validate_config(const ScenarioConfig& cfg);

SimulationConfig default_simulation_config();
// top level mirrors ScenarioConfig field names; optional "training" and
// "weights" objects override defaults
SimulationConfig simulation_config_from_json(std::string_view text);
std::string simulation_config_json(const SimulationConfig& cfg);

// ===== synthetic feature generation =========================================

// per-layer, per-class populations; layer order follows cfg.layers
struct FeatureBank {
  std::vector<std::vector<std::vector<Vec>>> train;  // [layer][class][sample]
  std::vector<std::vector<std::vector<Vec>>> test;   // [layer][class][sample]
  std::vector<Vec> class_means;                      // ideal means, all classes
  int final_layer = -1;                              // index into cfg.layers
  std::vector<int> intermediate_layers;              // indices into cfg.layers
};

// class means uniform on the unit sphere; sample = effective mean + sigma_l *
// noise where the effective novel-class mean is (1-gamma_l)*own +
// gamma_l*nearest base mean; noise draws are independent of gamma so that
// raising gamma moves populations continuously under a fixed seed
FeatureBank generate_scenario(const ScenarioConfig& cfg);

// classes of task j (1-based): base task covers [0, base_classes)
std::pair<int, int> task_class_range(const TaskLayout& layout, int task);

// ===== runs =================================================================

// frozen final-layer nearest-class-mean cosine classifier; prototypes are
// base-class train means extended by novel shot means each session
AccuracyMatrix run_baseline(const ScenarioConfig& cfg);

// incremental state carried across sessions of one FR run
struct SessionState {
  std::vector<RectifierParams> branches;          // one per intermediate layer
  std::vector<PrototypeSet> protos_per_branch;    // rectified space
  PrototypeSet raw_protos;                        // final-layer space (baseline)
  std::vector<std::vector<ClassGaussian>> gaussians;  // [layer][seen class]
  int session = 0;
};

struct FrRunResult {
  AccuracyMatrix ensemble;
  std::vector<AccuracyMatrix> per_branch;
  std::vector<int> branch_layer_ids;
};

// base session: fit Gaussians, train branches on base features (no novel
// classes, so the cross-entropy gate is closed). Each later session: extend
// prototypes with rectified shot means, estimate novel Gaussians (top-k
// covariance transfer), train on shots plus Gaussian replay, evaluate every
// seen task per branch and as the softmax-mean ensemble.
FrRunResult run_fr(const ScenarioConfig& cfg, const LossWeights& weights,
                   const TrainingConfig& training);

// ===== ablation harness =====================================================

struct AblationCell {
  std::string name;
  MetricReport report;
};

// cells: baseline (FR off), full ensemble, one cell per dropped loss term,
// and one per single branch
std::vector<AblationCell> run_ablation_suite(const SimulationConfig& cfg, int grid_points);

std::string ablation_json(const std::vector<AblationCell>& cells);

}  // namespace fscil
