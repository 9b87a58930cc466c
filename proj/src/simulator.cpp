#include "fscil/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <json.hpp>

namespace fscil {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kTopK = 2;  // base classes averaged into a novel covariance

// rng stream tags; every random decision hangs off (seed, tag, ...) so runs
// are reproducible and gamma/sigma edits never shift unrelated draws
constexpr std::uint64_t kStreamMeans = 1;
constexpr std::uint64_t kStreamTrainNoise = 2;
constexpr std::uint64_t kStreamTestNoise = 3;
constexpr std::uint64_t kStreamInit = 4;
constexpr std::uint64_t kStreamBatch = 5;
constexpr std::uint64_t kStreamReplay = 6;

Rng sub_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  return Rng(mix_seed(mix_seed(mix_seed(seed, a), b), c));
}

Vec unit_sphere(int dim, Rng& rng) {
  Vec v(dim);
  double n = 0.0;
  do {
    for (double& x : v) x = rng.normal();
    n = norm(v);
  } while (n == 0.0);
  return scaled(v, 1.0 / n);
}

Vec mean_of(const std::vector<Vec>& xs) {
  Vec m(xs.front().size(), 0.0);
  for (const Vec& x : xs) axpy(1.0, x, m);
  for (double& v : m) v /= static_cast<double>(xs.size());
  return m;
}

int argmax_lowest(const Vec& v) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(v.size()); ++k) {
    if (v[k] > v[best]) best = k;
  }
  return best;
}

}  // namespace

// ===== configuration ========================================================

void validate_config(const ScenarioConfig& cfg) {
  validate_layout(cfg.layout);
  if (cfg.dim < 1) raise(ErrorCode::BadConfig, "dim must be positive");
  if (cfg.train_per_base_class < 2) {
    raise(ErrorCode::BadConfig, "need at least 2 train samples per base class");
  }
  if (cfg.test_per_class < 1) {
    raise(ErrorCode::BadConfig, "sample counts must be positive");
  }
  if (cfg.layers.empty()) raise(ErrorCode::BadConfig, "no layers configured");
  int finals = 0;
  double gamma_final = 0.0;
  for (const LayerSpec& layer : cfg.layers) {
    if (!(layer.sigma > 0.0)) raise(ErrorCode::BadConfig, "sigma must be > 0");
    if (!(layer.gamma >= 0.0 && layer.gamma <= 1.0)) {
      raise(ErrorCode::BadConfig, "gamma must lie in [0,1]");
    }
    for (const LayerSpec& other : cfg.layers) {
      if (&other != &layer && other.id == layer.id) {
        raise(ErrorCode::BadConfig, "duplicate layer id " + std::to_string(layer.id));
      }
    }
    if (layer.role == LayerRole::Final) {
      ++finals;
      gamma_final = layer.gamma;
    }
  }
  if (finals != 1) raise(ErrorCode::BadConfig, "exactly one final layer required");
  if (static_cast<int>(cfg.layers.size()) - finals < 1) {
    raise(ErrorCode::BadConfig, "at least one intermediate layer required");
  }
  for (const LayerSpec& layer : cfg.layers) {
    if (layer.role == LayerRole::Intermediate && !(gamma_final > layer.gamma)) {
      raise(ErrorCode::BadConfig, "final-layer gamma must exceed intermediate gamma");
    }
  }
}

static void validate_training(const TrainingConfig& t) {
  if (t.epochs < 0 || t.batch_size < 1 || t.replay_per_class < 0 ||
      !std::isfinite(t.step_size)) {
    raise(ErrorCode::BadConfig, "bad training config");
  }
}

SimulationConfig default_simulation_config() {
  SimulationConfig cfg;
  cfg.scenario.layout = TaskLayout{9, 60, 5, 5};
  cfg.scenario.dim = 32;
  // two noisy branches (the final-feature anchor earns its keep by denoising)
  // and one clean branch (the relation-transfer teacher earns its keep)
  cfg.scenario.layers = {
      {8, 0.30, 0.15, LayerRole::Intermediate},
      {9, 0.30, 0.15, LayerRole::Intermediate},
      {10, 0.18, 0.15, LayerRole::Intermediate},
      {12, 0.10, 0.70, LayerRole::Final},
  };
  cfg.scenario.train_per_base_class = 50;
  cfg.scenario.test_per_class = 20;
  cfg.scenario.seed = 0;
  cfg.training = TrainingConfig{};
  cfg.weights = LossWeights{};
  return cfg;
}

namespace {

void expect_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                 const char* where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* name : allowed) ok = ok || key == name;
    if (!ok) raise(ErrorCode::BadConfig, std::string("unknown key '") + key + "' in " + where);
  }
}

}  // namespace

SimulationConfig simulation_config_from_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::BadConfig, std::string("bad config JSON: ") + e.what());
  }
  SimulationConfig cfg = default_simulation_config();
  try {
    if (!doc.is_object()) raise(ErrorCode::BadConfig, "config must be an object");
    expect_keys(doc,
                {"layout", "dim", "layers", "train_per_base_class", "test_per_class",
                 "seed", "training", "weights"},
                "config");
    if (doc.contains("layout")) {
      const auto& jl = doc["layout"];
      expect_keys(jl, {"n_tasks", "base_classes", "novel_classes", "shots"}, "layout");
      TaskLayout& layout = cfg.scenario.layout;
      if (jl.contains("n_tasks")) layout.n_tasks = jl["n_tasks"].get<int>();
      if (jl.contains("base_classes")) layout.base_classes = jl["base_classes"].get<int>();
      if (jl.contains("novel_classes")) layout.novel_classes = jl["novel_classes"].get<int>();
      if (jl.contains("shots")) layout.shots = jl["shots"].get<int>();
    }
    if (doc.contains("dim")) cfg.scenario.dim = doc["dim"].get<int>();
    if (doc.contains("layers")) {
      cfg.scenario.layers.clear();
      for (const auto& jl : doc["layers"]) {
        expect_keys(jl, {"id", "sigma", "gamma", "role"}, "layer");
        LayerSpec layer;
        layer.id = jl.at("id").get<int>();
        layer.sigma = jl.at("sigma").get<double>();
        layer.gamma = jl.at("gamma").get<double>();
        std::string role = jl.at("role").get<std::string>();
        if (role == "final") {
          layer.role = LayerRole::Final;
        } else if (role == "intermediate") {
          layer.role = LayerRole::Intermediate;
        } else {
          raise(ErrorCode::BadConfig, "layer role must be 'intermediate' or 'final'");
        }
        cfg.scenario.layers.push_back(layer);
      }
    }
    if (doc.contains("train_per_base_class")) {
      cfg.scenario.train_per_base_class = doc["train_per_base_class"].get<int>();
    }
    if (doc.contains("test_per_class")) {
      cfg.scenario.test_per_class = doc["test_per_class"].get<int>();
    }
    if (doc.contains("seed")) cfg.scenario.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("training")) {
      const auto& jt = doc["training"];
      expect_keys(jt, {"epochs", "step_size", "batch_size", "replay_per_class"}, "training");
      if (jt.contains("epochs")) cfg.training.epochs = jt["epochs"].get<int>();
      if (jt.contains("step_size")) cfg.training.step_size = jt["step_size"].get<double>();
      if (jt.contains("batch_size")) cfg.training.batch_size = jt["batch_size"].get<int>();
      if (jt.contains("replay_per_class")) {
        cfg.training.replay_per_class = jt["replay_per_class"].get<int>();
      }
    }
    if (doc.contains("weights")) {
      const auto& jw = doc["weights"];
      expect_keys(jw, {"beta_cos", "beta_cr", "beta_ir"}, "weights");
      if (jw.contains("beta_cos")) cfg.weights.beta_cos = jw["beta_cos"].get<double>();
      if (jw.contains("beta_cr")) cfg.weights.beta_cr = jw["beta_cr"].get<double>();
      if (jw.contains("beta_ir")) cfg.weights.beta_ir = jw["beta_ir"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::BadConfig, std::string("bad config field: ") + e.what());
  }
  validate_config(cfg.scenario);
  validate_training(cfg.training);
  if (cfg.weights.beta_cos < 0 || cfg.weights.beta_cr < 0 || cfg.weights.beta_ir < 0) {
    raise(ErrorCode::BadConfig, "loss weights must be nonnegative");
  }
  return cfg;
}

std::string simulation_config_json(const SimulationConfig& cfg) {
  ordered_json doc;
  doc["layout"] = {{"n_tasks", cfg.scenario.layout.n_tasks},
                   {"base_classes", cfg.scenario.layout.base_classes},
                   {"novel_classes", cfg.scenario.layout.novel_classes},
                   {"shots", cfg.scenario.layout.shots}};
  doc["dim"] = cfg.scenario.dim;
  doc["layers"] = ordered_json::array();
  for (const LayerSpec& layer : cfg.scenario.layers) {
    doc["layers"].push_back(
        {{"id", layer.id},
         {"sigma", layer.sigma},
         {"gamma", layer.gamma},
         {"role", layer.role == LayerRole::Final ? "final" : "intermediate"}});
  }
  doc["train_per_base_class"] = cfg.scenario.train_per_base_class;
  doc["test_per_class"] = cfg.scenario.test_per_class;
  doc["seed"] = cfg.scenario.seed;
  doc["training"] = {{"epochs", cfg.training.epochs},
                     {"step_size", cfg.training.step_size},
                     {"batch_size", cfg.training.batch_size},
                     {"replay_per_class", cfg.training.replay_per_class}};
  doc["weights"] = {{"beta_cos", cfg.weights.beta_cos},
                    {"beta_cr", cfg.weights.beta_cr},
                    {"beta_ir", cfg.weights.beta_ir}};
  return doc.dump(2) + "\n";
}

// ===== synthetic feature generation =========================================

std::pair<int, int> task_class_range(const TaskLayout& layout, int task) {
  if (task < 1 || task > layout.n_tasks) {
    raise(ErrorCode::SessionOutOfRange, "task " + std::to_string(task));
  }
  if (task == 1) return {0, layout.base_classes};
  int lo = layout.base_classes + (task - 2) * layout.novel_classes;
  return {lo, lo + layout.novel_classes};
}

FeatureBank generate_scenario(const ScenarioConfig& cfg) {
  validate_config(cfg);
  const TaskLayout& layout = cfg.layout;
  int total = layout.classes_after(layout.n_tasks);
  int n_layers = static_cast<int>(cfg.layers.size());

  FeatureBank bank;
  Rng mean_rng = sub_rng(cfg.seed, kStreamMeans);
  bank.class_means.reserve(total);
  for (int c = 0; c < total; ++c) bank.class_means.push_back(unit_sphere(cfg.dim, mean_rng));

  for (int li = 0; li < n_layers; ++li) {
    if (cfg.layers[li].role == LayerRole::Final) {
      bank.final_layer = li;
    } else {
      bank.intermediate_layers.push_back(li);
    }
  }

  // nearest base mean per novel class (highest cosine; means are unit)
  std::vector<int> nearest(total, -1);
  for (int c = layout.base_classes; c < total; ++c) {
    int best = 0;
    double best_sim = dot(bank.class_means[c], bank.class_means[0]);
    for (int b = 1; b < layout.base_classes; ++b) {
      double sim = dot(bank.class_means[c], bank.class_means[b]);
      if (sim > best_sim) {
        best_sim = sim;
        best = b;
      }
    }
    nearest[c] = best;
  }

  // effective per-layer means: novel means shrink toward the nearest base mean
  std::vector<std::vector<Vec>> eff(n_layers, std::vector<Vec>(total));
  for (int li = 0; li < n_layers; ++li) {
    double gamma = cfg.layers[li].gamma;
    for (int c = 0; c < total; ++c) {
      if (c < layout.base_classes) {
        eff[li][c] = bank.class_means[c];
      } else {
        Vec m = scaled(bank.class_means[c], 1.0 - gamma);
        axpy(gamma, bank.class_means[nearest[c]], m);
        eff[li][c] = std::move(m);
      }
    }
  }

  // Draw order (class, sample, layer, dim) never depends on gamma, so two
  // configs differing only in gamma see identical noise.
  auto fill = [&](std::vector<std::vector<std::vector<Vec>>>& store, int base_count,
                  int novel_count, std::uint64_t stream) {
    store.assign(n_layers, std::vector<std::vector<Vec>>(total));
    Rng rng = sub_rng(cfg.seed, stream);
    for (int c = 0; c < total; ++c) {
      int count = c < layout.base_classes ? base_count : novel_count;
      for (int li = 0; li < n_layers; ++li) store[li][c].reserve(count);
      for (int s = 0; s < count; ++s) {
        for (int li = 0; li < n_layers; ++li) {
          Vec x = eff[li][c];
          double sigma = cfg.layers[li].sigma;
          for (double& v : x) v += sigma * rng.normal();
          store[li][c].push_back(std::move(x));
        }
      }
    }
  };
  fill(bank.train, cfg.train_per_base_class, layout.shots, kStreamTrainNoise);
  fill(bank.test, cfg.test_per_class, cfg.test_per_class, kStreamTestNoise);
  return bank;
}

// ===== baseline run =========================================================

namespace {

double ncm_task_accuracy(const PrototypeSet& protos, const FeatureBank& bank, int layer,
                         const TaskLayout& layout, int task) {
  auto [lo, hi] = task_class_range(layout, task);
  int correct = 0, count = 0;
  for (int c = lo; c < hi; ++c) {
    for (const Vec& x : bank.test[layer][c]) {
      Vec z = cosine_logits(protos, x);
      if (protos.class_id(argmax_lowest(z)) == c) ++correct;
      ++count;
    }
  }
  return 100.0 * correct / count;
}

}  // namespace

AccuracyMatrix run_baseline(const ScenarioConfig& cfg) {
  FeatureBank bank = generate_scenario(cfg);
  int final_layer = bank.final_layer;
  const TaskLayout& layout = cfg.layout;

  AccuracyMatrix m(layout);
  PrototypeSet protos;
  for (int i = 1; i <= layout.n_tasks; ++i) {
    auto [lo, hi] = task_class_range(layout, i);
    for (int c = lo; c < hi; ++c) protos.add(c, mean_of(bank.train[final_layer][c]));
    for (int j = 1; j <= i; ++j) {
      m.set(i, j, ncm_task_accuracy(protos, bank, final_layer, layout, j));
    }
  }
  return m;
}

// ===== FR run ===============================================================

namespace {

struct RunContext {
  const ScenarioConfig& cfg;
  const LossWeights& weights;
  const TrainingConfig& training;
  const FeatureBank& bank;
  SessionState& st;
};

// one session of gradient descent for one branch
void train_branch(RunContext& ctx, int branch, int session,
                  const std::unordered_set<int>& novel_set, const PrototypeSet& protos) {
  const TaskLayout& layout = ctx.cfg.layout;
  int final_layer = ctx.bank.final_layer;
  int inter_layer = ctx.bank.intermediate_layers[branch];
  RectifierParams& params = ctx.st.branches[branch];

  Rng batch_rng = sub_rng(ctx.cfg.seed, kStreamBatch, branch * 1000 + session);
  Rng replay_rng = sub_rng(ctx.cfg.seed, kStreamReplay, branch * 1000 + session);

  for (int epoch = 0; epoch < ctx.training.epochs; ++epoch) {
    std::vector<BatchSample> samples;
    if (session == 1) {
      for (int c = 0; c < layout.base_classes; ++c) {
        const auto& finals = ctx.bank.train[final_layer][c];
        const auto& inters = ctx.bank.train[inter_layer][c];
        for (std::size_t s = 0; s < finals.size(); ++s) {
          samples.push_back({finals[s], inters[s], c});
        }
      }
    } else {
      auto [lo, hi] = task_class_range(layout, session);
      for (int c = lo; c < hi; ++c) {
        const auto& finals = ctx.bank.train[final_layer][c];
        const auto& inters = ctx.bank.train[inter_layer][c];
        for (std::size_t s = 0; s < finals.size(); ++s) {
          samples.push_back({finals[s], inters[s], c});
        }
      }
      // pseudo-features of every old class, drawn from the stored Gaussians
      for (int c = 0; c < lo; ++c) {
        auto finals = sample_gaussian(ctx.st.gaussians[final_layer][c],
                                      ctx.training.replay_per_class, replay_rng);
        auto inters = sample_gaussian(ctx.st.gaussians[inter_layer][c],
                                      ctx.training.replay_per_class, replay_rng);
        for (int s = 0; s < ctx.training.replay_per_class; ++s) {
          samples.push_back({std::move(finals[s]), std::move(inters[s]), c});
        }
      }
    }

    batch_rng.shuffle(samples);
    for (std::size_t start = 0; start < samples.size(); start += ctx.training.batch_size) {
      std::size_t stop = std::min(samples.size(), start + ctx.training.batch_size);
      std::vector<BatchSample> batch(samples.begin() + start, samples.begin() + stop);
      TotalLoss loss = total_loss(batch, protos, params, ctx.weights, novel_set);
      apply_gradient(params, loss.grads, ctx.training.step_size);
    }
  }
}

Vec rectified_class_mean(const RunContext& ctx, int branch, int c) {
  int final_layer = ctx.bank.final_layer;
  int inter_layer = ctx.bank.intermediate_layers[branch];
  const auto& finals = ctx.bank.train[final_layer][c];
  const auto& inters = ctx.bank.train[inter_layer][c];
  Vec acc(ctx.cfg.dim, 0.0);
  for (std::size_t s = 0; s < finals.size(); ++s) {
    axpy(1.0, rectify(ctx.st.branches[branch], finals[s], inters[s]), acc);
  }
  for (double& v : acc) v /= static_cast<double>(finals.size());
  return acc;
}

void evaluate_session(RunContext& ctx, int session, FrRunResult& out) {
  const TaskLayout& layout = ctx.cfg.layout;
  int final_layer = ctx.bank.final_layer;
  int n_branches = static_cast<int>(ctx.st.branches.size());

  for (int j = 1; j <= session; ++j) {
    auto [lo, hi] = task_class_range(layout, j);
    int count = 0, correct_ens = 0;
    std::vector<int> correct_branch(n_branches, 0);
    for (int c = lo; c < hi; ++c) {
      std::size_t n_test = ctx.bank.test[final_layer][c].size();
      for (std::size_t s = 0; s < n_test; ++s) {
        const Vec& x_final = ctx.bank.test[final_layer][c][s];
        Vec probs(ctx.st.protos_per_branch[0].size(), 0.0);
        for (int b = 0; b < n_branches; ++b) {
          const Vec& x_inter = ctx.bank.test[ctx.bank.intermediate_layers[b]][c][s];
          Vec z = cosine_logits(ctx.st.protos_per_branch[b],
                                rectify(ctx.st.branches[b], x_final, x_inter));
          if (ctx.st.protos_per_branch[b].class_id(argmax_lowest(z)) == c) {
            ++correct_branch[b];
          }
          axpy(1.0 / n_branches, softmax(z), probs);
        }
        if (ctx.st.protos_per_branch[0].class_id(argmax_lowest(probs)) == c) ++correct_ens;
        ++count;
      }
    }
    out.ensemble.set(session, j, 100.0 * correct_ens / count);
    for (int b = 0; b < n_branches; ++b) {
      out.per_branch[b].set(session, j, 100.0 * correct_branch[b] / count);
    }
  }
}

}  // namespace

FrRunResult run_fr(const ScenarioConfig& cfg, const LossWeights& weights,
                   const TrainingConfig& training) {
  validate_training(training);
  FeatureBank bank = generate_scenario(cfg);
  if (bank.intermediate_layers.empty()) {
    raise(ErrorCode::BadConfig, "run_fr needs at least one intermediate layer");
  }
  const TaskLayout& layout = cfg.layout;
  int final_layer = bank.final_layer;
  int n_branches = static_cast<int>(bank.intermediate_layers.size());
  int n_layers = static_cast<int>(cfg.layers.size());

  SessionState st;
  st.session = 1;
  for (int b = 0; b < n_branches; ++b) {
    Rng init_rng = sub_rng(cfg.seed, kStreamInit, b);
    st.branches.push_back(init_rectifier(cfg.dim, init_rng));
  }
  st.protos_per_branch.resize(n_branches);

  // frozen final-layer class means anchor the base-session losses
  for (int c = 0; c < layout.base_classes; ++c) {
    st.raw_protos.add(c, mean_of(bank.train[final_layer][c]));
  }
  st.gaussians.assign(n_layers, {});
  for (int li = 0; li < n_layers; ++li) {
    for (int c = 0; c < layout.base_classes; ++c) {
      st.gaussians[li].push_back(fit_gaussian(bank.train[li][c], c, cfg.layers[li].id));
    }
  }

  RunContext ctx{cfg, weights, training, bank, st};
  std::unordered_set<int> novel_seen;

  for (int b = 0; b < n_branches; ++b) train_branch(ctx, b, 1, novel_seen, st.raw_protos);
  for (int b = 0; b < n_branches; ++b) {
    for (int c = 0; c < layout.base_classes; ++c) {
      st.protos_per_branch[b].add(c, rectified_class_mean(ctx, b, c));
    }
  }

  FrRunResult out;
  out.ensemble = AccuracyMatrix(layout);
  out.per_branch.assign(n_branches, AccuracyMatrix(layout));
  for (int b = 0; b < n_branches; ++b) {
    out.branch_layer_ids.push_back(cfg.layers[bank.intermediate_layers[b]].id);
  }
  evaluate_session(ctx, 1, out);

  for (int session = 2; session <= layout.n_tasks; ++session) {
    st.session = session;
    auto [lo, hi] = task_class_range(layout, session);

    // 1. extend prototypes with rectified (and raw final-layer) shot means
    for (int b = 0; b < n_branches; ++b) {
      for (int c = lo; c < hi; ++c) {
        st.protos_per_branch[b].add(c, rectified_class_mean(ctx, b, c));
      }
    }
    for (int c = lo; c < hi; ++c) st.raw_protos.add(c, mean_of(bank.train[final_layer][c]));

    // 2. novel Gaussians: shot mean + covariance borrowed from the top-k
    //    most similar base classes at the same layer
    for (int li = 0; li < n_layers; ++li) {
      std::vector<ClassGaussian> base(st.gaussians[li].begin(),
                                      st.gaussians[li].begin() + layout.base_classes);
      for (int c = lo; c < hi; ++c) {
        Vec shot_mean = mean_of(bank.train[li][c]);
        ClassGaussian g;
        g.class_id = c;
        g.layer_id = cfg.layers[li].id;
        g.cov = novel_covariance(shot_mean, base, std::min(kTopK, layout.base_classes));
        g.mean = std::move(shot_mean);
        st.gaussians[li].push_back(std::move(g));
      }
    }

    for (int c = lo; c < hi; ++c) novel_seen.insert(c);

    // 3. train on novel shots plus Gaussian replay of every old class
    for (int b = 0; b < n_branches; ++b) {
      train_branch(ctx, b, session, novel_seen, st.protos_per_branch[b]);
    }

    // 4. evaluate all seen tasks
    evaluate_session(ctx, session, out);
  }
  return out;
}

// ===== ablation harness =====================================================

std::vector<AblationCell> run_ablation_suite(const SimulationConfig& cfg, int grid_points) {
  auto fr_cell = [&](LossWeights w) {
    return std::async(std::launch::async,
                      [&, w] { return run_fr(cfg.scenario, w, cfg.training); });
  };

  LossWeights no_cos = cfg.weights, no_cr = cfg.weights, no_ir = cfg.weights;
  no_cos.beta_cos = 0.0;
  no_cr.beta_cr = 0.0;
  no_ir.beta_ir = 0.0;

  auto fut_full = fr_cell(cfg.weights);
  auto fut_no_cos = fr_cell(no_cos);
  auto fut_no_cr = fr_cell(no_cr);
  auto fut_no_ir = fr_cell(no_ir);
  AccuracyMatrix baseline = run_baseline(cfg.scenario);

  std::vector<AblationCell> cells;
  cells.push_back({"baseline", build_report(baseline, grid_points)});
  FrRunResult full = fut_full.get();
  cells.push_back({"full", build_report(full.ensemble, grid_points)});
  cells.push_back({"no_cos", build_report(fut_no_cos.get().ensemble, grid_points)});
  cells.push_back({"no_cr", build_report(fut_no_cr.get().ensemble, grid_points)});
  cells.push_back({"no_ir", build_report(fut_no_ir.get().ensemble, grid_points)});
  for (std::size_t b = 0; b < full.per_branch.size(); ++b) {
    cells.push_back({"branch_" + std::to_string(full.branch_layer_ids[b]),
                     build_report(full.per_branch[b], grid_points)});
  }
  return cells;
}

std::string ablation_json(const std::vector<AblationCell>& cells) {
  ordered_json doc = ordered_json::array();
  for (const AblationCell& cell : cells) {
    ordered_json entry;
    entry["name"] = cell.name;
    entry["report"] = ordered_json::parse(report_json(cell.report));
    doc.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

}  // namespace fscil
