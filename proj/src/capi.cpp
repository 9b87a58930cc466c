#include "fscil.h"

#include <cstdlib>
#include <cstring>
#include <json.hpp>
#include <string>

#include "fscil/corner_cases.hpp"
#include "fscil/gradcheck.hpp"
#include "fscil/metrics.hpp"
#include "fscil/simulator.hpp"
#include "fscil/task_matrix.hpp"

struct fscil_matrix {
  fscil::AccuracyMatrix m;
};

namespace {

using ordered_json = nlohmann::ordered_json;

thread_local std::string g_last_error;

fscil_status map_code(fscil::ErrorCode code) {
  using E = fscil::ErrorCode;
  switch (code) {
    case E::MalformedHeader:
    case E::RowLengthMismatch:
      return FSCIL_ERR_PARSE;
    case E::ValueOutOfRange:
    case E::NonPositiveLayout:
    case E::UnequalNovelSizes:
    case E::LayoutMismatch:
      return FSCIL_ERR_VALIDATION;
    case E::NotPSD:
    case E::NonFiniteLoss:
      return FSCIL_ERR_NUMERIC;
    case E::IoError:
      return FSCIL_ERR_INTERNAL;
    default:
      return FSCIL_ERR_ARGUMENT;
  }
}

template <typename F>
fscil_status guarded(F&& body) {
  try {
    return body();
  } catch (const fscil::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FSCIL_ERR_INTERNAL;
  }
}

fscil_status arg_error(const std::string& message) {
  g_last_error = message;
  return FSCIL_ERR_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

fscil::MatrixFormat parse_format(const char* format) {
  std::string_view f = format ? format : "";
  if (f == "csv") return fscil::MatrixFormat::Csv;
  if (f == "json") return fscil::MatrixFormat::Json;
  fscil::raise(fscil::ErrorCode::BadConfig, "format must be 'csv' or 'json'");
}

int effective_grid(const fscil::AccuracyMatrix& m, int grid_points) {
  return grid_points > 0 ? grid_points : fscil::default_grid(m.layout());
}

ordered_json matrix_object(const fscil::AccuracyMatrix& m) {
  return ordered_json::parse(fscil::emit_matrix(m, fscil::MatrixFormat::Json));
}

}  // namespace

extern "C" {

const char* fscil_version(void) { return "1.0.0"; }

const char* fscil_last_error(void) { return g_last_error.c_str(); }

fscil_status fscil_matrix_parse(const char* text, const char* format, fscil_matrix** out) {
  if (!text || !out) return arg_error("null argument");
  return guarded([&] {
    auto m = fscil::parse_matrix(text, parse_format(format));
    *out = new fscil_matrix{std::move(m)};
    return FSCIL_OK;
  });
}

fscil_status fscil_matrix_emit(const fscil_matrix* m, const char* format, char** out_text) {
  if (!m || !out_text) return arg_error("null argument");
  return guarded([&] {
    *out_text = dup_string(fscil::emit_matrix(m->m, parse_format(format)));
    return FSCIL_OK;
  });
}

fscil_status fscil_matrix_layout(const fscil_matrix* m, int* n_tasks, int* base_classes,
                                 int* novel_classes) {
  if (!m) return arg_error("null matrix");
  if (n_tasks) *n_tasks = m->m.layout().n_tasks;
  if (base_classes) *base_classes = m->m.layout().base_classes;
  if (novel_classes) *novel_classes = m->m.layout().novel_classes;
  return FSCIL_OK;
}

fscil_status fscil_matrix_at(const fscil_matrix* m, int i, int j, double* out) {
  if (!m || !out) return arg_error("null argument");
  return guarded([&] {
    *out = m->m.at(i, j);
    return FSCIL_OK;
  });
}

void fscil_matrix_free(fscil_matrix* m) { delete m; }

fscil_status fscil_oracle(const char* case_name, double base_acc, int tasks,
                          int base_classes, int novel_classes, fscil_matrix** out) {
  if (!case_name || !out) return arg_error("null argument");
  return guarded([&] {
    fscil::CornerSpec spec;
    spec.kind = fscil::parse_corner_case(case_name);
    spec.base_accuracy = base_acc;
    spec.layout = fscil::TaskLayout{tasks, base_classes, novel_classes};
    *out = new fscil_matrix{fscil::generate_corner_case(spec)};
    return FSCIL_OK;
  });
}

fscil_status fscil_report_json(const fscil_matrix* m, int grid_points, char** out_json) {
  if (!m || !out_json) return arg_error("null argument");
  return guarded([&] {
    auto report = fscil::build_report(m->m, effective_grid(m->m, grid_points));
    *out_json = dup_string(fscil::report_json(report));
    return FSCIL_OK;
  });
}

fscil_status fscil_curve_csv(const fscil_matrix* m, int grid_points, char** out_csv) {
  if (!m || !out_csv) return arg_error("null argument");
  return guarded([&] {
    *out_csv = dup_string(fscil::curve_csv(m->m, effective_grid(m->m, grid_points)));
    return FSCIL_OK;
  });
}

fscil_status fscil_metric(const fscil_matrix* m, const char* metric, double alpha,
                          int grid_points, double* out) {
  if (!m || !metric || !out) return arg_error("null argument");
  return guarded([&] {
    std::optional<double> a;
    if (alpha >= 0.0) a = alpha;
    *out = fscil::metric_value(m->m, fscil::parse_metric_key(metric), a,
                               effective_grid(m->m, grid_points));
    return FSCIL_OK;
  });
}

fscil_status fscil_compare_json(const fscil_matrix* const* matrices,
                                const char* const* names, size_t count,
                                const char* metric, double alpha, int grid_points,
                                char** out_json) {
  if (!matrices || !names || !metric || !out_json || count == 0) {
    return arg_error("null argument or empty list");
  }
  return guarded([&] {
    std::vector<std::pair<std::string, fscil::AccuracyMatrix>> named;
    for (size_t i = 0; i < count; ++i) {
      if (!matrices[i] || !names[i]) fscil::raise(fscil::ErrorCode::BadConfig, "null entry");
      named.emplace_back(names[i], matrices[i]->m);
    }
    std::optional<double> a;
    if (alpha >= 0.0) a = alpha;
    fscil::MetricKey key = fscil::parse_metric_key(metric);
    int grid = grid_points > 0 ? grid_points : fscil::default_grid(named.front().second.layout());
    auto ranking = fscil::compare(named, key, a, grid);

    ordered_json doc;
    doc["metric"] = metric;
    if (a) doc["alpha"] = *a;
    doc["ranking"] = ordered_json::array();
    for (const auto& entry : ranking) {
      doc["ranking"].push_back({{"name", entry.name}, {"value", entry.value}});
    }
    *out_json = dup_string(doc.dump(2) + "\n");
    return FSCIL_OK;
  });
}

fscil_status fscil_default_config_json(char** out_json) {
  if (!out_json) return arg_error("null argument");
  return guarded([&] {
    *out_json = dup_string(fscil::simulation_config_json(fscil::default_simulation_config()));
    return FSCIL_OK;
  });
}

fscil_status fscil_simulate_json(const char* config_json, char** out_json) {
  if (!out_json) return arg_error("null argument");
  return guarded([&] {
    fscil::SimulationConfig cfg = config_json && *config_json
                                      ? fscil::simulation_config_from_json(config_json)
                                      : fscil::default_simulation_config();
    fscil::AccuracyMatrix baseline = fscil::run_baseline(cfg.scenario);
    fscil::FrRunResult fr = fscil::run_fr(cfg.scenario, cfg.weights, cfg.training);
    int grid = fscil::default_grid(cfg.scenario.layout);

    ordered_json doc;
    doc["config"] = ordered_json::parse(fscil::simulation_config_json(cfg));
    doc["baseline"] = matrix_object(baseline);
    doc["ensemble"] = matrix_object(fr.ensemble);
    doc["branches"] = ordered_json::array();
    for (std::size_t b = 0; b < fr.per_branch.size(); ++b) {
      doc["branches"].push_back({{"layer_id", fr.branch_layer_ids[b]},
                                 {"matrix", matrix_object(fr.per_branch[b])}});
    }
    doc["reports"] = {
        {"baseline", ordered_json::parse(fscil::report_json(fscil::build_report(baseline, grid)))},
        {"ensemble",
         ordered_json::parse(fscil::report_json(fscil::build_report(fr.ensemble, grid)))}};
    *out_json = dup_string(doc.dump(2) + "\n");
    return FSCIL_OK;
  });
}

fscil_status fscil_ablate_json(const char* config_json, int grid_points, char** out_json) {
  if (!out_json) return arg_error("null argument");
  return guarded([&] {
    fscil::SimulationConfig cfg = config_json && *config_json
                                      ? fscil::simulation_config_from_json(config_json)
                                      : fscil::default_simulation_config();
    int grid = grid_points > 0 ? grid_points : fscil::default_grid(cfg.scenario.layout);
    auto cells = fscil::run_ablation_suite(cfg, grid);
    *out_json = dup_string(fscil::ablation_json(cells));
    return FSCIL_OK;
  });
}

fscil_status fscil_gradcheck_json(uint64_t seed, int configs, int dim, char** out_json) {
  if (!out_json) return arg_error("null argument");
  if (configs < 1 || dim < 2) return arg_error("configs must be >= 1 and dim >= 2");
  return guarded([&] {
    auto results = fscil::run_gradcheck(seed, configs, dim);
    ordered_json doc;
    doc["seed"] = seed;
    doc["configs"] = configs;
    doc["dim"] = dim;
    doc["checks"] = ordered_json::array();
    for (const auto& r : results) {
      doc["checks"].push_back({{"name", r.name},
                               {"checked", r.checked},
                               {"failed", r.failed},
                               {"worst_rel_err", r.worst_rel_err}});
    }
    doc["passed"] = fscil::gradcheck_passed(results);
    *out_json = dup_string(doc.dump(2) + "\n");
    return FSCIL_OK;
  });
}

void fscil_string_free(char* s) { std::free(s); }

}  // extern "C"
