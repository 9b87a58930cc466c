// Command-line front door. All computation goes through the C API in
// fscil.h; this file only handles flags, files and human-readable summaries.
#include <CLI11.hpp>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fscil.h"

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(fscil_status status) {
  if (status != FSCIL_OK) throw CliError(fscil_last_error());
}

// RAII wrappers over the C handles
struct OwnedString {
  char* ptr = nullptr;
  OwnedString() = default;
  OwnedString(OwnedString&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
  OwnedString& operator=(OwnedString&& other) noexcept {
    if (this != &other) {
      fscil_string_free(ptr);
      ptr = other.ptr;
      other.ptr = nullptr;
    }
    return *this;
  }
  OwnedString(const OwnedString&) = delete;
  OwnedString& operator=(const OwnedString&) = delete;
  ~OwnedString() { fscil_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

struct OwnedMatrix {
  fscil_matrix* ptr = nullptr;
  OwnedMatrix() = default;
  OwnedMatrix(OwnedMatrix&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
  OwnedMatrix& operator=(OwnedMatrix&& other) noexcept {
    if (this != &other) {
      fscil_matrix_free(ptr);
      ptr = other.ptr;
      other.ptr = nullptr;
    }
    return *this;
  }
  OwnedMatrix(const OwnedMatrix&) = delete;
  OwnedMatrix& operator=(const OwnedMatrix&) = delete;
  ~OwnedMatrix() { fscil_matrix_free(ptr); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// temp-then-rename so partial files never land under the final name
void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CliError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw CliError("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

const char* detect_format(const std::string& path, const std::string& override_fmt) {
  if (!override_fmt.empty()) return override_fmt.c_str();
  return path.size() >= 5 && path.substr(path.size() - 5) == ".json" ? "json" : "csv";
}

OwnedMatrix load_matrix(const std::string& path, const std::string& fmt) {
  std::string text = read_file(path);
  OwnedMatrix m;
  check(fscil_matrix_parse(text.c_str(), detect_format(path, fmt), &m.ptr));
  return m;
}

std::string shortest(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

std::string fixed2(const ordered_json& v) {
  if (v.is_null()) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v.get<double>());
  return buf;
}

void print_report_summary(const std::string& report_text) {
  ordered_json report = ordered_json::parse(report_text);
  const auto& layout = report["layout"];
  std::printf("layout: %d tasks, %d base classes, %d novel per task\n",
              layout["n_tasks"].get<int>(), layout["base_classes"].get<int>(),
              layout["novel_classes"].get<int>());
  std::printf("%7s %8s %8s %8s %8s %8s\n", "session", "aacc", "tacc", "novel", "gacc",
              "hacc");
  for (const auto& row : report["per_session"]) {
    std::printf("%7d %8s %8s %8s %8s %8s\n", row["i"].get<int>(),
                fixed2(row["aacc"]).c_str(), fixed2(row["tacc"]).c_str(),
                fixed2(row["novel_only"]).c_str(), fixed2(row["gacc_auc"]).c_str(),
                fixed2(row["hacc"]).c_str());
  }
  const auto& agg = report["aggregate"];
  std::printf("aggregate: aacc %s  lacc %s  tacc %s  gacc %s\n", fixed2(agg["aacc"]).c_str(),
              fixed2(agg["lacc"]).c_str(), fixed2(agg["tacc"]).c_str(),
              fixed2(agg["gacc"]).c_str());
}

std::string resolve_config(const std::string& config_path, bool seed_set,
                           std::uint64_t seed) {
  std::string text;
  if (!config_path.empty()) {
    text = read_file(config_path);
  } else {
    OwnedString def;
    check(fscil_default_config_json(&def.ptr));
    text = def.str();
  }
  if (seed_set) {
    ordered_json doc = ordered_json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw CliError("config file is not valid JSON");
    doc["seed"] = seed;
    text = doc.dump(2) + "\n";
  }
  return text;
}

std::string matrix_csv_from_object(const ordered_json& obj) {
  OwnedMatrix m;
  std::string text = obj.dump();
  check(fscil_matrix_parse(text.c_str(), "json", &m.ptr));
  OwnedString csv;
  check(fscil_matrix_emit(m.ptr, "csv", &csv.ptr));
  return csv.str();
}

// ----- subcommands ----------------------------------------------------------

int cmd_eval(const std::string& input, const std::string& output, const std::string& fmt,
             int grid, const std::string& metric) {
  OwnedMatrix m = load_matrix(input, fmt);
  if (!metric.empty()) {
    double value = 0.0;
    check(fscil_metric(m.ptr, metric.c_str(), -1.0, grid, &value));
    std::printf("%s %s\n", metric.c_str(), shortest(value).c_str());
    return 0;
  }
  OwnedString report;
  check(fscil_report_json(m.ptr, grid, &report.ptr));
  if (!output.empty()) write_file_atomic(output, report.str());
  print_report_summary(report.str());
  return 0;
}

int cmd_curve(const std::string& input, const std::string& output, const std::string& fmt,
              int grid) {
  OwnedMatrix m = load_matrix(input, fmt);
  OwnedString csv;
  check(fscil_curve_csv(m.ptr, grid, &csv.ptr));
  if (output.empty()) {
    std::fputs(csv.str().c_str(), stdout);
  } else {
    write_file_atomic(output, csv.str());
    std::printf("wrote %s\n", output.c_str());
  }
  return 0;
}

int cmd_oracle(const std::string& kind, double base_acc, int tasks, int base_classes,
               int novel_classes, const std::string& output, const std::string& fmt) {
  OwnedMatrix m;
  check(fscil_oracle(kind.c_str(), base_acc, tasks, base_classes, novel_classes, &m.ptr));
  OwnedString text;
  check(fscil_matrix_emit(m.ptr, fmt.empty() ? "csv" : fmt.c_str(), &text.ptr));
  if (output.empty()) {
    std::fputs(text.str().c_str(), stdout);
  } else {
    write_file_atomic(output, text.str());
    std::printf("wrote %s\n", output.c_str());
  }
  return 0;
}

int cmd_simulate(const std::string& config_path, bool seed_set, std::uint64_t seed,
                 const std::string& output) {
  std::string config = resolve_config(config_path, seed_set, seed);
  OwnedString bundle_text;
  check(fscil_simulate_json(config.c_str(), &bundle_text.ptr));
  ordered_json bundle = ordered_json::parse(bundle_text.str());

  if (!output.empty()) {
    fs::path dir(output);
    fs::create_directories(dir);
    write_file_atomic(dir / "config.json", bundle["config"].dump(2) + "\n");
    write_file_atomic(dir / "baseline.csv", matrix_csv_from_object(bundle["baseline"]));
    write_file_atomic(dir / "ensemble.csv", matrix_csv_from_object(bundle["ensemble"]));
    for (const auto& branch : bundle["branches"]) {
      std::string name = "branch_" + std::to_string(branch["layer_id"].get<int>()) + ".csv";
      write_file_atomic(dir / name, matrix_csv_from_object(branch["matrix"]));
    }
    write_file_atomic(dir / "report.json", bundle["reports"].dump(2) + "\n");
  }

  for (const char* which : {"baseline", "ensemble"}) {
    const auto& agg = bundle["reports"][which]["aggregate"];
    const auto& last = bundle["reports"][which]["per_session"].back();
    std::printf("%-8s aacc %s  lacc %s  gacc %s  last-novel %s\n", which,
                fixed2(agg["aacc"]).c_str(), fixed2(agg["lacc"]).c_str(),
                fixed2(agg["gacc"]).c_str(), fixed2(last["novel_only"]).c_str());
  }
  if (!output.empty()) std::printf("wrote %s\n", output.c_str());
  return 0;
}

int cmd_ablate(const std::string& config_path, bool seed_set, std::uint64_t seed, int grid,
               const std::string& output) {
  std::string config = resolve_config(config_path, seed_set, seed);
  OwnedString table_text;
  check(fscil_ablate_json(config.c_str(), grid, &table_text.ptr));
  if (!output.empty()) write_file_atomic(output, table_text.str());

  ordered_json table = ordered_json::parse(table_text.str());
  std::printf("%-12s %8s %8s %8s %10s\n", "cell", "aacc", "lacc", "gacc", "last-novel");
  for (const auto& cell : table) {
    const auto& agg = cell["report"]["aggregate"];
    const auto& last = cell["report"]["per_session"].back();
    std::printf("%-12s %8s %8s %8s %10s\n", cell["name"].get<std::string>().c_str(),
                fixed2(agg["aacc"]).c_str(), fixed2(agg["lacc"]).c_str(),
                fixed2(agg["gacc"]).c_str(), fixed2(last["novel_only"]).c_str());
  }
  if (!output.empty()) std::printf("wrote %s\n", output.c_str());
  return 0;
}

int cmd_compare(const std::vector<std::string>& inputs, const std::string& fmt,
                const std::string& metric, bool alpha_set, double alpha, int grid,
                const std::string& output) {
  std::vector<OwnedMatrix> matrices(inputs.size());
  std::vector<std::string> names;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    matrices[i] = load_matrix(inputs[i], fmt);
    names.push_back(fs::path(inputs[i]).stem().string());
  }
  std::vector<const fscil_matrix*> mptrs;
  std::vector<const char*> nptrs;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    mptrs.push_back(matrices[i].ptr);
    nptrs.push_back(names[i].c_str());
  }
  OwnedString ranking_text;
  check(fscil_compare_json(mptrs.data(), nptrs.data(), mptrs.size(), metric.c_str(),
                           alpha_set ? alpha : -1.0, grid, &ranking_text.ptr));
  if (!output.empty()) write_file_atomic(output, ranking_text.str());

  ordered_json ranking = ordered_json::parse(ranking_text.str());
  int place = 1;
  for (const auto& entry : ranking["ranking"]) {
    std::printf("%d. %-20s %s %s\n", place++, entry["name"].get<std::string>().c_str(),
                metric.c_str(), fixed2(entry["value"]).c_str());
  }
  if (!output.empty()) std::printf("wrote %s\n", output.c_str());
  return 0;
}

int cmd_gradcheck(std::uint64_t seed, const std::string& output) {
  OwnedString result_text;
  check(fscil_gradcheck_json(seed, 100, 8, &result_text.ptr));
  if (!output.empty()) write_file_atomic(output, result_text.str());

  ordered_json result = ordered_json::parse(result_text.str());
  for (const auto& chk : result["checks"]) {
    std::printf("%-20s checked %6zu  failed %zu  worst rel err %.3g\n",
                chk["name"].get<std::string>().c_str(), chk["checked"].get<std::size_t>(),
                chk["failed"].get<std::size_t>(), chk["worst_rel_err"].get<double>());
  }
  bool passed = result["passed"].get<bool>();
  std::printf("gradcheck %s\n", passed ? "PASS" : "FAIL");
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"few-shot class-incremental evaluation engine and simulator"};
  app.require_subcommand(1);

  std::string input, output, format, metric = "gacc", config_path, corner = "lazy";
  std::vector<std::string> inputs;
  std::string eval_metric;
  int grid = 0;  // 0 = default grid
  double base_acc = 85.0, alpha = 0.0;
  int tasks = 9, base_classes = 60, novel_classes = 5;
  std::uint64_t seed = 0;

  auto* eval = app.add_subcommand("eval", "compute the metric report for a matrix");
  eval->add_option("--input", input, "matrix file")->required();
  eval->add_option("--output", output, "report JSON path");
  eval->add_option("--format", format, "input format")->check(CLI::IsMember({"csv", "json"}));
  eval->add_option("--alpha-grid", grid, "integration grid intervals");
  eval->add_option("--metric", eval_metric, "print a single aggregate metric")
      ->check(CLI::IsMember({"aacc", "lacc", "tacc", "gacc", "hacc", "novel"}));

  auto* curve = app.add_subcommand("curve", "emit the per-session gacc(alpha) curve CSV");
  curve->add_option("--input", input, "matrix file")->required();
  curve->add_option("--output", output, "curve CSV path");
  curve->add_option("--format", format, "input format")->check(CLI::IsMember({"csv", "json"}));
  curve->add_option("--alpha-grid", grid, "integration grid intervals");

  auto* oracle = app.add_subcommand("oracle", "generate an analytic corner-case matrix");
  oracle->add_option("--case", corner, "corner case")
      ->check(CLI::IsMember({"lazy", "greedy", "greedy-nf"}))
      ->required();
  oracle->add_option("--base-acc", base_acc, "base-session accuracy");
  oracle->add_option("--tasks", tasks, "number of sessions");
  oracle->add_option("--base-classes", base_classes, "base class count");
  oracle->add_option("--novel-classes", novel_classes, "classes per novel task");
  oracle->add_option("--output", output, "matrix path");
  oracle->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* simulate = app.add_subcommand("simulate", "run the synthetic baseline + FR pipeline");
  simulate->add_option("--config", config_path, "scenario config JSON");
  auto* sim_seed = simulate->add_option("--seed", seed, "override the scenario seed");
  simulate->add_option("--output", output, "output directory");

  auto* ablate = app.add_subcommand("ablate", "run the loss/branch ablation grid");
  ablate->add_option("--config", config_path, "scenario config JSON");
  auto* abl_seed = ablate->add_option("--seed", seed, "override the scenario seed");
  ablate->add_option("--alpha-grid", grid, "integration grid intervals");
  ablate->add_option("--output", output, "ablation table JSON path");

  auto* compare = app.add_subcommand("compare", "rank matrices by a metric");
  compare->add_option("--inputs", inputs, "matrix files")->required()->expected(-2);
  compare->add_option("--format", format, "input format")
      ->check(CLI::IsMember({"csv", "json"}));
  compare->add_option("--metric", metric, "ranking metric")
      ->check(CLI::IsMember({"aacc", "lacc", "tacc", "gacc", "hacc", "novel"}));
  auto* cmp_alpha =
      compare->add_option("--alpha", alpha, "rank by gacc at a fixed alpha instead");
  compare->add_option("--alpha-grid", grid, "integration grid intervals");
  compare->add_option("--output", output, "ranking JSON path");

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient suite");
  gradcheck->add_option("--seed", seed, "suite seed");
  gradcheck->add_option("--output", output, "result JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    if (eval->parsed()) return cmd_eval(input, output, format, grid, eval_metric);
    if (curve->parsed()) return cmd_curve(input, output, format, grid);
    if (oracle->parsed()) {
      return cmd_oracle(corner, base_acc, tasks, base_classes, novel_classes, output, format);
    }
    if (simulate->parsed()) {
      return cmd_simulate(config_path, sim_seed->count() > 0, seed, output);
    }
    if (ablate->parsed()) {
      return cmd_ablate(config_path, abl_seed->count() > 0, seed, grid, output);
    }
    if (compare->parsed()) {
      return cmd_compare(inputs, format, metric, cmp_alpha->count() > 0, alpha, grid, output);
    }
    if (gradcheck->parsed()) return cmd_gradcheck(seed, output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
