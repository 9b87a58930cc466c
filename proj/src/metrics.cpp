#include "fscil/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

namespace fscil {

namespace {

using ordered_json = nlohmann::ordered_json;

void check_session(const AccuracyMatrix& m, int i) {
  if (i < 1 || i > m.sessions()) {
    raise(ErrorCode::SessionOutOfRange, "session " + std::to_string(i));
  }
}

double novel_sum(const AccuracyMatrix& m, int i) {
  double s = 0.0;
  for (int j = 2; j <= i; ++j) s += m.at(i, j);
  return s;
}

ordered_json opt_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

}  // namespace

// ===== per-session metrics ==================================================

double aacc_session(const AccuracyMatrix& m, int i) {
  check_session(m, i);
  if (i == 1) return m.at(1, 1);
  double r = m.layout().base_ratio();
  return (r * m.at(i, 1) + novel_sum(m, i)) / (r + (i - 1));
}

double tacc_session(const AccuracyMatrix& m, int i) {
  check_session(m, i);
  double s = 0.0;
  for (int j = 1; j <= i; ++j) s += m.at(i, j);
  return s / i;
}

double novel_only(const AccuracyMatrix& m, int i) {
  check_session(m, i);
  if (i < 2) raise(ErrorCode::NoNovelTasks, "session 1 has no novel tasks");
  return novel_sum(m, i) / (i - 1);
}

double gacc_alpha(const AccuracyMatrix& m, int i, double alpha) {
  check_session(m, i);
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    raise(ErrorCode::AlphaOutOfRange, "alpha " + format_double(alpha));
  }
  if (i == 1) return alpha > 0.0 ? m.at(1, 1) : 0.0;
  double r = m.layout().base_ratio();
  return (alpha * r * m.at(i, 1) + novel_sum(m, i)) / (alpha * r + (i - 1));
}

int default_grid(const TaskLayout& layout) {
  return std::max(2, static_cast<int>(std::llround(layout.base_ratio())));
}

GaccCurve gacc_curve(const AccuracyMatrix& m, int i, int grid_points) {
  check_session(m, i);
  if (grid_points < 2) raise(ErrorCode::GridTooSmall, "need at least 2 grid intervals");
  GaccCurve curve;
  curve.session = i;
  curve.alphas.reserve(grid_points + 1);
  curve.values.reserve(grid_points + 1);
  for (int k = 0; k <= grid_points; ++k) {
    double alpha = static_cast<double>(k) / grid_points;
    curve.alphas.push_back(alpha);
    curve.values.push_back(gacc_alpha(m, i, alpha));
  }
  return curve;
}

double gacc_auc(const AccuracyMatrix& m, int i, int grid_points) {
  GaccCurve curve = gacc_curve(m, i, grid_points);
  double s = 0.5 * (curve.values.front() + curve.values.back());
  for (std::size_t k = 1; k + 1 < curve.values.size(); ++k) s += curve.values[k];
  return s / grid_points;
}

double gacc_auc_closed_form(const AccuracyMatrix& m, int i) {
  check_session(m, i);
  if (i == 1) return m.at(1, 1);
  double r = m.layout().base_ratio();
  double a = r * m.at(i, 1);
  double b = novel_sum(m, i);
  double c = r;
  double e = static_cast<double>(i - 1);
  return a / c + (b * c - a * e) / (c * c) * std::log((c + e) / e);
}

double harmonic_mean(double base_acc, double novel_acc) {
  double denom = base_acc + novel_acc;
  if (denom == 0.0) return 0.0;
  return 2.0 * base_acc * novel_acc / denom;
}

double hacc(const AccuracyMatrix& m, int i) {
  return harmonic_mean(m.at(i, 1), novel_only(m, i));
}

// ===== aggregates ===========================================================

double aacc_overall(const AccuracyMatrix& m) {
  double s = 0.0;
  for (int i = 1; i <= m.sessions(); ++i) s += aacc_session(m, i);
  return s / m.sessions();
}

double lacc(const AccuracyMatrix& m) { return aacc_session(m, m.sessions()); }

double tacc_overall(const AccuracyMatrix& m) {
  double s = 0.0;
  for (int i = 1; i <= m.sessions(); ++i) s += tacc_session(m, i);
  return s / m.sessions();
}

double gacc_overall(const AccuracyMatrix& m, int grid_points) {
  double s = 0.0;
  for (int i = 1; i <= m.sessions(); ++i) s += gacc_auc(m, i, grid_points);
  return s / m.sessions();
}

// ===== forgetting ===========================================================

ForgettingBlock forgetting_block(const AccuracyMatrix& m) {
  int n = m.sessions();
  ForgettingBlock block;
  block.pd.resize(n);
  block.rpd.resize(n);
  block.f.resize(n);
  block.kr.resize(n);
  for (int t = 1; t <= n; ++t) {
    double own = m.at(t, t);
    block.pd[t - 1] = own - m.at(n, t);
    if (own != 0.0) block.rpd[t - 1] = block.pd[t - 1] / own;
    double lo = own, hi = own;
    for (int i = t; i <= n; ++i) {
      lo = std::min(lo, m.at(i, t));
      hi = std::max(hi, m.at(i, t));
    }
    block.f[t - 1] = hi - lo;
  }
  for (int i = 1; i <= n; ++i) {
    block.kr[i - 1].resize(i);
    for (int t = 1; t <= i; ++t) {
      double own = m.at(t, t);
      if (own != 0.0) block.kr[i - 1][t - 1] = m.at(i, t) / own;
    }
  }
  return block;
}

// ===== report bundle ========================================================

MetricReport build_report(const AccuracyMatrix& m, int grid_points) {
  MetricReport report;
  report.layout = m.layout();
  for (int i = 1; i <= m.sessions(); ++i) {
    SessionMetrics sm;
    sm.session = i;
    sm.aacc = aacc_session(m, i);
    sm.tacc = tacc_session(m, i);
    sm.gacc_auc = gacc_auc(m, i, grid_points);
    if (i >= 2) {
      sm.novel_only = novel_only(m, i);
      sm.hacc = hacc(m, i);
    }
    report.per_session.push_back(std::move(sm));
  }
  report.aacc = aacc_overall(m);
  report.lacc = lacc(m);
  report.tacc = tacc_overall(m);
  report.gacc = gacc_overall(m, grid_points);
  report.forgetting = forgetting_block(m);
  return report;
}

std::string report_json(const MetricReport& report) {
  ordered_json doc;
  doc["layout"] = {{"n_tasks", report.layout.n_tasks},
                   {"base_classes", report.layout.base_classes},
                   {"novel_classes", report.layout.novel_classes}};
  doc["per_session"] = ordered_json::array();
  for (const SessionMetrics& sm : report.per_session) {
    ordered_json row;
    row["i"] = sm.session;
    row["aacc"] = sm.aacc;
    row["tacc"] = sm.tacc;
    row["novel_only"] = opt_json(sm.novel_only);
    row["gacc_auc"] = sm.gacc_auc;
    row["hacc"] = opt_json(sm.hacc);
    doc["per_session"].push_back(std::move(row));
  }
  doc["aggregate"] = {{"aacc", report.aacc},
                      {"lacc", report.lacc},
                      {"tacc", report.tacc},
                      {"gacc", report.gacc}};
  ordered_json forget;
  forget["pd"] = report.forgetting.pd;
  forget["rpd"] = ordered_json::array();
  for (const auto& v : report.forgetting.rpd) forget["rpd"].push_back(opt_json(v));
  forget["f"] = report.forgetting.f;
  forget["kr"] = ordered_json::array();
  for (const auto& row : report.forgetting.kr) {
    ordered_json jr = ordered_json::array();
    for (const auto& v : row) jr.push_back(opt_json(v));
    forget["kr"].push_back(std::move(jr));
  }
  doc["forgetting"] = std::move(forget);
  return doc.dump(2) + "\n";
}

std::string curve_csv(const AccuracyMatrix& m, int grid_points) {
  if (grid_points < 2) raise(ErrorCode::GridTooSmall, "need at least 2 grid intervals");
  std::string out = "alpha";
  for (int i = 1; i <= m.sessions(); ++i) out += ",session_" + std::to_string(i);
  out += '\n';
  for (int k = 0; k <= grid_points; ++k) {
    double alpha = static_cast<double>(k) / grid_points;
    out += format_double(alpha);
    for (int i = 1; i <= m.sessions(); ++i) {
      out += ',';
      out += format_double(gacc_alpha(m, i, alpha));
    }
    out += '\n';
  }
  return out;
}

// ===== method comparison ====================================================

MetricKey parse_metric_key(std::string_view name) {
  if (name == "aacc") return MetricKey::Aacc;
  if (name == "lacc") return MetricKey::Lacc;
  if (name == "tacc") return MetricKey::Tacc;
  if (name == "gacc") return MetricKey::Gacc;
  if (name == "hacc") return MetricKey::Hacc;
  if (name == "novel") return MetricKey::Novel;
  raise(ErrorCode::UnknownMetric, "unknown metric '" + std::string(name) + "'");
}

const char* metric_key_name(MetricKey key) {
  switch (key) {
    case MetricKey::Aacc: return "aacc";
    case MetricKey::Lacc: return "lacc";
    case MetricKey::Tacc: return "tacc";
    case MetricKey::Gacc: return "gacc";
    case MetricKey::Hacc: return "hacc";
    case MetricKey::Novel: return "novel";
  }
  return "unknown";
}

double metric_value(const AccuracyMatrix& m, MetricKey key,
                    std::optional<double> alpha, int grid_points) {
  if (alpha) {
    double s = 0.0;
    for (int i = 1; i <= m.sessions(); ++i) s += gacc_alpha(m, i, *alpha);
    return s / m.sessions();
  }
  switch (key) {
    case MetricKey::Aacc: return aacc_overall(m);
    case MetricKey::Lacc: return lacc(m);
    case MetricKey::Tacc: return tacc_overall(m);
    case MetricKey::Gacc: return gacc_overall(m, grid_points);
    case MetricKey::Hacc:
      return m.sessions() >= 2 ? hacc(m, m.sessions()) : 0.0;
    case MetricKey::Novel:
      return m.sessions() >= 2 ? novel_only(m, m.sessions()) : 0.0;
  }
  raise(ErrorCode::UnknownMetric, "bad metric key");
}

std::vector<RankedEntry> compare(
    const std::vector<std::pair<std::string, AccuracyMatrix>>& named,
    MetricKey key, std::optional<double> alpha, int grid_points) {
  for (const auto& [name, m] : named) {
    if (!(m.layout() == named.front().second.layout())) {
      raise(ErrorCode::LayoutMismatch, "'" + name + "' uses a different layout");
    }
  }
  std::vector<RankedEntry> ranking;
  ranking.reserve(named.size());
  for (const auto& [name, m] : named) {
    ranking.push_back({name, metric_value(m, key, alpha, grid_points)});
  }
  std::sort(ranking.begin(), ranking.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.name < b.name;
  });
  return ranking;
}

}  // namespace fscil
