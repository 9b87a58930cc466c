#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fscil/task_matrix.hpp"

namespace fscil {

// ===== per-session metrics ==================================================

// class-weighted average accuracy: (r*A(i,1) + sum_{j>=2} A(i,j)) / (r + i-1);
// A(1,1) for the base session
double aacc_session(const AccuracyMatrix& m, int i);

// unweighted per-task mean: (1/i) * sum_j A(i,j)
double tacc_session(const AccuracyMatrix& m, int i);

// mean accuracy over novel tasks only; i >= 2 (throws NoNovelTasks)
double novel_only(const AccuracyMatrix& m, int i);

// generalized accuracy; alpha in [0,1] interpolates novel-only (0) through
// tacc (1/r) to aacc (1). Session 1 is defined as A(1,1) for alpha > 0 and 0
// at alpha = 0 (the unique choice whose trapezoid AUC is A*(1 - 1/(2m))).
double gacc_alpha(const AccuracyMatrix& m, int i, double alpha);

struct GaccCurve {
  int session = 0;
  std::vector<double> alphas;  // k / grid_points, k = 0..grid_points
  std::vector<double> values;
};

// grid_points >= 2 (throws GridTooSmall); default is round(r)
int default_grid(const TaskLayout& layout);
GaccCurve gacc_curve(const AccuracyMatrix& m, int i, int grid_points);

// composite trapezoid over the curve: (1/m)*(v_0/2 + v_1 + ... + v_{m-1} + v_m/2)
double gacc_auc(const AccuracyMatrix& m, int i, int grid_points);

// analytic integral of the same curve (alternate mode, not the table
// convention): a/c + (b*c - a*e)/c^2 * ln((c + e)/e) with a = r*A(i,1),
// b = sum of novel entries, c = r, e = i-1; A(1,1) for the base session
double gacc_auc_closed_form(const AccuracyMatrix& m, int i);

// harmonic mean of base accuracy and novel-only mean; defined as 0 when both
// arguments vanish (instability convention); i >= 2
double hacc(const AccuracyMatrix& m, int i);
double harmonic_mean(double base_acc, double novel_acc);

// ===== aggregates ===========================================================

double aacc_overall(const AccuracyMatrix& m);                 // mean of aacc_session
double lacc(const AccuracyMatrix& m);                         // aacc at last session
double tacc_overall(const AccuracyMatrix& m);                 // mean of tacc_session
double gacc_overall(const AccuracyMatrix& m, int grid_points);  // mean of gacc_auc

// ===== forgetting ===========================================================

struct ForgettingBlock {
  std::vector<double> pd;                  // pd[t-1] = A(t,t) - A(n,t); positive = forgetting
  std::vector<std::optional<double>> rpd;  // pd/A(t,t); empty when A(t,t) = 0
  std::vector<double> f;                   // max_{i>=t} A(i,t) - min_{i>=t} A(i,t)
  // kr[i-1][t-1] = A(i,t)/A(t,t) for t <= i; empty when A(t,t) = 0
  std::vector<std::vector<std::optional<double>>> kr;
};

ForgettingBlock forgetting_block(const AccuracyMatrix& m);

// ===== report bundle ========================================================

struct SessionMetrics {
  int session = 0;
  double aacc = 0.0;
  double tacc = 0.0;
  std::optional<double> novel_only;  // empty for the base session
  double gacc_auc = 0.0;
  std::optional<double> hacc;  // empty for the base session
};

struct MetricReport {
  TaskLayout layout;
  std::vector<SessionMetrics> per_session;
  double aacc = 0.0;
  double lacc = 0.0;
  double tacc = 0.0;
  double gacc = 0.0;
  ForgettingBlock forgetting;
};

MetricReport build_report(const AccuracyMatrix& m, int grid_points);

// {"layout":..., "per_session":[...], "aggregate":{...}, "forgetting":{...}};
// full precision, deterministic field order, undefined ratios as null
std::string report_json(const MetricReport& report);

// header `alpha,session_1,...,session_n`, one row per grid point
std::string curve_csv(const AccuracyMatrix& m, int grid_points);

// ===== method comparison ====================================================

enum class MetricKey { Aacc, Lacc, Tacc, Gacc, Hacc, Novel };

MetricKey parse_metric_key(std::string_view name);  // throws UnknownMetric
const char* metric_key_name(MetricKey key);

// aggregate value used for ranking: aacc/lacc/tacc/gacc as above, hacc and
// novel at the last session; when alpha is set, the mean of gacc_alpha over
// sessions at that alpha instead
double metric_value(const AccuracyMatrix& m, MetricKey key,
                    std::optional<double> alpha, int grid_points);

struct RankedEntry {
  std::string name;
  double value = 0.0;
};

// descending by value, ties broken by name; throws LayoutMismatch if the
// matrices disagree on TaskLayout
std::vector<RankedEntry> compare(
    const std::vector<std::pair<std::string, AccuracyMatrix>>& named,
    MetricKey key, std::optional<double> alpha, int grid_points);

}  // namespace fscil
