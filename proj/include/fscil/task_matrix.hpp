#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fscil/errors.hpp"

namespace fscil {

// Layout of an incremental benchmark: one base session followed by
// (n_tasks - 1) novel sessions of equal class count.
struct TaskLayout {
  int n_tasks = 0;
  int base_classes = 0;
  int novel_classes = 0;
  int shots = 5;  // samples per novel class; used by the simulator only

  // r = base_classes / novel_classes, the base-dominance ratio.
  double base_ratio() const {
    return static_cast<double>(base_classes) / static_cast<double>(novel_classes);
  }

  // classes seen after session i (1-based)
  int classes_after(int session) const {
    return base_classes + (session - 1) * novel_classes;
  }

  friend bool operator==(const TaskLayout&, const TaskLayout&) = default;
};

// throws NonPositiveLayout on violation
void validate_layout(const TaskLayout& layout);

// Lower-triangular accuracy table: at(i, j) is the accuracy (percent, in
// [0,100]) of the model after session i evaluated on task j, 1 <= j <= i.
class AccuracyMatrix {
public:
  AccuracyMatrix() = default;
  explicit AccuracyMatrix(TaskLayout layout);

  const TaskLayout& layout() const { return layout_; }
  int sessions() const { return layout_.n_tasks; }

  double at(int i, int j) const { return values_[index(i, j)]; }
  void set(int i, int j, double value);

  // throws ValueOutOfRange if any entry leaves [0,100]
  void validate() const;

  friend bool operator==(const AccuracyMatrix&, const AccuracyMatrix&) = default;

private:
  std::size_t index(int i, int j) const;

  TaskLayout layout_;
  std::vector<double> values_;
};

enum class MatrixFormat { Csv, Json };

// CSV: line 1 `layout,<n_tasks>,<base_classes>,<novel_classes>`, then one
// line `<i>,<A(i,1)>,...,<A(i,i)>` per session; '#' comments and blank lines
// skipped; LF or CRLF. JSON: {"layout":{...},"rows":[[...],...]}.
AccuracyMatrix parse_matrix(std::string_view text, MatrixFormat format);
std::string emit_matrix(const AccuracyMatrix& m, MatrixFormat format);

// Shortest decimal string that round-trips the exact double (emit helper).
std::string format_double(double value);

}  // namespace fscil
