#pragma once

#include <string_view>

#include "fscil/task_matrix.hpp"

namespace fscil {

// Analytic degenerate learners used as metric stress fixtures.
//   Lazy:     A(i,1) = base_accuracy, novel tasks 0 (never learns, never forgets)
//   Greedy:   A(i,i) = 100 for i >= 2, everything else 0 (learns, forgets all)
//   GreedyNF: like Greedy but keeps every novel task at 100
enum class CornerCase { Lazy, Greedy, GreedyNF };

CornerCase parse_corner_case(std::string_view name);  // "lazy"/"greedy"/"greedy-nf"
const char* corner_case_name(CornerCase c);

struct CornerSpec {
  CornerCase kind = CornerCase::Lazy;
  double base_accuracy = 85.0;  // in [0,100]
  TaskLayout layout{9, 60, 5};
};

AccuracyMatrix generate_corner_case(const CornerSpec& spec);

}  // namespace fscil
