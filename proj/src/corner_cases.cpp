#include "fscil/corner_cases.hpp"

namespace fscil {

CornerCase parse_corner_case(std::string_view name) {
  if (name == "lazy") return CornerCase::Lazy;
  if (name == "greedy") return CornerCase::Greedy;
  if (name == "greedy-nf") return CornerCase::GreedyNF;
  raise(ErrorCode::BadConfig, "unknown corner case '" + std::string(name) + "'");
}

const char* corner_case_name(CornerCase c) {
  switch (c) {
    case CornerCase::Lazy: return "lazy";
    case CornerCase::Greedy: return "greedy";
    case CornerCase::GreedyNF: return "greedy-nf";
  }
  return "unknown";
}

AccuracyMatrix generate_corner_case(const CornerSpec& spec) {
  if (!(spec.base_accuracy >= 0.0 && spec.base_accuracy <= 100.0)) {
    raise(ErrorCode::ValueOutOfRange, "base accuracy outside [0,100]");
  }
  AccuracyMatrix m(spec.layout);
  switch (spec.kind) {
    case CornerCase::Lazy:
      // keeps the base task forever, never learns a novel task
      for (int i = 1; i <= spec.layout.n_tasks; ++i) m.set(i, 1, spec.base_accuracy);
      break;
    case CornerCase::Greedy:
      // masters only the current task, forgets everything else
      m.set(1, 1, spec.base_accuracy);
      for (int i = 2; i <= spec.layout.n_tasks; ++i) m.set(i, i, 100.0);
      break;
    case CornerCase::GreedyNF:
      // masters every novel task and keeps them, loses the base task
      m.set(1, 1, spec.base_accuracy);
      for (int i = 2; i <= spec.layout.n_tasks; ++i)
        for (int j = 2; j <= i; ++j) m.set(i, j, 100.0);
      break;
  }
  return m;
}

}  // namespace fscil
