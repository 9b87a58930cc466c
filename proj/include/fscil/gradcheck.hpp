#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fscil {

struct GradCheckResult {
  std::string name;
  std::size_t checked = 0;
  std::size_t failed = 0;
  double worst_rel_err = 0.0;
};

// Central-difference verification (step 1e-5, relative error < 1e-4) of every
// loss gradient and every rectifier parameter coordinate, over `configs`
// random configurations at feature dimension `dim`. Smooth-L1 kink
// neighborhoods (|residual - 1| < 1e-3) are re-rolled.
std::vector<GradCheckResult> run_gradcheck(std::uint64_t seed, int configs, int dim);

bool gradcheck_passed(const std::vector<GradCheckResult>& results);

}  // namespace fscil
