#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gqn/qnetwork.hpp"

namespace gqn {

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double worst = 0.0;
  std::string worst_param;
  bool passed = false;
};

// Compares q_backward against central finite differences on a random
// 24-node graph with random upstream weights. `perturb_backward` skews one
// analytic gradient entry and exists only as the negative control.
GradCheckReport run_gradcheck(NetKind kind, std::uint64_t seed,
                              bool perturb_backward = false);

inline constexpr double kGradCheckTolerance = 1e-4;

}  // namespace gqn
