#pragma once

#include <array>
#include <cstdint>

#include "gqn/observation.hpp"

namespace gqn {

struct StepInfo {
  std::array<int, 2> score{0, 0};
  int steps = 0;  // ticks elapsed this episode
};

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

// Minimal episodic environment contract. reset starts a fresh episode whose
// whole trajectory is a deterministic function of (scenario, seed, actions);
// step advances one tick and throws StateError once the episode is done.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Observation reset(std::uint64_t seed) = 0;
  virtual StepResult step(int action) = 0;
};

}  // namespace gqn
