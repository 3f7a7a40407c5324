#pragma once

#include <string>

#include "gqn/trainer.hpp"

namespace gqn {

// Plain-text snapshot of a whole run: config, both networks, Adam moments,
// counters, the exploration rng and the replay buffer. Loading one yields a
// TrainerState that continues bit-for-bit as if the run had never stopped.
//
// Layout (line oriented, space separated):
//   GQN-CKPT 1
//   config <key> <value>          one line per config entry
//   local <name> <rows> <cols>    then <rows> lines of <cols> values
//   ...                           every parameter, fixed order
//   target <name> <rows> <cols>   same again for the target network
//   adam_t <t>
//   adam_m <name> <rows> <cols>   first moment, adam_v likewise, per param
//   env_steps <n> / episodes <n> / epsilon <x> / rng <state>
//   buffer <size> <pushed_total>
//     t <action> <reward> <done>  per transition, then feature rows
//     s <216 values> / n <216 values>
//   end
//
// Parameters and moments print as %.17g so a load reproduces every bit.
// Buffer features use shortest round-trip form; adjacency is not stored at
// all, it is a pure function of the features and the edge rule.
void save_checkpoint(const TrainerState& state, const std::string& path);

// Throws CheckpointError: Io when the file cannot be opened, Version on a
// bad magic line or unknown keyword, Truncated when the file ends early,
// Shape when a section disagrees with the config (names, dimensions, value
// ranges). Never returns partial state.
TrainerState load_checkpoint(const std::string& path);

}  // namespace gqn
