#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gqn/trainer.hpp"

namespace gqn::cli {

// Documented process exit codes, shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCheckpoint = 3;
inline constexpr int kExitData = 4;

// A training run as the command line sees it: the trainer config plus the
// scenario to play, where artifacts go and how often to snapshot.
struct RunConfig {
  TrainerConfig trainer;
  std::string scenario;
  std::string out_dir = ".";
  // env steps between ckpt_<step>.gqn snapshots; 0 keeps only final.gqn
  std::uint64_t checkpoint_interval = 0;
};

// Parses and dispatches one invocation. `args` excludes the program name.
// Everything the command prints goes to `out`/`err`, so callers (and tests)
// can capture it.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// main() adapter: forwards argv[1..] to the overload above with the real
// standard streams.
int run(int argc, const char* const* argv);

}  // namespace gqn::cli
