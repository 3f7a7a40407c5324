#pragma once

#include <array>
#include <string>
#include <vector>

namespace gqn {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  bool operator==(const Vec3&) const = default;
};

struct PlayerObs {
  Vec2 pos;
  Vec2 dir;
  double tired = 0.0;  // fatigue in [0,1]
  bool operator==(const PlayerObs&) const = default;
};

enum class GameMode {
  Normal = 0,
  KickOff = 1,
  GoalKick = 2,
  FreeKick = 3,
  Corner = 4,
  ThrowIn = 5,
  Penalty = 6,
};

inline constexpr int kGameModeCount = 7;

// Full game state as the agent sees it. Pitch frame: x in [-1,1] with the
// right team's goal at x=+1, y in [-0.42,0.42].
struct Observation {
  Vec3 ball_pos;
  Vec3 ball_dir;
  std::vector<PlayerObs> left_team;   // exactly 11 when valid
  std::vector<PlayerObs> right_team;  // exactly 11 when valid
  int active = 0;                     // controlled index into left_team
  std::array<int, 2> score{0, 0};     // left, right
  int steps_left = 0;
  GameMode game_mode = GameMode::Normal;

  bool operator==(const Observation&) const = default;
};

inline constexpr double kPitchHalfLength = 1.0;
inline constexpr double kPitchHalfWidth = 0.42;

// Every invariant violation, each tagged with the offending field's path
// (e.g. "left_team[3].pos.x"). Empty means the observation is valid.
std::vector<std::string> validate_obs(const Observation& obs);

}  // namespace gqn
