#include "gqn/observation.hpp"

#include <cmath>

namespace gqn {

namespace {

void check_coord(std::vector<std::string>& out, const std::string& path,
                 double v, double bound) {
  if (!std::isfinite(v)) {
    out.push_back(path + ": not finite");
  } else if (v < -bound || v > bound) {
    out.push_back(path + ": " + std::to_string(v) + " outside [-" +
                  std::to_string(bound) + ", " + std::to_string(bound) + "]");
  }
}

void check_finite(std::vector<std::string>& out, const std::string& path,
                  double v) {
  if (!std::isfinite(v)) out.push_back(path + ": not finite");
}

void check_team(std::vector<std::string>& out, const std::string& name,
                const std::vector<PlayerObs>& team) {
  if (team.size() != 11) {
    out.push_back(name + ": expected 11 players, got " +
                  std::to_string(team.size()));
  }
  for (std::size_t i = 0; i < team.size(); ++i) {
    const std::string p = name + "[" + std::to_string(i) + "]";
    check_coord(out, p + ".pos.x", team[i].pos.x, kPitchHalfLength);
    check_coord(out, p + ".pos.y", team[i].pos.y, kPitchHalfWidth);
    check_finite(out, p + ".dir.x", team[i].dir.x);
    check_finite(out, p + ".dir.y", team[i].dir.y);
    if (!std::isfinite(team[i].tired) || team[i].tired < 0.0 ||
        team[i].tired > 1.0) {
      out.push_back(p + ".tired: outside [0, 1]");
    }
  }
}

}  // namespace

std::vector<std::string> validate_obs(const Observation& obs) {
  std::vector<std::string> out;
  check_coord(out, "ball_pos.x", obs.ball_pos.x, kPitchHalfLength);
  check_coord(out, "ball_pos.y", obs.ball_pos.y, kPitchHalfWidth);
  check_finite(out, "ball_pos.z", obs.ball_pos.z);
  check_finite(out, "ball_dir.x", obs.ball_dir.x);
  check_finite(out, "ball_dir.y", obs.ball_dir.y);
  check_finite(out, "ball_dir.z", obs.ball_dir.z);
  check_team(out, "left_team", obs.left_team);
  check_team(out, "right_team", obs.right_team);
  if (obs.active < 0 || obs.active > 10) {
    out.push_back("active: " + std::to_string(obs.active) +
                  " outside [0, 10]");
  }
  if (obs.score[0] < 0) out.push_back("score[0]: negative");
  if (obs.score[1] < 0) out.push_back("score[1]: negative");
  if (obs.steps_left < 0) out.push_back("steps_left: negative");
  const int mode = static_cast<int>(obs.game_mode);
  if (mode < 0 || mode >= kGameModeCount) {
    out.push_back("game_mode: " + std::to_string(mode) + " outside [0, 6]");
  }
  return out;
}

}  // namespace gqn
