#include "gqn/pitch.hpp"

#include <algorithm>
#include <cmath>

#include "gqn/errors.hpp"

namespace gqn {

namespace {

// Unit vectors for the eight direction actions, indexed 1..8. Index 0 is a
// placeholder for "no direction".
constexpr double kDiag = 0.7071067811865476;  // 1/sqrt(2)
constexpr Vec2 kDirections[9] = {
    {0.0, 0.0},     {-1.0, 0.0},   {-kDiag, -kDiag}, {0.0, -1.0},
    {kDiag, -kDiag}, {1.0, 0.0},   {kDiag, kDiag},   {0.0, 1.0},
    {-kDiag, kDiag},
};

double dist2(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double dist(const Vec2& a, const Vec2& b) { return std::sqrt(dist2(a, b)); }

Vec2 toward(const Vec2& from, const Vec2& to, double speed) {
  const double d = dist(from, to);
  if (d < 1e-12) return {0.0, 0.0};
  return {(to.x - from.x) / d * speed, (to.y - from.y) / d * speed};
}

void clamp_to_pitch(Vec2& p) {
  p.x = std::clamp(p.x, -kPitchHalfLength, kPitchHalfLength);
  p.y = std::clamp(p.y, -kPitchHalfWidth, kPitchHalfWidth);
}

bool is_left(int player) { return player >= 0 && player < 11; }

double tired_scale(double tired) { return 1.0 - kTiredSlowdown * tired; }

// Fatigue bookkeeping shared by both teams: effort raises it, standing
// still slowly recovers it.
void update_tired(PitchPlayer& p, bool moved, bool sprinted) {
  if (sprinted) {
    p.tired += kTiredSprintRate;
  } else if (moved) {
    p.tired += kTiredMoveRate;
  } else {
    p.tired -= kTiredRestRate;
  }
  p.tired = std::clamp(p.tired, 0.0, 1.0);
}

// Kickoff anchor layout, left team. The right team mirrors in x. Index 10
// is the controlled striker and gets overwritten with the center spot.
constexpr Vec2 kFormation[11] = {
    {-0.95, 0.0},  {-0.6, -0.3}, {-0.6, -0.1}, {-0.6, 0.1}, {-0.6, 0.3},
    {-0.3, -0.3},  {-0.3, -0.1}, {-0.3, 0.1},  {-0.3, 0.3}, {-0.1, -0.05},
    {0.0, 0.0},
};

}  // namespace

Scenario Scenario::by_name(const std::string& name) {
  if (name == "empty_goal_1v0") {
    return Scenario{"empty_goal_1v0", 0.0, 400, true, true, true, true};
  }
  if (name == "easy") return Scenario{"easy", 0.05, 3000, false, false};
  if (name == "hard") return Scenario{"hard", 0.95, 3000, false, false};
  if (name == "competition") {
    return Scenario{"competition", 0.6, 3000, false, false};
  }
  if (name == "kaggle") return Scenario{"kaggle", 1.0, 3000, false, false};

  std::string available;
  for (const std::string& n : names()) {
    if (!available.empty()) available += ", ";
    available += n;
  }
  throw ConfigError("unknown scenario '" + name + "' (available: " +
                    available + ")");
}

std::vector<std::string> Scenario::names() {
  return {"competition", "easy", "empty_goal_1v0", "hard", "kaggle"};
}

std::array<OpponentIntent, 11> scripted_opponent_policy(
    const PitchState& state, double difficulty) {
  std::array<OpponentIntent, 11> intents{};
  if (difficulty <= 0.0) return intents;

  const Vec2 ball{state.ball.pos.x, state.ball.pos.y};
  const Vec2 own_goal{-kPitchHalfLength, 0.0};

  // the chaser is the opponent closest to the ball, lowest index on ties
  int chaser = 0;
  double best = dist2(state.players[11].pos, ball);
  for (int i = 1; i < 11; ++i) {
    const double d = dist2(state.players[11 + i].pos, ball);
    if (d < best) {
      best = d;
      chaser = i;
    }
  }

  for (int i = 0; i < 11; ++i) {
    const int global = 11 + i;
    const PitchPlayer& p = state.players[global];
    const double scale = difficulty * tired_scale(p.tired);

    if (state.ball.owner == global) {
      // carry toward the left goal, shoot once in range
      intents[i].vel = toward(p.pos, own_goal, kPlayerSpeed * scale);
      intents[i].shoot = dist(p.pos, own_goal) <= kOpponentShotRange;
    } else if (i == chaser) {
      intents[i].vel = toward(p.pos, ball, kChaseSpeed * scale);
    } else {
      intents[i].vel = toward(p.pos, state.anchors[global],
                              kPlayerSpeed * scale);
    }
  }
  return intents;
}

// The prev state is implicit in the flags `next` carries forward: a band
// counts as newly crossed exactly when its flag is still clear.
double checkpoint_reward(const PitchState&, PitchState& next) {
  if (next.ball.owner == kNoOwner || !is_left(next.ball.owner)) return 0.0;
  double reward = 0.0;
  for (int k = 0; k < kCheckpointBands; ++k) {
    const double threshold = static_cast<double>(k + 1) / 10.0;
    if (!next.checkpoint_flags[k] && next.ball.pos.x >= threshold) {
      next.checkpoint_flags[k] = true;
      reward += kCheckpointBonus;
    }
  }
  return reward;
}

void PitchEnv::place_kickoff() {
  for (int i = 0; i < 22; ++i) {
    state_.players[i].pos = state_.anchors[i];
    state_.players[i].vel = {0.0, 0.0};
  }
  state_.players[kActivePlayer].pos = {0.0, 0.0};
  state_.ball.pos = {0.0, 0.0, 0.0};
  state_.ball.vel = {0.0, 0.0, 0.0};
  state_.ball.owner = kActivePlayer;
  state_.sticky_dir = 0;
  state_.sprinting = false;
  state_.dribbling = false;
}

Observation PitchEnv::reset(std::uint64_t seed) {
  state_ = PitchState{};
  state_.scenario = scenario_;
  state_.rng = Rng(seed);

  for (int i = 0; i < 11; ++i) {
    state_.anchors[i] = kFormation[i];
    if (scenario_.park_right) {
      // idle opponents lined up near their own corner flags, far enough
      // from the center lane that a straight dribble never meets one
      state_.anchors[11 + i] = {0.82 + 0.03 * (i % 5),
                                (i % 2 == 0 ? 1.0 : -1.0) * (0.24 + 0.03 * (i / 5))};
    } else {
      state_.anchors[11 + i] = {-kFormation[i].x, kFormation[i].y};
    }
  }
  if (!scenario_.park_right) {
    // the mirrored formation would drop the defending striker on the
    // center spot itself; stand it off the kickoff circle and clear of
    // the straight dribble lane so kickoffs are not decided by a statue
    state_.anchors[11 + kActivePlayer] = {0.08, 0.12};
  }
  // striker and ball stay exact; everyone else wobbles a little so seeds
  // produce distinct but equally solvable episodes
  for (int i = 0; i < 22; ++i) {
    if (i == kActivePlayer) continue;
    state_.anchors[i].x += state_.rng.uniform(-0.01, 0.01);
    state_.anchors[i].y += state_.rng.uniform(-0.01, 0.01);
    clamp_to_pitch(state_.anchors[i]);
  }

  place_kickoff();
  done_ = false;
  return make_obs(GameMode::KickOff);
}

StepResult PitchEnv::step(int action) {
  if (done_) throw StateError("PitchEnv: step after the episode ended");
  if (action < kActionIdle || action > kActionReleaseDribble) {
    throw ValidationError("PitchEnv: action " + std::to_string(action) +
                          " outside [0, 18]");
  }

  const PitchState prev = state_;
  PitchPlayer& active = state_.players[kActivePlayer];

  // 1. the agent's action updates sticky controls or releases the ball
  switch (action) {
    case kActionIdle:
    case kActionSlide:  // tackles are not modeled; accepted as a no-op
      break;
    case kActionLeft:
    case kActionTopLeft:
    case kActionTop:
    case kActionTopRight:
    case kActionRight:
    case kActionBottomRight:
    case kActionBottom:
    case kActionBottomLeft:
      state_.sticky_dir = action;
      break;
    case kActionReleaseDirection:
      state_.sticky_dir = 0;
      break;
    case kActionSprint:
      state_.sprinting = true;
      break;
    case kActionReleaseSprint:
      state_.sprinting = false;
      break;
    case kActionDribble:
      state_.dribbling = true;
      break;
    case kActionReleaseDribble:
      state_.dribbling = false;
      break;
    case kActionLongPass:
    case kActionHighPass:
    case kActionShortPass:
      if (state_.ball.owner == kActivePlayer) {
        // short pass to the nearest teammate, long pass to the most
        // advanced one, high pass lofts toward the nearest forward of us
        int target = -1;
        double best = 0.0;
        for (int i = 0; i < 11; ++i) {
          if (i == kActivePlayer) continue;
          const Vec2& mate = state_.players[i].pos;
          double key = 0.0;
          if (action == kActionShortPass) {
            key = -dist2(active.pos, mate);
          } else if (action == kActionLongPass) {
            key = mate.x;
          } else {
            if (mate.x <= active.pos.x) continue;
            key = -dist2(active.pos, mate);
          }
          if (target < 0 || key > best) {
            best = key;
            target = i;
          }
        }
        if (target >= 0) {
          const double speed = action == kActionShortPass ? kShortPassSpeed
                               : action == kActionLongPass ? kLongPassSpeed
                                                           : kHighPassSpeed;
          const Vec2 v = toward(active.pos, state_.players[target].pos, speed);
          state_.ball.vel = {v.x, v.y, action == kActionHighPass ? 0.04 : 0.0};
          state_.ball.owner = kNoOwner;
        }
      }
      break;
    case kActionShot:
      if (state_.ball.owner == kActivePlayer) {
        const Vec2 v =
            toward(active.pos, Vec2{kPitchHalfLength, 0.0}, kShotSpeed);
        state_.ball.vel = {v.x, v.y, 0.0};
        state_.ball.owner = kNoOwner;
      }
      break;
    default:
      break;
  }

  // 2. a teammate holding the ball returns it to the striker right away,
  // so control never strands on an unservable player
  if (state_.ball.owner != kNoOwner && is_left(state_.ball.owner) &&
      state_.ball.owner != kActivePlayer) {
    const Vec2 v = toward(state_.players[state_.ball.owner].pos, active.pos,
                          kShortPassSpeed);
    state_.ball.vel = {v.x, v.y, 0.0};
    state_.ball.owner = kNoOwner;
  }

  // 3. scripted opponents act on the state the agent just shaped
  const auto intents =
      scripted_opponent_policy(state_, scenario_.difficulty);
  for (int i = 0; i < 11; ++i) {
    const int global = 11 + i;
    if (intents[i].shoot && state_.ball.owner == global) {
      const Vec2 v = toward(state_.players[global].pos,
                            Vec2{-kPitchHalfLength, 0.0}, kShotSpeed);
      state_.ball.vel = {v.x, v.y, 0.0};
      state_.ball.owner = kNoOwner;
    }
  }

  // 4. movement: the active player follows sticky controls, opponents
  // follow their intents, the rest of the left team holds position
  for (int i = 0; i < 22; ++i) {
    PitchPlayer& p = state_.players[i];
    Vec2 vel{0.0, 0.0};
    bool sprinted = false;
    if (i == kActivePlayer) {
      if (state_.sticky_dir != 0) {
        const double speed = (state_.sprinting ? kSprintSpeed : kPlayerSpeed) *
                             tired_scale(p.tired);
        vel = {kDirections[state_.sticky_dir].x * speed,
               kDirections[state_.sticky_dir].y * speed};
        sprinted = state_.sprinting;
      }
    } else if (i >= 11) {
      vel = intents[i - 11].vel;
    }
    p.vel = vel;
    p.pos.x += vel.x;
    p.pos.y += vel.y;
    clamp_to_pitch(p.pos);
    update_tired(p, vel.x != 0.0 || vel.y != 0.0, sprinted);
  }

  // 5. ball: glued to the owner, or ballistic with friction
  if (state_.ball.owner != kNoOwner) {
    const Vec2& feet = state_.players[state_.ball.owner].pos;
    state_.ball.pos = {feet.x, feet.y, 0.0};
    state_.ball.vel = {0.0, 0.0, 0.0};
  } else {
    state_.ball.pos.x += state_.ball.vel.x;
    state_.ball.pos.y += state_.ball.vel.y;
    state_.ball.pos.z += state_.ball.vel.z;
    state_.ball.vel.x *= kBallFriction;
    state_.ball.vel.y *= kBallFriction;
    state_.ball.vel.z -= kBallGravity;
    if (state_.ball.pos.z <= 0.0) {
      state_.ball.pos.z = 0.0;
      state_.ball.vel.z = 0.0;
    }
  }

  // 6. possession: free balls get captured, held balls can be poked away
  const Vec2 ball2{state_.ball.pos.x, state_.ball.pos.y};
  if (state_.ball.owner == kNoOwner) {
    if (state_.ball.pos.z < kCaptureMaxHeight) {
      int winner = kNoOwner;
      double best = kCaptureRadius * kCaptureRadius;
      for (int i = 0; i < 22; ++i) {
        const double d = dist2(state_.players[i].pos, ball2);
        if (d < best) {
          best = d;
          winner = i;
        }
      }
      if (winner != kNoOwner) state_.ball.owner = winner;
    }
  } else {
    const bool owner_left = is_left(state_.ball.owner);
    double radius = kStealRadius;
    if (state_.ball.owner == kActivePlayer && state_.dribbling) {
      radius *= 0.5;  // dribbling shields the ball
    }
    int thief = kNoOwner;
    double best = radius * radius;
    for (int i = 0; i < 22; ++i) {
      if (is_left(i) == owner_left) continue;
      const double d = dist2(state_.players[i].pos, ball2);
      if (d < best) {
        best = d;
        thief = i;
      }
    }
    if (thief != kNoOwner) {
      state_.ball.owner = thief;
      const Vec2& feet = state_.players[thief].pos;
      state_.ball.pos = {feet.x, feet.y, 0.0};
    }
  }

  // 7. rewards: checkpoint bands first, then goals, so carrying the ball
  // over the line pays both
  double reward = checkpoint_reward(prev, state_);

  bool scored = false;
  GameMode obs_mode = GameMode::Normal;
  const bool in_mouth = std::fabs(state_.ball.pos.y) <= kGoalHalfWidth &&
                        state_.ball.pos.z <= kGoalMaxHeight;
  if (in_mouth && state_.ball.pos.x >= kPitchHalfLength) {
    state_.score[0] += 1;
    reward += 1.0;
    scored = true;
  } else if (in_mouth && state_.ball.pos.x <= -kPitchHalfLength) {
    state_.score[1] += 1;
    reward -= 1.0;
    scored = true;
  }

  state_.ticks += 1;

  if (scored && !scenario_.end_on_goal) {
    place_kickoff();
    obs_mode = GameMode::KickOff;
  } else if (scored) {
    // freeze the ball on the goal line so the final observation stays
    // inside the pitch frame; possession is left as-is so the final
    // state still records who carried the ball in
    state_.ball.pos.x =
        std::clamp(state_.ball.pos.x, -kPitchHalfLength, kPitchHalfLength);
    state_.ball.vel = {0.0, 0.0, 0.0};
  } else {
    // out of play without a goal: the ball stops dead on the boundary
    if (std::fabs(state_.ball.pos.x) > kPitchHalfLength) {
      state_.ball.pos.x =
          std::clamp(state_.ball.pos.x, -kPitchHalfLength, kPitchHalfLength);
      state_.ball.vel.x = 0.0;
    }
    if (std::fabs(state_.ball.pos.y) > kPitchHalfWidth) {
      state_.ball.pos.y =
          std::clamp(state_.ball.pos.y, -kPitchHalfWidth, kPitchHalfWidth);
      state_.ball.vel.y = 0.0;
    }
  }

  // drill breakdown: nobody owns the ball and it has stopped rolling
  const Vec3& bv = state_.ball.vel;
  const bool dead_ball =
      scenario_.end_on_dead_ball && !scored &&
      state_.ball.owner == kNoOwner &&
      std::sqrt(bv.x * bv.x + bv.y * bv.y + bv.z * bv.z) < kDeadBallSpeed;

  // drill shot clock: too long without earning anything
  if (reward != 0.0) state_.last_reward_tick = state_.ticks;
  const bool stalled =
      scenario_.end_on_stall &&
      state_.ticks - state_.last_reward_tick >= kDrillStallTicks;

  done_ = (scored && scenario_.end_on_goal) || dead_ball || stalled ||
          state_.ticks >= scenario_.episode_length;

  StepResult result;
  result.obs = make_obs(obs_mode);
  result.reward = reward;
  result.done = done_;
  result.info.score = state_.score;
  result.info.steps = state_.ticks;
  return result;
}

Observation PitchEnv::make_obs(GameMode mode) const {
  Observation obs;
  obs.ball_pos = state_.ball.pos;
  obs.ball_dir = state_.ball.vel;
  obs.left_team.resize(11);
  obs.right_team.resize(11);
  for (int i = 0; i < 11; ++i) {
    obs.left_team[i] = {state_.players[i].pos, state_.players[i].vel,
                        state_.players[i].tired};
    obs.right_team[i] = {state_.players[11 + i].pos, state_.players[11 + i].vel,
                         state_.players[11 + i].tired};
  }
  obs.active = kActivePlayer;
  obs.score = state_.score;
  obs.steps_left = scenario_.episode_length - state_.ticks;
  obs.game_mode = mode;
  return obs;
}

std::vector<DumpRecord> record_episode(
    Environment& env, const std::function<int(const Graph&)>& policy,
    std::uint64_t seed, const EdgeRule& edges) {
  std::vector<DumpRecord> records;
  Observation obs = env.reset(seed);
  bool done = false;
  while (!done) {
    const int action = policy(obs_to_graph(obs, edges));
    const StepResult result = env.step(action);
    records.push_back(DumpRecord{obs, action, result.reward, result.done});
    obs = result.obs;
    done = result.done;
  }
  return records;
}

}  // namespace gqn
