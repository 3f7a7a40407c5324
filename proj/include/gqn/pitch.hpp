#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gqn/dump_io.hpp"
#include "gqn/env.hpp"
#include "gqn/obs_graph.hpp"
#include "gqn/observation.hpp"
#include "gqn/rng.hpp"

namespace gqn {

// Simplified 11-vs-11 football on the standard pitch frame. First-order
// kinematics only: players are points with per-tick speeds, the ball either
// sits at its owner's feet or travels freely under friction. No offside, no
// fouls, no set pieces beyond the kickoff. The point is a deterministic,
// fully inspectable environment where a correct training loop visibly
// learns within thousands of steps, not faithfulness to the real game.

// The 19-action set, in the conventional order. Directions use +x toward
// the opponent goal and +y toward the bottom touchline.
inline constexpr int kActionIdle = 0;
inline constexpr int kActionLeft = 1;
inline constexpr int kActionTopLeft = 2;
inline constexpr int kActionTop = 3;
inline constexpr int kActionTopRight = 4;
inline constexpr int kActionRight = 5;
inline constexpr int kActionBottomRight = 6;
inline constexpr int kActionBottom = 7;
inline constexpr int kActionBottomLeft = 8;
inline constexpr int kActionLongPass = 9;
inline constexpr int kActionHighPass = 10;
inline constexpr int kActionShortPass = 11;
inline constexpr int kActionShot = 12;
inline constexpr int kActionSprint = 13;
inline constexpr int kActionReleaseDirection = 14;
inline constexpr int kActionReleaseSprint = 15;
inline constexpr int kActionSlide = 16;
inline constexpr int kActionDribble = 17;
inline constexpr int kActionReleaseDribble = 18;

// Motion and contact tuning. Speeds are pitch units per tick, chosen so a
// striker walks the half pitch in about a hundred ticks.
inline constexpr double kPlayerSpeed = 0.01;
inline constexpr double kSprintSpeed = 0.015;
inline constexpr double kShortPassSpeed = 0.02;
inline constexpr double kHighPassSpeed = 0.025;
inline constexpr double kLongPassSpeed = 0.03;
inline constexpr double kShotSpeed = 0.04;
inline constexpr double kBallFriction = 0.93;   // free-ball velocity retained per tick
inline constexpr double kBallGravity = 0.01;    // z velocity loss per tick
// Pickup distance for a free ball. Strictly below the slowest pass's
// per-tick travel (0.02), so a freshly released ball always escapes the
// passer's reach on its first tick of flight.
inline constexpr double kCaptureRadius = 0.015;
inline constexpr double kCaptureMaxHeight = 0.03;
inline constexpr double kStealRadius = 0.01;    // tackle distance, halved while dribbling
inline constexpr double kGoalHalfWidth = 0.044;
inline constexpr double kGoalMaxHeight = 0.15;
inline constexpr double kChaseSpeed = 0.012;        // opponent chaser at difficulty 1
inline constexpr double kOpponentShotRange = 0.35;  // distance to goal that triggers a shot
inline constexpr double kCheckpointBonus = 0.1;
inline constexpr int kCheckpointBands = 10;
inline constexpr double kTiredSprintRate = 0.002;
inline constexpr double kTiredMoveRate = 0.001;
inline constexpr double kTiredRestRate = 0.0005;
inline constexpr double kTiredSlowdown = 0.25;  // full fatigue removes this speed fraction
// An unowned ball slower than this counts as dead in drill scenarios. The
// slowest pass still moves at ~0.0023 after thirty ticks of friction, so no
// in-flight ball trips it before a receiver can reach it.
inline constexpr double kDeadBallSpeed = 0.002;
// Drill shot clock: ticks without any reward before the drill restarts. A
// walking dribbler crosses a band roughly every dozen ticks, so only truly
// stagnant play trips this. Kept tight so a stalled drill ends in a terminal
// state quickly instead of padding the replay buffer with idle ticks.
inline constexpr int kDrillStallTicks = 100;

inline constexpr int kNoOwner = -1;

struct PitchPlayer {
  Vec2 pos;
  Vec2 vel;
  double tired = 0.0;
};

struct PitchBall {
  Vec3 pos;
  Vec3 vel;
  int owner = kNoOwner;  // global player index, left 0..10, right 11..21
};

// Named preset. The four difficulty presets share the kickoff setup and a
// full-match length; empty_goal_1v0 is the desk-scale drill: no resistance,
// short episodes, ends on the first goal or when the drill breaks down.
struct Scenario {
  std::string name;
  double difficulty = 0.0;  // scales every scripted-opponent speed
  int episode_length = 3000;
  bool end_on_goal = false;
  bool park_right = false;  // opponents idle near their own corner flags
  // drill rule: the episode ends once an unowned ball comes to rest, so a
  // squandered possession does not leave hundreds of dead ticks behind
  bool end_on_dead_ball = false;
  // drill rule: the episode ends after kDrillStallTicks without a reward,
  // the training-ground equivalent of a shot clock
  bool end_on_stall = false;

  // ConfigError listing the available names on an unknown one.
  static Scenario by_name(const std::string& name);
  static std::vector<std::string> names();
};

// Complete simulation state. Everything step() reads or writes lives here;
// the env object adds nothing beyond it, which is what makes recorded
// episodes replayable.
struct PitchState {
  std::array<PitchPlayer, 22> players;  // 0..10 left team, 11..21 right team
  PitchBall ball;
  std::array<int, 2> score{0, 0};
  int ticks = 0;
  int last_reward_tick = 0;  // feeds the drill shot clock
  Scenario scenario;
  std::array<Vec2, 22> anchors;  // jittered kickoff spots, formation targets
  Rng rng{0};                    // consumed only by reset-time jitter
  std::array<bool, kCheckpointBands> checkpoint_flags{};

  // sticky controls for the active player
  int sticky_dir = 0;  // 0 none, else one of the eight direction actions
  bool sprinting = false;
  bool dribbling = false;
};

// What one scripted opponent wants this tick: a velocity (already scaled by
// difficulty and fatigue) and whether to shoot if it owns the ball.
struct OpponentIntent {
  Vec2 vel;
  bool shoot = false;
};

// Deterministic rule AI for the right team. The nearest opponent chases the
// ball, a ball-owning opponent advances on the left goal and shoots in
// range, everyone else drifts back to formation. Difficulty 0 freezes all
// of it. Pure function: same state and difficulty, same intents.
std::array<OpponentIntent, 11> scripted_opponent_policy(const PitchState& state,
                                                        double difficulty);

// Pays kCheckpointBonus for every band of ball-x newly reached with the
// ball at a left player's feet, marking the band's flag in `next`. Bands
// sit at x >= (k+1)/10 for k = 0..9, so the full set is worth 1.0 and the
// last band is the goal line itself. Flags only ever turn on.
double checkpoint_reward(const PitchState& prev, PitchState& next);

class PitchEnv : public Environment {
 public:
  explicit PitchEnv(const Scenario& scenario) : scenario_(scenario) {}
  explicit PitchEnv(const std::string& scenario_name)
      : PitchEnv(Scenario::by_name(scenario_name)) {}

  // Kickoff: the active striker stands on the center spot owning the ball,
  // everyone else at (slightly seed-jittered) formation anchors.
  Observation reset(std::uint64_t seed) override;

  // One tick. StateError after the episode ended.
  StepResult step(int action) override;

  const PitchState& state() const { return state_; }
  const Scenario& scenario() const { return scenario_; }

  static constexpr int kActivePlayer = 10;  // the controlled left striker

 private:
  Observation make_obs(GameMode mode) const;
  void place_kickoff();

  Scenario scenario_;
  PitchState state_;
  bool done_ = true;  // until the first reset
};

// Rolls one episode with `policy` choosing every action from the graph view
// of the observation, collecting the dump-format records (observation,
// action, reward, done per tick). Works on any environment.
std::vector<DumpRecord> record_episode(
    Environment& env, const std::function<int(const Graph&)>& policy,
    std::uint64_t seed, const EdgeRule& edges = EdgeRule{});

}  // namespace gqn
