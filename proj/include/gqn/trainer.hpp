#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gqn/env.hpp"
#include "gqn/obs_graph.hpp"
#include "gqn/param.hpp"
#include "gqn/qnetwork.hpp"
#include "gqn/replay.hpp"

namespace gqn {

struct TrainerConfig {
  double gamma = 0.7;
  double lr = 1e-4;
  std::size_t batch_size = 1;
  double eps_start = 1.0;
  double eps_end = 0.05;
  std::uint64_t eps_decay_steps = 30000;
  std::uint64_t sync_interval = 1000;  // env steps between hard target copies
  std::size_t buffer_capacity = 100000;
  std::size_t min_buffer = 1000;  // learn steps start once this is reached
  std::uint64_t seed = 0;
  NetKind network_kind = NetKind::Gcn;
  std::uint64_t total_steps = 0;
  std::uint64_t episodes_per_epoch = 3000;  // bookkeeping unit, not a trigger
  EdgeRule edges;
  double grad_clip_norm = 0.0;      // global-norm clip; 0 turns it off
  std::uint64_t eval_interval = 0;  // env steps between eval rows; 0 = never
  std::uint64_t eval_episodes = 10;
};

// ConfigError with the offending field's name on any bad value.
void validate_config(const TrainerConfig& cfg);

// Flat key=value view of the config, in a fixed key order; shared by the
// checkpoint format and the CLI config file.
std::vector<std::pair<std::string, std::string>> config_to_kv(
    const TrainerConfig& cfg);

// Applies one key=value pair. Returns false for unknown keys (callers layer
// their own keys on top); throws ConfigError when the value does not parse.
bool apply_config_kv(TrainerConfig& cfg, const std::string& key,
                     const std::string& value);

// Everything a run carries: the two networks, replay memory, optimizer
// moments, the exploration rng and the step/episode counters. Plain value
// type; copying it forks the run.
struct TrainerState {
  TrainerConfig cfg;
  QNetwork local;
  QNetwork target;
  ReplayBuffer buffer;
  AdamState opt;
  Rng rng;
  std::uint64_t env_steps = 0;
  std::uint64_t episodes = 0;
  double epsilon = 1.0;
};

// Validates cfg, seeds the parameter init and exploration streams from
// cfg.seed, and copies local into target.
TrainerState make_trainer_state(const TrainerConfig& cfg);

// Linear decay eps_start -> eps_end over eps_decay_steps, constant after.
double epsilon_for_step(const TrainerConfig& cfg, std::uint64_t step);

// Epsilon-greedy over the 19 action values. Greedy ties break toward the
// lowest index; eps = 0 consumes no randomness at all.
int select_action(const ActionValues& q, double eps, Rng& rng);

// r for terminal transitions, else r + gamma * max_a' Q_target(s', a').
// gamma = 0 never touches the target network.
double td_target(const Transition& t, QNetwork& target_net, double gamma);

struct TdLoss {
  double loss = 0.0;               // mean squared error over the batch
  std::vector<double> errors;      // signed per-sample td_target - Q(s,a)
};

TdLoss td_loss(const std::vector<Transition>& batch, QNetwork& local,
               QNetwork& target, double gamma);

// One optimization step: sample a batch, push the squared-error gradient
// through the local network, apply Adam, zero gradients. Returns the batch
// loss, or nullopt while the buffer is still below min_buffer (a no-op).
// Only local-network and optimizer state change.
std::optional<double> learn_step(TrainerState& state);

// Hard copy theta_target := theta_local.
void sync_target(TrainerState& state);

struct MetricsRow {
  std::uint64_t step = 0;
  std::uint64_t episode = 0;
  double epsilon = 0.0;
  std::optional<double> loss;            // mean over the episode's learn steps
  std::optional<double> episode_return;  // blank on eval rows
  std::optional<double> score_diff;
  std::optional<double> eval_return;     // blank except on eval rows
};

std::string metrics_header();
std::string format_metrics_row(const MetricsRow& row);

struct TrainHooks {
  std::function<void(const MetricsRow&)> on_row;
  // Fires at every episode boundary, after the row(s); the state is safe to
  // checkpoint here and a resumed run continues bit-exactly.
  std::function<void(const TrainerState&)> on_episode_end;
};

// The training loop. Runs whole episodes until env_steps reaches
// cfg.total_steps at an episode boundary; returns every metrics row emitted
// during this call. Deterministic given (cfg, deterministic env).
std::vector<MetricsRow> train(Environment& env, TrainerState& state,
                              const TrainHooks& hooks = {});

struct EvalResult {
  double mean_score_diff = 0.0;
  double mean_return = 0.0;
};

// Greedy (eps = 0) rollouts with per-episode seeds derived from `seed`.
EvalResult evaluate(Environment& env, QNetwork& net, std::uint64_t episodes,
                    std::uint64_t seed, const EdgeRule& edges = EdgeRule{});

// Same harness, arbitrary policy; the baseline everything is measured with.
EvalResult evaluate_policy(Environment& env,
                           const std::function<int(const Graph&)>& policy,
                           std::uint64_t episodes, std::uint64_t seed,
                           const EdgeRule& edges = EdgeRule{});

// Uniform-random actions through the same harness.
EvalResult evaluate_random(Environment& env, std::uint64_t episodes,
                           std::uint64_t seed);

}  // namespace gqn
