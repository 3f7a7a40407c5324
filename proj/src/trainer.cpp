#include "gqn/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "gqn/errors.hpp"
#include "gqn/text.hpp"

namespace gqn {

namespace {

// Stream ids for Rng::derive, spaced far apart so episode indices never
// collide with the fixed streams.
constexpr std::uint64_t kParamStream = 1;
constexpr std::uint64_t kActionStream = 2;
constexpr std::uint64_t kEpisodeStreamBase = 1ULL << 32;
constexpr std::uint64_t kEvalStreamBase = 1ULL << 33;

}  // namespace

void validate_config(const TrainerConfig& cfg) {
  if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) {
    throw ConfigError("gamma: must be in [0, 1)");
  }
  if (!(cfg.lr > 0.0) || !std::isfinite(cfg.lr)) {
    throw ConfigError("lr: must be positive");
  }
  if (cfg.batch_size < 1) throw ConfigError("batch_size: must be >= 1");
  if (!(cfg.eps_start >= 0.0 && cfg.eps_start <= 1.0)) {
    throw ConfigError("eps_start: must be in [0, 1]");
  }
  if (!(cfg.eps_end >= 0.0 && cfg.eps_end <= 1.0)) {
    throw ConfigError("eps_end: must be in [0, 1]");
  }
  if (cfg.eps_end > cfg.eps_start) {
    throw ConfigError("eps_end: must not exceed eps_start");
  }
  if (cfg.eps_decay_steps < 1) {
    throw ConfigError("eps_decay_steps: must be >= 1");
  }
  if (cfg.sync_interval < 1) throw ConfigError("sync_interval: must be >= 1");
  if (cfg.buffer_capacity < 1) {
    throw ConfigError("buffer_capacity: must be >= 1");
  }
  if (cfg.min_buffer < 1) throw ConfigError("min_buffer: must be >= 1");
  if (cfg.min_buffer > cfg.buffer_capacity) {
    throw ConfigError("min_buffer: must not exceed buffer_capacity");
  }
  if (cfg.batch_size > cfg.buffer_capacity) {
    throw ConfigError("batch_size: must not exceed buffer_capacity");
  }
  if (cfg.episodes_per_epoch < 1) {
    throw ConfigError("episodes_per_epoch: must be >= 1");
  }
  if (!(cfg.grad_clip_norm >= 0.0) || !std::isfinite(cfg.grad_clip_norm)) {
    throw ConfigError("grad_clip_norm: must be >= 0");
  }
  if (cfg.eval_interval > 0 && cfg.eval_episodes < 1) {
    throw ConfigError("eval_episodes: must be >= 1 when eval_interval is set");
  }
}

std::vector<std::pair<std::string, std::string>> config_to_kv(
    const TrainerConfig& cfg) {
  return {
      {"gamma", format_double(cfg.gamma)},
      {"lr", format_double(cfg.lr)},
      {"batch_size", std::to_string(cfg.batch_size)},
      {"eps_start", format_double(cfg.eps_start)},
      {"eps_end", format_double(cfg.eps_end)},
      {"eps_decay_steps", std::to_string(cfg.eps_decay_steps)},
      {"sync_interval", std::to_string(cfg.sync_interval)},
      {"buffer_capacity", std::to_string(cfg.buffer_capacity)},
      {"min_buffer", std::to_string(cfg.min_buffer)},
      {"seed", std::to_string(cfg.seed)},
      {"net", to_string(cfg.network_kind)},
      {"total_steps", std::to_string(cfg.total_steps)},
      {"episodes_per_epoch", std::to_string(cfg.episodes_per_epoch)},
      {"edges", cfg.edges.to_string()},
      {"grad_clip_norm", format_double(cfg.grad_clip_norm)},
      {"eval_interval", std::to_string(cfg.eval_interval)},
      {"eval_episodes", std::to_string(cfg.eval_episodes)},
  };
}

bool apply_config_kv(TrainerConfig& cfg, const std::string& key,
                     const std::string& value) {
  try {
    if (key == "gamma") {
      cfg.gamma = parse_double(value, key);
    } else if (key == "lr") {
      cfg.lr = parse_double(value, key);
    } else if (key == "batch_size") {
      cfg.batch_size = static_cast<std::size_t>(parse_u64(value, key));
    } else if (key == "eps_start") {
      cfg.eps_start = parse_double(value, key);
    } else if (key == "eps_end") {
      cfg.eps_end = parse_double(value, key);
    } else if (key == "eps_decay_steps") {
      cfg.eps_decay_steps = parse_u64(value, key);
    } else if (key == "sync_interval") {
      cfg.sync_interval = parse_u64(value, key);
    } else if (key == "buffer_capacity") {
      cfg.buffer_capacity = static_cast<std::size_t>(parse_u64(value, key));
    } else if (key == "min_buffer") {
      cfg.min_buffer = static_cast<std::size_t>(parse_u64(value, key));
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, key);
    } else if (key == "net") {
      cfg.network_kind = net_kind_from_string(value);
    } else if (key == "total_steps") {
      cfg.total_steps = parse_u64(value, key);
    } else if (key == "episodes_per_epoch") {
      cfg.episodes_per_epoch = parse_u64(value, key);
    } else if (key == "edges") {
      cfg.edges = EdgeRule::parse(value);
    } else if (key == "grad_clip_norm") {
      cfg.grad_clip_norm = parse_double(value, key);
    } else if (key == "eval_interval") {
      cfg.eval_interval = parse_u64(value, key);
    } else if (key == "eval_episodes") {
      cfg.eval_episodes = parse_u64(value, key);
    } else {
      return false;
    }
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  return true;
}

TrainerState make_trainer_state(const TrainerConfig& cfg) {
  validate_config(cfg);
  Rng init_rng(Rng::derive(cfg.seed, kParamStream));
  QNetwork local(cfg.network_kind, init_rng);
  QNetwork target = local;
  ReplayBuffer buffer(cfg.buffer_capacity);
  AdamState opt = AdamState::for_params(local.params());
  return TrainerState{cfg,
                      std::move(local),
                      std::move(target),
                      std::move(buffer),
                      std::move(opt),
                      Rng(Rng::derive(cfg.seed, kActionStream)),
                      0,
                      0,
                      cfg.eps_start};
}

double epsilon_for_step(const TrainerConfig& cfg, std::uint64_t step) {
  const double span = cfg.eps_start - cfg.eps_end;
  const double progress =
      static_cast<double>(step) / static_cast<double>(cfg.eps_decay_steps);
  return std::max(cfg.eps_end, cfg.eps_start - span * progress);
}

int select_action(const ActionValues& q, double eps, Rng& rng) {
  if (eps > 0.0 && rng.uniform() < eps) {
    return static_cast<int>(rng.uniform_int(kNumActions));
  }
  int best = 0;
  for (int a = 1; a < static_cast<int>(kNumActions); ++a) {
    if (q[a] > q[best]) best = a;
  }
  return best;
}

double td_target(const Transition& t, QNetwork& target_net, double gamma) {
  if (t.done || gamma == 0.0) return t.reward;
  const ActionValues q = target_net.q_forward(t.next_state);
  return t.reward + gamma * *std::max_element(q.begin(), q.end());
}

TdLoss td_loss(const std::vector<Transition>& batch, QNetwork& local,
               QNetwork& target, double gamma) {
  if (batch.empty()) throw DataError("td_loss: empty batch");
  TdLoss out;
  out.errors.reserve(batch.size());
  for (const Transition& t : batch) {
    const double y = td_target(t, target, gamma);
    const double q = local.q_forward(t.state)[t.action];
    const double err = y - q;
    out.errors.push_back(err);
    out.loss += err * err;
  }
  out.loss /= static_cast<double>(batch.size());
  return out;
}

namespace {

void clip_gradients(const ParamSet& params, double max_norm) {
  double sq = 0.0;
  for (const auto& e : params) {
    for (std::size_t i = 0; i < e.grad->size(); ++i) {
      sq += (*e.grad)[i] * (*e.grad)[i];
    }
  }
  const double norm = std::sqrt(sq);
  if (norm <= max_norm || norm == 0.0) return;
  const double scale = max_norm / norm;
  for (const auto& e : params) e.grad->scale(scale);
}

}  // namespace

std::optional<double> learn_step(TrainerState& state) {
  const TrainerConfig& cfg = state.cfg;
  const std::size_t need = std::max(cfg.min_buffer, cfg.batch_size);
  if (state.buffer.size() < need) return std::nullopt;

  const std::vector<Transition> batch =
      state.buffer.sample(cfg.batch_size, state.rng);
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  double loss = 0.0;
  for (const Transition& t : batch) {
    const double y = td_target(t, state.target, cfg.gamma);
    const ActionValues q = state.local.q_forward(t.state);
    const double err = y - q[t.action];
    loss += err * err * inv_batch;

    // d(mean squared error)/dQ(s,a), zero in the other 18 slots
    ActionValues upstream{};
    upstream[t.action] = 2.0 * (q[t.action] - y) * inv_batch;
    state.local.q_backward(upstream);
  }

  const ParamSet params = state.local.params();
  if (cfg.grad_clip_norm > 0.0) clip_gradients(params, cfg.grad_clip_norm);
  AdamConfig adam;
  adam.lr = cfg.lr;
  adam_step(params, state.opt, adam);
  state.local.zero_grads();
  return loss;
}

void sync_target(TrainerState& state) { state.target = state.local; }

std::string metrics_header() {
  return "step,episode,epsilon,loss,episode_return,score_diff,eval_return";
}

namespace {

std::string opt_field(const std::optional<double>& v) {
  return v.has_value() ? format_double(*v) : std::string();
}

}  // namespace

std::string format_metrics_row(const MetricsRow& row) {
  return std::to_string(row.step) + "," + std::to_string(row.episode) + "," +
         format_double(row.epsilon) + "," + opt_field(row.loss) + "," +
         opt_field(row.episode_return) + "," + opt_field(row.score_diff) +
         "," + opt_field(row.eval_return);
}

std::vector<MetricsRow> train(Environment& env, TrainerState& state,
                              const TrainHooks& hooks) {
  const TrainerConfig& cfg = state.cfg;
  validate_config(cfg);
  std::vector<MetricsRow> rows;

  auto emit = [&](const MetricsRow& row) {
    rows.push_back(row);
    if (hooks.on_row) hooks.on_row(row);
  };

  while (state.env_steps < cfg.total_steps) {
    const std::uint64_t steps_before = state.env_steps;
    Observation obs =
        env.reset(Rng::derive(cfg.seed, kEpisodeStreamBase + state.episodes));
    Graph graph = obs_to_graph(obs, cfg.edges);

    double episode_return = 0.0;
    double loss_sum = 0.0;
    std::uint64_t loss_count = 0;
    int score_diff = 0;
    bool done = false;

    while (!done) {
      state.epsilon = epsilon_for_step(cfg, state.env_steps);
      const ActionValues q = state.local.q_forward(graph);
      const int action = select_action(q, state.epsilon, state.rng);

      const StepResult result = env.step(action);
      Graph next_graph = obs_to_graph(result.obs, cfg.edges);
      state.buffer.push(
          Transition{std::move(graph), action, result.reward,
                     next_graph, result.done});
      graph = std::move(next_graph);

      episode_return += result.reward;
      state.env_steps += 1;

      if (const std::optional<double> loss = learn_step(state)) {
        loss_sum += *loss;
        loss_count += 1;
      }
      if (state.env_steps % cfg.sync_interval == 0) sync_target(state);

      done = result.done;
      if (done) score_diff = result.info.score[0] - result.info.score[1];
    }

    state.episodes += 1;
    state.epsilon = epsilon_for_step(cfg, state.env_steps);

    MetricsRow row;
    row.step = state.env_steps;
    row.episode = state.episodes;
    row.epsilon = state.epsilon;
    if (loss_count > 0) row.loss = loss_sum / static_cast<double>(loss_count);
    row.episode_return = episode_return;
    row.score_diff = score_diff;
    emit(row);

    // eval cadence, judged on step-counter boundaries so a resumed run makes
    // the same decisions
    if (cfg.eval_interval > 0 &&
        steps_before / cfg.eval_interval !=
            state.env_steps / cfg.eval_interval) {
      const EvalResult ev =
          evaluate(env, state.local, cfg.eval_episodes,
                   Rng::derive(cfg.seed, kEvalStreamBase + state.env_steps),
                   cfg.edges);
      MetricsRow eval_row;
      eval_row.step = state.env_steps;
      eval_row.episode = state.episodes;
      eval_row.epsilon = state.epsilon;
      eval_row.score_diff = ev.mean_score_diff;
      eval_row.eval_return = ev.mean_return;
      emit(eval_row);
    }

    if (hooks.on_episode_end) hooks.on_episode_end(state);
  }
  return rows;
}

EvalResult evaluate_policy(Environment& env,
                           const std::function<int(const Graph&)>& policy,
                           std::uint64_t episodes, std::uint64_t seed,
                           const EdgeRule& edges) {
  if (episodes < 1) throw ConfigError("evaluate: episodes must be >= 1");
  EvalResult out;
  for (std::uint64_t i = 0; i < episodes; ++i) {
    Observation obs = env.reset(Rng::derive(seed, i));
    bool done = false;
    double ret = 0.0;
    int diff = 0;
    while (!done) {
      const Graph graph = obs_to_graph(obs, edges);
      const StepResult result = env.step(policy(graph));
      ret += result.reward;
      obs = result.obs;
      done = result.done;
      if (done) diff = result.info.score[0] - result.info.score[1];
    }
    out.mean_return += ret;
    out.mean_score_diff += diff;
  }
  out.mean_return /= static_cast<double>(episodes);
  out.mean_score_diff /= static_cast<double>(episodes);
  return out;
}

EvalResult evaluate(Environment& env, QNetwork& net, std::uint64_t episodes,
                    std::uint64_t seed, const EdgeRule& edges) {
  Rng unused(0);
  return evaluate_policy(
      env,
      [&](const Graph& g) {
        return select_action(net.q_forward(g), 0.0, unused);
      },
      episodes, seed, edges);
}

EvalResult evaluate_random(Environment& env, std::uint64_t episodes,
                           std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 0x7a2d));
  return evaluate_policy(
      env,
      [&rng](const Graph&) {
        return static_cast<int>(rng.uniform_int(kNumActions));
      },
      episodes, seed);
}

}  // namespace gqn
