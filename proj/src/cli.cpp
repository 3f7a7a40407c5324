#include "gqn/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "gqn/checkpoint.hpp"
#include "gqn/dump_io.hpp"
#include "gqn/errors.hpp"
#include "gqn/gradcheck.hpp"
#include "gqn/obs_graph.hpp"
#include "gqn/pitch.hpp"
#include "gqn/rng.hpp"
#include "gqn/text.hpp"
#include "gqn/trainer.hpp"

namespace gqn::cli {
namespace {

namespace fs = std::filesystem;

NetKind parse_net(const std::string& name) {
  if (name == "gcn") return NetKind::Gcn;
  if (name == "gat") return NetKind::Gat;
  throw ConfigError("net: expected gcn or gat, got '" + name + "'");
}

// Applies one config-file pair; trainer keys first, then the CLI-layer
// ones. False means nobody owns the key.
bool apply_run_kv(RunConfig& rc, const std::string& key,
                  const std::string& value) {
  if (apply_config_kv(rc.trainer, key, value)) return true;
  if (key == "scenario") {
    rc.scenario = value;
    return true;
  }
  if (key == "out") {
    rc.out_dir = value;
    return true;
  }
  if (key == "checkpoint_interval") {
    rc.checkpoint_interval = parse_u64(value, "checkpoint_interval");
    return true;
  }
  return false;
}

// Flat `key value` lines; blank lines and #-comments are skipped. Errors
// carry the file name and 1-based line number.
void load_config_file(RunConfig& rc, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const std::size_t key_end = line.find_first_of(" \t", start);
    if (key_end == std::string::npos) {
      throw ConfigError("config: missing value (" + path + ":" +
                        std::to_string(line_no) + ")");
    }
    const std::string key = line.substr(start, key_end - start);
    const std::size_t value_start = line.find_first_not_of(" \t", key_end);
    if (value_start == std::string::npos) {
      throw ConfigError("config: missing value for '" + key + "' (" + path +
                        ":" + std::to_string(line_no) + ")");
    }
    const std::string value = line.substr(value_start);
    try {
      if (!apply_run_kv(rc, key, value)) {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " (" + path + ":" +
                        std::to_string(line_no) + ")");
    } catch (const ParseError& e) {
      throw ConfigError(std::string(e.what()) + " (" + path + ":" +
                        std::to_string(line_no) + ")");
    }
  }
}

// The fully merged config, one `key value` per line, as archived next to
// the run's metrics.
std::string resolved_config_text(const RunConfig& rc) {
  std::string text;
  for (const auto& [key, value] : config_to_kv(rc.trainer)) {
    text += key + " " + value + "\n";
  }
  text += "scenario " + rc.scenario + "\n";
  text += "out " + rc.out_dir + "\n";
  text += "checkpoint_interval " + std::to_string(rc.checkpoint_interval) +
          "\n";
  return text;
}

int cmd_train(const RunConfig& rc, std::ostream& out) {
  if (rc.scenario.empty()) {
    throw ConfigError("scenario: required but not set");
  }
  validate_config(rc.trainer);
  PitchEnv env(rc.scenario);

  std::error_code ec;
  fs::create_directories(rc.out_dir, ec);
  if (ec) {
    throw ConfigError("out: cannot create directory '" + rc.out_dir +
                      "': " + ec.message());
  }
  const fs::path dir(rc.out_dir);

  {
    std::ofstream resolved(dir / "config.resolved");
    resolved << resolved_config_text(rc);
    if (!resolved) {
      throw ConfigError("out: cannot write " + (dir / "config.resolved").string());
    }
  }

  // append-only so an interrupted run keeps every completed row; the header
  // goes in only when the file starts empty
  const fs::path metrics_path = dir / "metrics.csv";
  const bool fresh = !fs::exists(metrics_path) ||
                     fs::file_size(metrics_path) == 0;
  std::ofstream metrics(metrics_path, std::ios::app);
  if (!metrics) {
    throw ConfigError("out: cannot write " + metrics_path.string());
  }
  if (fresh) metrics << metrics_header() << '\n';

  TrainerState state = make_trainer_state(rc.trainer);
  std::vector<double> returns;
  std::uint64_t last_snapshot_bucket = 0;

  TrainHooks hooks;
  hooks.on_row = [&](const MetricsRow& row) {
    metrics << format_metrics_row(row) << '\n';
    metrics.flush();
    if (row.episode_return) returns.push_back(*row.episode_return);
  };
  hooks.on_episode_end = [&](const TrainerState& s) {
    if (rc.checkpoint_interval == 0) return;
    const std::uint64_t bucket = s.env_steps / rc.checkpoint_interval;
    if (bucket > last_snapshot_bucket) {
      last_snapshot_bucket = bucket;
      save_checkpoint(s, (dir / ("ckpt_" + std::to_string(s.env_steps) +
                                 ".gqn"))
                             .string());
    }
  };

  train(env, state, hooks);
  if (!metrics) {
    throw ConfigError("out: failed writing " + metrics_path.string());
  }
  save_checkpoint(state, (dir / "final.gqn").string());

  // summary evaluation on a stream disjoint from the training loop's
  // reserved bases (those all sit at 2^32 and above)
  const EvalResult ev =
      evaluate(env, state.local, rc.trainer.eval_episodes,
               Rng::derive(rc.trainer.seed, state.env_steps),
               rc.trainer.edges);
  double mean_100 = 0.0;
  const std::size_t window = returns.size() < 100 ? returns.size() : 100;
  for (std::size_t i = returns.size() - window; i < returns.size(); ++i) {
    mean_100 += returns[i];
  }
  if (window > 0) mean_100 /= static_cast<double>(window);

  out << "trained " << state.episodes << " episodes / " << state.env_steps
      << " env steps on " << rc.scenario << "\n";
  out << "train,mean_return_100="
      << (returns.empty() ? std::string() : format_double(mean_100))
      << ",eval_score_diff=" << format_double(ev.mean_score_diff) << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& scenario,
             std::optional<std::uint64_t> episodes,
             std::optional<std::uint64_t> seed, std::ostream& out) {
  if (scenario.empty()) {
    throw ConfigError("scenario: required but not set");
  }
  PitchEnv env(scenario);
  TrainerState state = load_checkpoint(checkpoint_path);
  const std::uint64_t n = episodes.value_or(state.cfg.eval_episodes);
  const std::uint64_t s = seed.value_or(state.cfg.seed);
  const EvalResult ev = evaluate(env, state.local, n, s, state.cfg.edges);
  out << "evaluated " << n << " greedy episodes on " << scenario << " (seed "
      << s << ")\n";
  out << "eval,score_diff=" << format_double(ev.mean_score_diff)
      << ",return=" << format_double(ev.mean_return) << "\n";
  return kExitOk;
}

int cmd_gradcheck(const std::string& net_name, std::uint64_t seed,
                  bool perturb, std::ostream& out, std::ostream& err) {
  const GradCheckReport report =
      run_gradcheck(parse_net(net_name), seed, perturb);
  for (const GradCheckEntry& entry : report.entries) {
    out << "param " << entry.name << " max_rel_error "
        << format_double(entry.max_rel_error) << "\n";
  }
  out << "gradcheck,worst=" << format_double(report.worst)
      << ",param=" << report.worst_param
      << ",passed=" << (report.passed ? 1 : 0) << "\n";
  if (!report.passed) {
    err << "gradient check failed: " << report.worst_param
        << " relative error " << format_double(report.worst) << " exceeds "
        << format_double(kGradCheckTolerance) << "\n";
    return kExitCheckFailure;
  }
  return kExitOk;
}

int cmd_replay(const std::string& dump_path,
               const std::string& checkpoint_path, std::ostream& out) {
  TrainerState state = load_checkpoint(checkpoint_path);
  std::ifstream in(dump_path);
  if (!in) throw DataError("dump: cannot open '" + dump_path + "'");
  DumpReader reader(in);
  Rng greedy_rng(0);  // eps 0 draws nothing from it
  std::size_t total = 0;
  std::size_t matched = 0;
  while (std::optional<DumpRecord> rec = reader.next()) {
    const Graph g = obs_to_graph(rec->obs, state.cfg.edges);
    const int greedy = select_action(state.local.q_forward(g), 0.0,
                                     greedy_rng);
    const bool match = greedy == rec->action;
    out << "record " << total << " greedy " << greedy << " recorded "
        << rec->action << (match ? " match" : " differ") << "\n";
    ++total;
    if (match) ++matched;
  }
  // an empty dump agrees vacuously
  const double rate =
      total == 0 ? 1.0
                 : static_cast<double>(matched) / static_cast<double>(total);
  out << "replay,matched=" << matched << ",total=" << total
      << ",agreement=" << format_double(rate) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"graph q-network: train, evaluate and inspect agents"};
  app.name("gqn");
  app.require_subcommand(1);

  std::string config_path;
  std::string scenario;
  std::string net_name = "gcn";
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::uint64_t checkpoint_arg = 0;
  std::string checkpoint_path;
  std::uint64_t episodes = 0;
  std::string dump_path;

  CLI::App* train_cmd =
      app.add_subcommand("train", "run a training loop and write artifacts");
  CLI::Option* t_config =
      train_cmd->add_option("--config", config_path,
                            "flat key-value config file");
  CLI::Option* t_scenario =
      train_cmd->add_option("--scenario", scenario, "scenario preset name");
  CLI::Option* t_net = train_cmd->add_option("--net", net_name, "network kind")
                           ->check(CLI::IsMember({"gcn", "gat"}));
  CLI::Option* t_steps =
      train_cmd->add_option("--steps", steps, "total env steps to train");
  CLI::Option* t_seed = train_cmd->add_option("--seed", seed, "master seed");
  CLI::Option* t_out =
      train_cmd->add_option("--out", out_dir, "output directory");
  CLI::Option* t_ckpt = train_cmd->add_option(
      "--checkpoint", checkpoint_arg,
      "env steps between checkpoint snapshots (0 = final only)");

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "evaluate a checkpointed agent");
  eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint to load")
      ->required();
  eval_cmd->add_option("--scenario", scenario, "scenario preset name");
  CLI::Option* e_episodes =
      eval_cmd->add_option("--episodes", episodes, "evaluation episodes");
  CLI::Option* e_seed = eval_cmd->add_option("--seed", seed, "eval seed");

  CLI::App* grad_cmd = app.add_subcommand(
      "gradcheck", "finite-difference self-check of both backward passes");
  grad_cmd->add_option("--net", net_name, "network kind")
      ->check(CLI::IsMember({"gcn", "gat"}));
  grad_cmd->add_option("--seed", seed, "graph and weight seed");
  // hidden negative control: skews one analytic gradient so the check must
  // report a failure; exists to prove the failure path stays wired up
  bool perturb = false;
  grad_cmd->add_flag("--perturb", perturb)->group("");

  CLI::App* replay_cmd = app.add_subcommand(
      "replay", "compare a checkpoint's greedy policy against a dump");
  replay_cmd->add_option("dump", dump_path, "recorded episode dump")
      ->required();
  replay_cmd
      ->add_option("--checkpoint", checkpoint_path, "checkpoint to load")
      ->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (train_cmd->parsed()) {
      RunConfig rc;
      if (t_config->count() > 0) load_config_file(rc, config_path);
      if (t_scenario->count() > 0) rc.scenario = scenario;
      if (t_net->count() > 0) rc.trainer.network_kind = parse_net(net_name);
      if (t_steps->count() > 0) rc.trainer.total_steps = steps;
      if (t_seed->count() > 0) rc.trainer.seed = seed;
      if (t_out->count() > 0) rc.out_dir = out_dir;
      if (t_ckpt->count() > 0) rc.checkpoint_interval = checkpoint_arg;
      return cmd_train(rc, out);
    }
    if (eval_cmd->parsed()) {
      std::optional<std::uint64_t> ep;
      std::optional<std::uint64_t> sd;
      if (e_episodes->count() > 0) ep = episodes;
      if (e_seed->count() > 0) sd = seed;
      return cmd_eval(checkpoint_path, scenario, ep, sd, out);
    }
    if (grad_cmd->parsed()) {
      return cmd_gradcheck(net_name, seed, perturb, out, err);
    }
    return cmd_replay(dump_path, checkpoint_path, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CheckpointError& e) {
    err << "checkpoint error: " << e.what() << "\n";
    return kExitCheckpoint;
  } catch (const ParseError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ValidationError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace gqn::cli
