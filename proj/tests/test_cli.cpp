#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gqn/checkpoint.hpp"
#include "gqn/cli.hpp"
#include "gqn/dump_io.hpp"
#include "gqn/pitch.hpp"
#include "gqn/rng.hpp"
#include "gqn/text.hpp"
#include "gqn/trainer.hpp"

using namespace gqn;

namespace {

namespace fs = std::filesystem;

// Fresh directory per test so reruns never see stale artifacts.
struct TempDir {
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("gqn_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path path;
};

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  CliResult r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// config.resolved / config-file lines as a key -> value map
std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t sep = line.find(' ');
    REQUIRE(sep != std::string::npos);
    kv[line.substr(0, sep)] = line.substr(sep + 1);
  }
  return kv;
}

}  // namespace

TEST_CASE("train with zero steps exits clean and leaves header-only metrics") {
  TempDir dir("steps0");
  const CliResult r = run_cli({"train", "--scenario", "empty_goal_1v0",
                               "--net", "gcn", "--steps", "0", "--out",
                               dir.path.string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(slurp(dir.path / "metrics.csv") == metrics_header() + "\n");
  CHECK(fs::exists(dir.path / "final.gqn"));

  const auto kv = parse_kv(slurp(dir.path / "config.resolved"));
  CHECK(kv.at("scenario") == "empty_goal_1v0");
  CHECK(kv.at("net") == "gcn");
  CHECK(kv.at("total_steps") == "0");

  // the final checkpoint of a zero-step run is a freshly seeded state
  const TrainerState state = load_checkpoint((dir.path / "final.gqn").string());
  CHECK(state.env_steps == 0);
  CHECK(state.episodes == 0);
}

TEST_CASE("train is byte-deterministic for a fixed seed and config") {
  TempDir a("det_a");
  TempDir b("det_b");
  const std::vector<std::string> common = {
      "train", "--scenario", "empty_goal_1v0", "--net",  "gcn",
      "--steps", "900",      "--seed",         "7"};
  auto with_out = [&](const TempDir& d) {
    std::vector<std::string> args = common;
    args.push_back("--out");
    args.push_back(d.path.string());
    return args;
  };
  const CliResult ra = run_cli(with_out(a));
  const CliResult rb = run_cli(with_out(b));
  REQUIRE(ra.code == cli::kExitOk);
  REQUIRE(rb.code == cli::kExitOk);
  CHECK(slurp(a.path / "metrics.csv") == slurp(b.path / "metrics.csv"));
  CHECK(slurp(a.path / "final.gqn") == slurp(b.path / "final.gqn"));
  CHECK(ra.out == rb.out);
}

TEST_CASE("train without a scenario exits 2 and names the field") {
  const CliResult r = run_cli({"train", "--net", "gcn", "--steps", "0"});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("scenario") != std::string::npos);
}

TEST_CASE("config file merges under command-line overrides") {
  TempDir dir("precedence");
  const fs::path cfg = dir.path / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "# comment line\n";
    out << "\n";
    out << "scenario easy\n";
    out << "net gat\n";
    out << "gamma 0.9\n";
    out << "total_steps 400\n";
  }
  const fs::path out_dir = dir.path / "run";
  const CliResult r = run_cli({"train", "--config", cfg.string(),
                               "--scenario", "empty_goal_1v0", "--steps", "0",
                               "--out", out_dir.string()});
  REQUIRE(r.code == cli::kExitOk);

  const auto kv = parse_kv(slurp(out_dir / "config.resolved"));
  CHECK(kv.at("scenario") == "empty_goal_1v0");  // flag beats file
  CHECK(kv.at("total_steps") == "0");            // flag beats file
  CHECK(kv.at("net") == "gat");                  // file beats default
  CHECK(kv.at("gamma") == "0.9");                // file beats default
  CHECK(kv.at("lr") == "1e-04");                 // untouched default
}

TEST_CASE("resolved config is itself a loadable config file") {
  TempDir dir("echo");
  const fs::path first = dir.path / "first";
  REQUIRE(run_cli({"train", "--scenario", "empty_goal_1v0", "--net", "gat",
                   "--steps", "0", "--seed", "21", "--out", first.string()})
              .code == cli::kExitOk);

  const fs::path second = dir.path / "second";
  const CliResult r =
      run_cli({"train", "--config", (first / "config.resolved").string(),
               "--out", second.string()});
  REQUIRE(r.code == cli::kExitOk);

  auto kv_first = parse_kv(slurp(first / "config.resolved"));
  auto kv_second = parse_kv(slurp(second / "config.resolved"));
  kv_first.erase("out");
  kv_second.erase("out");
  CHECK(kv_first == kv_second);
}

TEST_CASE("unknown config keys and bad values exit 2 with the location") {
  TempDir dir("badcfg");
  const fs::path cfg = dir.path / "bad.cfg";

  SUBCASE("unknown key") {
    std::ofstream(cfg) << "warp 9\n";
    const CliResult r = run_cli({"train", "--config", cfg.string()});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("warp") != std::string::npos);
    CHECK(r.err.find(":1") != std::string::npos);
  }
  SUBCASE("unparsable value") {
    std::ofstream(cfg) << "scenario easy\ngamma banana\n";
    const CliResult r = run_cli({"train", "--config", cfg.string()});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("gamma") != std::string::npos);
    CHECK(r.err.find(":2") != std::string::npos);
  }
  SUBCASE("missing file") {
    const CliResult r =
        run_cli({"train", "--config", (dir.path / "nope.cfg").string()});
    CHECK(r.code == cli::kExitConfig);
  }
}

TEST_CASE("periodic checkpoints appear at the configured cadence") {
  TempDir dir("cadence");
  const CliResult r = run_cli({"train", "--scenario", "empty_goal_1v0",
                               "--net", "gcn", "--steps", "900", "--seed",
                               "3", "--out", dir.path.string(),
                               "--checkpoint", "400"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(fs::exists(dir.path / "final.gqn"));

  // episodes end at irregular ticks, so snapshot names carry the actual
  // step count; each 400-step bucket crossed must have produced one
  std::vector<std::uint64_t> snapshot_steps;
  for (const auto& entry : fs::directory_iterator(dir.path)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("ckpt_", 0) != 0) continue;
    const std::string digits = name.substr(5, name.size() - 5 - 4);
    snapshot_steps.push_back(parse_u64(digits, "snapshot step"));
  }
  REQUIRE(snapshot_steps.size() >= 2);
  for (const std::uint64_t step : snapshot_steps) {
    const TrainerState snap = load_checkpoint(
        (dir.path / ("ckpt_" + std::to_string(step) + ".gqn")).string());
    CHECK(snap.env_steps == step);
  }

  const TrainerState last = load_checkpoint((dir.path / "final.gqn").string());
  CHECK(last.env_steps >= 900);
}

TEST_CASE("eval prints the machine line and is reproducible") {
  TempDir dir("eval");
  REQUIRE(run_cli({"train", "--scenario", "empty_goal_1v0", "--net", "gcn",
                   "--steps", "0", "--seed", "5", "--out",
                   dir.path.string()})
              .code == cli::kExitOk);
  const std::string ckpt = (dir.path / "final.gqn").string();

  const std::vector<std::string> args = {"eval",       "--checkpoint", ckpt,
                                         "--scenario", "empty_goal_1v0",
                                         "--episodes", "2",
                                         "--seed",     "5"};
  const CliResult first = run_cli(args);
  const CliResult again = run_cli(args);
  CHECK(first.code == cli::kExitOk);
  CHECK(first.out == again.out);
  CHECK(first.out.find("eval,score_diff=") != std::string::npos);
}

TEST_CASE("eval with one episode equals a single evaluate rollout") {
  TempDir dir("eval1");
  REQUIRE(run_cli({"train", "--scenario", "empty_goal_1v0", "--net", "gat",
                   "--steps", "0", "--seed", "9", "--out",
                   dir.path.string()})
              .code == cli::kExitOk);
  const std::string ckpt = (dir.path / "final.gqn").string();

  TrainerState state = load_checkpoint(ckpt);
  PitchEnv env("empty_goal_1v0");
  const EvalResult expect =
      evaluate(env, state.local, 1, 13, state.cfg.edges);

  const CliResult r = run_cli({"eval", "--checkpoint", ckpt, "--scenario",
                               "empty_goal_1v0", "--episodes", "1", "--seed",
                               "13"});
  REQUIRE(r.code == cli::kExitOk);
  const std::string want = "eval,score_diff=" +
                           format_double(expect.mean_score_diff) +
                           ",return=" + format_double(expect.mean_return);
  CHECK(r.out.find(want) != std::string::npos);
}

TEST_CASE("eval error paths use the documented exit codes") {
  TempDir dir("evalerr");

  SUBCASE("corrupt checkpoint exits 3") {
    const fs::path bad = dir.path / "bad.gqn";
    std::ofstream(bad) << "not a checkpoint\n";
    const CliResult r = run_cli({"eval", "--checkpoint", bad.string(),
                                 "--scenario", "easy"});
    CHECK(r.code == cli::kExitCheckpoint);
    CHECK(r.err.find("checkpoint") != std::string::npos);
  }
  SUBCASE("missing scenario exits 2") {
    const fs::path bad = dir.path / "absent.gqn";
    const CliResult r = run_cli({"eval", "--checkpoint", bad.string()});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("scenario") != std::string::npos);
  }
  SUBCASE("unknown scenario exits 2") {
    const fs::path bad = dir.path / "absent.gqn";
    const CliResult r = run_cli({"eval", "--checkpoint", bad.string(),
                                 "--scenario", "stadium"});
    CHECK(r.code == cli::kExitConfig);
  }
}

TEST_CASE("gradcheck passes for both kinds and fails when perturbed") {
  const CliResult gcn = run_cli({"gradcheck", "--net", "gcn", "--seed", "2"});
  CHECK(gcn.code == cli::kExitOk);
  CHECK(gcn.out.find("param layer1.W ") != std::string::npos);
  CHECK(gcn.out.find("passed=1") != std::string::npos);

  const CliResult gat = run_cli({"gradcheck", "--net", "gat", "--seed", "2"});
  CHECK(gat.code == cli::kExitOk);
  CHECK(gat.out.find("param layer1.a_src ") != std::string::npos);
  CHECK(gat.out.find("passed=1") != std::string::npos);

  const CliResult bad =
      run_cli({"gradcheck", "--net", "gcn", "--seed", "2", "--perturb"});
  CHECK(bad.code == cli::kExitCheckFailure);
  CHECK(bad.err.find("gradient check failed") != std::string::npos);
}

TEST_CASE("replay agrees with the greedy policy that recorded the dump") {
  TempDir dir("replay");
  REQUIRE(run_cli({"train", "--scenario", "empty_goal_1v0", "--net", "gcn",
                   "--steps", "0", "--seed", "31", "--out",
                   dir.path.string()})
              .code == cli::kExitOk);
  const std::string ckpt = (dir.path / "final.gqn").string();

  TrainerState state = load_checkpoint(ckpt);
  PitchEnv env("empty_goal_1v0");
  Rng greedy_rng(0);
  const auto records = record_episode(
      env,
      [&](const Graph& g) {
        return select_action(state.local.q_forward(g), 0.0, greedy_rng);
      },
      77, state.cfg.edges);
  REQUIRE_FALSE(records.empty());

  const fs::path dump = dir.path / "greedy.dump";
  {
    std::ofstream out(dump);
    for (const DumpRecord& rec : records) out << serialize_record(rec) << '\n';
  }

  const CliResult r = run_cli({"replay", dump.string(), "--checkpoint", ckpt});
  CHECK(r.code == cli::kExitOk);
  const std::string want = "replay,matched=" + std::to_string(records.size()) +
                           ",total=" + std::to_string(records.size()) +
                           ",agreement=1";
  CHECK(r.out.find(want) != std::string::npos);
  CHECK(r.out.find(" differ") == std::string::npos);
}

TEST_CASE("replay reports empty dumps and cites malformed lines") {
  TempDir dir("replaybad");
  REQUIRE(run_cli({"train", "--scenario", "empty_goal_1v0", "--net", "gcn",
                   "--steps", "0", "--seed", "1", "--out",
                   dir.path.string()})
              .code == cli::kExitOk);
  const std::string ckpt = (dir.path / "final.gqn").string();

  SUBCASE("empty dump exits 0 with zero totals") {
    const fs::path dump = dir.path / "empty.dump";
    std::ofstream(dump) << "";
    const CliResult r =
        run_cli({"replay", dump.string(), "--checkpoint", ckpt});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("replay,matched=0,total=0,agreement=1") !=
          std::string::npos);
  }
  SUBCASE("malformed third line exits 4 citing line 3") {
    PitchEnv env("empty_goal_1v0");
    Rng rng(4);
    const auto records = record_episode(
        env,
        [&](const Graph&) { return static_cast<int>(rng.uniform_int(19)); },
        12);
    REQUIRE(records.size() >= 2);
    const fs::path dump = dir.path / "bad.dump";
    {
      std::ofstream out(dump);
      out << serialize_record(records[0]) << '\n';
      out << serialize_record(records[1]) << '\n';
      out << "{\"not\": \"a record\"}\n";
    }
    const CliResult r =
        run_cli({"replay", dump.string(), "--checkpoint", ckpt});
    CHECK(r.code == cli::kExitData);
    CHECK(r.err.find("line 3") != std::string::npos);
  }
  SUBCASE("unreadable dump exits 4") {
    const CliResult r = run_cli(
        {"replay", (dir.path / "nope.dump").string(), "--checkpoint", ckpt});
    CHECK(r.code == cli::kExitData);
  }
}

TEST_CASE("argument errors surface as exit 2 and help exits 0") {
  CHECK(run_cli({"fly"}).code == cli::kExitConfig);
  CHECK(run_cli({}).code == cli::kExitConfig);
  CHECK(run_cli({"train", "--net", "rnn"}).code == cli::kExitConfig);
  CHECK(run_cli({"eval"}).code == cli::kExitConfig);  // --checkpoint required
  CHECK(run_cli({"--help"}).code == cli::kExitOk);
}
