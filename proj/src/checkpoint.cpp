#include "gqn/checkpoint.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gqn/errors.hpp"
#include "gqn/text.hpp"

namespace gqn {

namespace {

constexpr const char* kMagic = "GQN-CKPT 1";

// %.17g round-trips every double exactly; used for parameters and moments
// where drift across a save/load cycle would desynchronize resumed runs.
std::string full_precision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix(std::ostream& out, const char* section,
                  const std::string& name, const Matrix& m) {
  out << section << ' ' << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ' ';
      out << full_precision(m.at(r, c));
    }
    out << '\n';
  }
}

void write_features(std::ostream& out, char tag, const Matrix& f) {
  out << tag;
  for (std::size_t r = 0; r < f.rows(); ++r) {
    for (std::size_t c = 0; c < f.cols(); ++c) {
      out << ' ' << format_double(f.at(r, c));
    }
  }
  out << '\n';
}

// Sequential line reader. Every read names what it expected, so truncation
// and mismatches produce errors that point at the failing section.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string expect_line(const std::string& what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    throw CheckpointError(CheckpointError::Kind::Truncated,
                          "checkpoint: file ends before " + what);
  }

  // True when only whitespace-only lines remain.
  bool at_trailing_whitespace() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return false;
    }
    return true;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(std::move(tok));
  return out;
}

[[noreturn]] void shape_fail(const std::string& msg) {
  throw CheckpointError(CheckpointError::Kind::Shape, "checkpoint: " + msg);
}

double read_double_token(const std::string& tok, const std::string& what) {
  try {
    return parse_double(tok, what);
  } catch (const ParseError& e) {
    shape_fail(e.what());
  }
}

std::uint64_t read_u64_token(const std::string& tok, const std::string& what) {
  try {
    return parse_u64(tok, what);
  } catch (const ParseError& e) {
    shape_fail(e.what());
  }
}

// Reads "<section> <name> <rows> <cols>" plus the value rows into `dst`,
// which already has the shape the config implies.
void read_matrix(LineReader& reader, const std::string& section,
                 const std::string& name, Matrix& dst) {
  const std::string where = section + " " + name;
  const auto head = split_tokens(reader.expect_line(where));
  if (head.size() != 4 || head[0] != section || head[1] != name) {
    shape_fail("expected '" + where + "' near line " +
               std::to_string(reader.line_no()));
  }
  const std::uint64_t rows = read_u64_token(head[2], where + " rows");
  const std::uint64_t cols = read_u64_token(head[3], where + " cols");
  if (rows != dst.rows() || cols != dst.cols()) {
    shape_fail(where + " is " + std::to_string(rows) + "x" +
               std::to_string(cols) + ", expected " +
               std::to_string(dst.rows()) + "x" + std::to_string(dst.cols()));
  }
  for (std::size_t r = 0; r < dst.rows(); ++r) {
    const auto vals = split_tokens(reader.expect_line(where + " row"));
    if (vals.size() != dst.cols()) {
      shape_fail(where + " row " + std::to_string(r) + " holds " +
                 std::to_string(vals.size()) + " values, expected " +
                 std::to_string(dst.cols()));
    }
    for (std::size_t c = 0; c < dst.cols(); ++c) {
      dst.at(r, c) = read_double_token(vals[c], where + " value");
    }
  }
}

// Single-token section like "adam_t 5" or "rng 123".
std::string read_scalar_line(LineReader& reader, const std::string& keyword) {
  const auto toks = split_tokens(reader.expect_line(keyword));
  if (toks.size() != 2 || toks[0] != keyword) {
    shape_fail("expected '" + keyword + " <value>' near line " +
               std::to_string(reader.line_no()));
  }
  return toks[1];
}

Matrix read_feature_line(LineReader& reader, char tag) {
  const std::string what = std::string("transition '") + tag + "' line";
  const auto toks = split_tokens(reader.expect_line(what));
  const std::size_t want = kGraphNodes * kNodeFeatures;
  if (toks.empty() || toks[0] != std::string(1, tag)) {
    shape_fail("expected " + what + " near line " +
               std::to_string(reader.line_no()));
  }
  if (toks.size() != want + 1) {
    shape_fail(what + " holds " + std::to_string(toks.size() - 1) +
               " values, expected " + std::to_string(want));
  }
  Matrix f(kGraphNodes, kNodeFeatures);
  for (std::size_t i = 0; i < want; ++i) {
    f[i] = read_double_token(toks[i + 1], what);
  }
  return f;
}

}  // namespace

void save_checkpoint(const TrainerState& state, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw CheckpointError(CheckpointError::Kind::Io,
                          "checkpoint: cannot open '" + path + "' for writing");
  }
  out << kMagic << '\n';
  for (const auto& [key, value] : config_to_kv(state.cfg)) {
    out << "config " << key << ' ' << value << '\n';
  }
  state.local.visit_params([&](const std::string& name, const Matrix& m) {
    write_matrix(out, "local", name, m);
  });
  state.target.visit_params([&](const std::string& name, const Matrix& m) {
    write_matrix(out, "target", name, m);
  });
  out << "adam_t " << state.opt.t << '\n';
  std::size_t idx = 0;
  state.local.visit_params([&](const std::string& name, const Matrix&) {
    write_matrix(out, "adam_m", name, state.opt.m[idx]);
    write_matrix(out, "adam_v", name, state.opt.v[idx]);
    ++idx;
  });
  out << "env_steps " << state.env_steps << '\n';
  out << "episodes " << state.episodes << '\n';
  out << "epsilon " << full_precision(state.epsilon) << '\n';
  out << "rng " << state.rng.state() << '\n';
  out << "buffer " << state.buffer.size() << ' ' << state.buffer.pushed_total()
      << '\n';
  for (std::size_t i = 0; i < state.buffer.size(); ++i) {
    const Transition& t = state.buffer.at(i);
    out << "t " << t.action << ' ' << format_double(t.reward) << ' '
        << (t.done ? 1 : 0) << '\n';
    write_features(out, 's', t.state.features);
    write_features(out, 'n', t.next_state.features);
  }
  out << "end\n";
  out.flush();
  if (!out) {
    throw CheckpointError(CheckpointError::Kind::Io,
                          "checkpoint: write to '" + path + "' failed");
  }
}

TrainerState load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw CheckpointError(CheckpointError::Kind::Io,
                          "checkpoint: cannot open '" + path + "'");
  }
  LineReader reader(in);

  const std::string magic = reader.expect_line("magic line");
  if (magic != kMagic) {
    throw CheckpointError(CheckpointError::Kind::Version,
                          "checkpoint: bad magic line '" + magic + "'");
  }

  // Config lines come first; the first non-config line starts the parameter
  // sections and is pushed back by remembering it.
  TrainerConfig cfg;
  std::string pending = reader.expect_line("config section");
  while (pending.rfind("config ", 0) == 0) {
    const auto toks = split_tokens(pending);
    if (toks.size() != 3) {
      shape_fail("malformed config line near line " +
                 std::to_string(reader.line_no()));
    }
    try {
      if (!apply_config_kv(cfg, toks[1], toks[2])) {
        throw CheckpointError(CheckpointError::Kind::Version,
                              "checkpoint: unknown config key '" + toks[1] +
                                  "'");
      }
    } catch (const ConfigError& e) {
      shape_fail(e.what());
    }
    pending = reader.expect_line("parameter section");
  }

  TrainerState state = [&] {
    try {
      return make_trainer_state(cfg);
    } catch (const ConfigError& e) {
      shape_fail(std::string("invalid config: ") + e.what());
    }
  }();

  // The remaining sections are strictly ordered, so re-feed the pending
  // line through a reader that sees it first.
  std::ostringstream rest;
  rest << pending << '\n' << in.rdbuf();
  std::istringstream rest_in(rest.str());
  LineReader body(rest_in);

  const ParamSet local_params = state.local.params();
  for (const ParamEntry& entry : local_params) {
    read_matrix(body, "local", entry.name, *entry.value);
  }
  const ParamSet target_params = state.target.params();
  for (const ParamEntry& entry : target_params) {
    read_matrix(body, "target", entry.name, *entry.value);
  }

  const std::string t_tok = read_scalar_line(body, "adam_t");
  state.opt.t = static_cast<long>(read_u64_token(t_tok, "adam_t"));
  for (std::size_t i = 0; i < local_params.size(); ++i) {
    read_matrix(body, "adam_m", local_params[i].name, state.opt.m[i]);
    read_matrix(body, "adam_v", local_params[i].name, state.opt.v[i]);
  }

  state.env_steps = read_u64_token(read_scalar_line(body, "env_steps"),
                                   "env_steps");
  state.episodes = read_u64_token(read_scalar_line(body, "episodes"),
                                  "episodes");
  state.epsilon = read_double_token(read_scalar_line(body, "epsilon"),
                                    "epsilon");
  state.rng.set_state(read_u64_token(read_scalar_line(body, "rng"), "rng"));

  const auto buf_head = split_tokens(body.expect_line("buffer header"));
  if (buf_head.size() != 3 || buf_head[0] != "buffer") {
    shape_fail("expected 'buffer <size> <pushed_total>' near line " +
               std::to_string(body.line_no()));
  }
  const std::uint64_t buf_size = read_u64_token(buf_head[1], "buffer size");
  const std::uint64_t buf_pushed =
      read_u64_token(buf_head[2], "buffer pushed_total");
  if (buf_size > cfg.buffer_capacity) {
    shape_fail("buffer holds " + std::to_string(buf_size) +
               " transitions, capacity is " +
               std::to_string(cfg.buffer_capacity));
  }
  if (buf_pushed < buf_size) {
    shape_fail("buffer pushed_total " + std::to_string(buf_pushed) +
               " below stored size " + std::to_string(buf_size));
  }

  std::vector<Transition> items;
  items.reserve(buf_size);
  for (std::uint64_t i = 0; i < buf_size; ++i) {
    const auto head = split_tokens(body.expect_line("transition header"));
    if (head.size() != 4 || head[0] != "t") {
      shape_fail("expected 't <action> <reward> <done>' near line " +
                 std::to_string(body.line_no()));
    }
    const std::uint64_t action = read_u64_token(head[1], "transition action");
    if (action >= kNumActions) {
      shape_fail("transition action " + std::to_string(action) +
                 " outside [0, " + std::to_string(kNumActions - 1) + "]");
    }
    const double reward = read_double_token(head[2], "transition reward");
    if (!std::isfinite(reward)) {
      shape_fail("transition reward is not finite");
    }
    bool done = false;
    if (head[3] == "1") {
      done = true;
    } else if (head[3] != "0") {
      shape_fail("transition done flag '" + head[3] + "' is not 0 or 1");
    }
    Matrix sf = read_feature_line(body, 's');
    Matrix nf = read_feature_line(body, 'n');
    try {
      Matrix s_adj = adjacency_from_features(sf, cfg.edges);
      Matrix n_adj = adjacency_from_features(nf, cfg.edges);
      Graph s(std::move(sf), std::move(s_adj));
      Graph n(std::move(nf), std::move(n_adj));
      items.push_back(Transition{std::move(s), static_cast<int>(action),
                                 reward, std::move(n), done});
    } catch (const ValidationError& e) {
      shape_fail(std::string("transition graph rejected: ") + e.what());
    }
  }
  try {
    state.buffer =
        ReplayBuffer::restore(cfg.buffer_capacity, std::move(items),
                              buf_pushed);
  } catch (const DataError& e) {
    shape_fail(e.what());
  }

  const std::string tail = body.expect_line("end marker");
  if (tail != "end") {
    shape_fail("expected 'end', found '" + tail + "'");
  }
  if (!body.at_trailing_whitespace()) {
    shape_fail("content after the end marker");
  }
  return state;
}

}  // namespace gqn
