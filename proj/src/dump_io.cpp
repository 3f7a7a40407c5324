#include "gqn/dump_io.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "gqn/errors.hpp"

namespace gqn {

namespace {

using json = nlohmann::ordered_json;

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json team_positions(const std::vector<PlayerObs>& team) {
  json out = json::array();
  for (const auto& p : team) out.push_back(json::array({p.pos.x, p.pos.y}));
  return out;
}

json team_directions(const std::vector<PlayerObs>& team) {
  json out = json::array();
  for (const auto& p : team) out.push_back(json::array({p.dir.x, p.dir.y}));
  return out;
}

json team_tired(const std::vector<PlayerObs>& team) {
  json out = json::array();
  for (const auto& p : team) out.push_back(p.tired);
  return out;
}

const json& need(const json& j, const char* key, std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError("line " + std::to_string(line) + ": missing field '" +
                         key + "'",
                     line);
  }
  return *it;
}

double need_number(const json& j, const std::string& what, std::size_t line) {
  if (!j.is_number()) {
    throw ParseError(
        "line " + std::to_string(line) + ": " + what + " must be a number",
        line);
  }
  return j.get<double>();
}

Vec3 parse_vec3(const json& j, const std::string& what, std::size_t line) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError("line " + std::to_string(line) + ": " + what +
                         " must be an array of 3 numbers",
                     line);
  }
  return Vec3{need_number(j[0], what, line), need_number(j[1], what, line),
              need_number(j[2], what, line)};
}

std::vector<PlayerObs> parse_team(const json& positions, const json& dirs,
                                  const json& tired, const std::string& name,
                                  std::size_t line) {
  if (!positions.is_array() || !dirs.is_array() || !tired.is_array() ||
      positions.size() != dirs.size() || positions.size() != tired.size()) {
    throw ParseError("line " + std::to_string(line) + ": " + name +
                         " arrays must agree in length",
                     line);
  }
  std::vector<PlayerObs> team(positions.size());
  for (std::size_t i = 0; i < team.size(); ++i) {
    const std::string who = name + "[" + std::to_string(i) + "]";
    if (!positions[i].is_array() || positions[i].size() != 2 ||
        !dirs[i].is_array() || dirs[i].size() != 2) {
      throw ParseError("line " + std::to_string(line) + ": " + who +
                           " entries must be [x, y] pairs",
                       line);
    }
    team[i].pos = Vec2{need_number(positions[i][0], who, line),
                       need_number(positions[i][1], who, line)};
    team[i].dir = Vec2{need_number(dirs[i][0], who, line),
                       need_number(dirs[i][1], who, line)};
    team[i].tired = need_number(tired[i], who + ".tired", line);
  }
  return team;
}

DumpRecord parse_record(const std::string& text, std::size_t line) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("line " + std::to_string(line) + ": " + e.what(), line);
  }
  if (!j.is_object()) {
    throw ParseError("line " + std::to_string(line) + ": record must be a JSON object",
                     line);
  }

  DumpRecord rec;
  rec.obs.ball_pos = parse_vec3(need(j, "ball", line), "ball", line);
  rec.obs.ball_dir =
      parse_vec3(need(j, "ball_direction", line), "ball_direction", line);
  rec.obs.left_team = parse_team(
      need(j, "left_team", line), need(j, "left_team_direction", line),
      need(j, "left_team_tired_factor", line), "left_team", line);
  rec.obs.right_team = parse_team(
      need(j, "right_team", line), need(j, "right_team_direction", line),
      need(j, "right_team_tired_factor", line), "right_team", line);

  const json& active = need(j, "active", line);
  if (!active.is_number_integer()) {
    throw ParseError("line " + std::to_string(line) + ": active must be an integer",
                     line);
  }
  rec.obs.active = active.get<int>();

  const json& score = need(j, "score", line);
  if (!score.is_array() || score.size() != 2 ||
      !score[0].is_number_integer() || !score[1].is_number_integer()) {
    throw ParseError("line " + std::to_string(line) + ": score must be [left, right] integers",
                     line);
  }
  rec.obs.score = {score[0].get<int>(), score[1].get<int>()};

  const json& steps = need(j, "steps_left", line);
  if (!steps.is_number_integer()) {
    throw ParseError("line " + std::to_string(line) + ": steps_left must be an integer",
                     line);
  }
  rec.obs.steps_left = steps.get<int>();

  const json& mode = need(j, "game_mode", line);
  if (!mode.is_number_integer()) {
    throw ParseError("line " + std::to_string(line) + ": game_mode must be an integer",
                     line);
  }
  rec.obs.game_mode = static_cast<GameMode>(mode.get<int>());

  const json& action = need(j, "action", line);
  if (!action.is_number_integer()) {
    throw ParseError("line " + std::to_string(line) + ": action must be an integer",
                     line);
  }
  rec.action = action.get<int>();
  rec.reward = need_number(need(j, "reward", line), "reward", line);

  const json& done = need(j, "done", line);
  if (!done.is_boolean()) {
    throw ParseError("line " + std::to_string(line) + ": done must be a boolean",
                     line);
  }
  rec.done = done.get<bool>();

  std::vector<std::string> violations = validate_obs(rec.obs);
  if (rec.action < 0 || rec.action > 18) {
    violations.push_back("action: " + std::to_string(rec.action) +
                         " outside [0, 18]");
  }
  if (!std::isfinite(rec.reward)) violations.push_back("reward: not finite");
  if (!violations.empty()) {
    std::string msg = "line " + std::to_string(line) + ": " + violations[0];
    for (std::size_t i = 1; i < violations.size(); ++i) {
      msg += "; " + violations[i];
    }
    throw ValidationError(msg);
  }
  return rec;
}

}  // namespace

std::string serialize_record(const DumpRecord& record) {
  json j;
  j["ball"] = vec3_to_json(record.obs.ball_pos);
  j["ball_direction"] = vec3_to_json(record.obs.ball_dir);
  j["left_team"] = team_positions(record.obs.left_team);
  j["left_team_direction"] = team_directions(record.obs.left_team);
  j["left_team_tired_factor"] = team_tired(record.obs.left_team);
  j["right_team"] = team_positions(record.obs.right_team);
  j["right_team_direction"] = team_directions(record.obs.right_team);
  j["right_team_tired_factor"] = team_tired(record.obs.right_team);
  j["active"] = record.obs.active;
  j["score"] = json::array({record.obs.score[0], record.obs.score[1]});
  j["steps_left"] = record.obs.steps_left;
  j["game_mode"] = static_cast<int>(record.obs.game_mode);
  j["action"] = record.action;
  j["reward"] = record.reward;
  j["done"] = record.done;
  return j.dump();
}

std::optional<DumpRecord> DumpReader::next() {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    return parse_record(text, line_);
  }
  return std::nullopt;
}

std::vector<DumpRecord> read_dump_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dump file '" + path + "'");
  DumpReader reader(in);
  std::vector<DumpRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  return out;
}

}  // namespace gqn
