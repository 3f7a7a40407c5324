#include "gqn/obs_graph.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gqn/errors.hpp"

namespace gqn {

EdgeRule EdgeRule::parse(const std::string& text) {
  if (text == "full") return EdgeRule{};
  if (text.rfind("knn:", 0) == 0) {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(text.substr(4), &used);
      if (used != text.size() - 4) k = 0;
    } catch (const std::exception&) {
      k = 0;
    }
    if (k < 1 || k > static_cast<int>(kGraphNodes) - 1) {
      throw ConfigError("edge rule '" + text + "': k must be in [1, " +
                        std::to_string(kGraphNodes - 1) + "]");
    }
    return EdgeRule{Kind::Knn, k};
  }
  throw ConfigError("unknown edge rule '" + text + "', expected full or knn:<k>");
}

std::string EdgeRule::to_string() const {
  if (kind == Kind::FullyConnected) return "full";
  return "knn:" + std::to_string(k);
}

namespace {

double clamp(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

void fill_player(Matrix& f, std::size_t node, const PlayerObs& p, bool left,
                 bool is_active) {
  f.at(node, kSlotPosX) = p.pos.x;
  f.at(node, kSlotPosY) = p.pos.y;
  f.at(node, kSlotDirX) = p.dir.x;
  f.at(node, kSlotDirY) = p.dir.y;
  f.at(node, kSlotIsLeft) = left ? 1.0 : 0.0;
  f.at(node, kSlotIsRight) = left ? 0.0 : 1.0;
  f.at(node, kSlotIsActive) = is_active ? 1.0 : 0.0;
  f.at(node, kSlotExtra) = p.tired;
}

// The 23 located nodes (players + ball) link to their k nearest peers.
Matrix knn_adjacency(const std::vector<Vec2>& pos, int k) {
  Matrix adj(kGraphNodes, kGraphNodes);
  for (std::size_t i = 0; i < kGraphNodes; ++i) adj.at(i, i) = 1.0;
  // the global node carries no position; keep it reachable from everywhere
  for (std::size_t i = 0; i < kGraphNodes; ++i) {
    adj.at(i, kGlobalNode) = 1.0;
    adj.at(kGlobalNode, i) = 1.0;
  }

  const std::size_t located = pos.size();
  for (std::size_t i = 0; i < located; ++i) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(located - 1);
    for (std::size_t j = 0; j < located; ++j) {
      if (j == i) continue;
      const double dx = pos[i].x - pos[j].x;
      const double dy = pos[i].y - pos[j].y;
      dist.emplace_back(dx * dx + dy * dy, j);
    }
    // ties resolve toward the lower node index so the graph is deterministic
    std::sort(dist.begin(), dist.end());
    const std::size_t take = std::min<std::size_t>(k, dist.size());
    for (std::size_t t = 0; t < take; ++t) {
      adj.at(i, dist[t].second) = 1.0;
      adj.at(dist[t].second, i) = 1.0;
    }
  }
  return adj;
}

}  // namespace

Graph obs_to_graph(const Observation& obs, const EdgeRule& rule) {
  const std::vector<std::string> violations = validate_obs(obs);
  if (!violations.empty()) {
    std::string msg = "invalid observation: " + violations[0];
    for (std::size_t i = 1; i < violations.size(); ++i) {
      msg += "; " + violations[i];
    }
    throw ValidationError(msg);
  }

  Matrix f(kGraphNodes, kNodeFeatures);
  for (std::size_t i = 0; i < 11; ++i) {
    fill_player(f, i, obs.left_team[i], true,
                static_cast<int>(i) == obs.active);
    fill_player(f, 11 + i, obs.right_team[i], false, false);
  }
  f.at(kBallNode, kSlotPosX) = obs.ball_pos.x;
  f.at(kBallNode, kSlotPosY) = obs.ball_pos.y;
  f.at(kBallNode, kSlotDirX) = obs.ball_dir.x;
  f.at(kBallNode, kSlotDirY) = obs.ball_dir.y;
  f.at(kBallNode, kSlotIsBall) = 1.0;
  f.at(kBallNode, kSlotExtra) = obs.ball_pos.z;

  f.at(kGlobalNode, 0) =
      clamp((obs.score[0] - obs.score[1]) / 5.0, -1.0, 1.0);
  f.at(kGlobalNode, 1) = obs.steps_left / 3000.0;
  f.at(kGlobalNode, 2) = static_cast<int>(obs.game_mode) / 6.0;

  Matrix adj = adjacency_from_features(f, rule);
  return Graph(std::move(f), std::move(adj));
}

Matrix adjacency_from_features(const Matrix& features, const EdgeRule& rule) {
  if (features.rows() != kGraphNodes || features.cols() != kNodeFeatures) {
    throw ShapeError("adjacency_from_features: expected a 24x9 feature matrix");
  }
  if (rule.kind == EdgeRule::Kind::FullyConnected) {
    return Matrix(kGraphNodes, kGraphNodes, 1.0);
  }
  std::vector<Vec2> pos(kBallNode + 1);
  for (std::size_t i = 0; i <= kBallNode; ++i) {
    pos[i] = Vec2{features.at(i, kSlotPosX), features.at(i, kSlotPosY)};
  }
  return knn_adjacency(pos, rule.k);
}

}  // namespace gqn
