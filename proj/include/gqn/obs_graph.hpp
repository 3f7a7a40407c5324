#pragma once

#include <string>

#include "gqn/graph.hpp"
#include "gqn/observation.hpp"

namespace gqn {

// Node feature slots. Players fill 0..8 as position, direction, flags and
// fatigue; the ball reuses 0..3 for its xy position/velocity and slot 8 for
// height; the global node carries score difference, remaining time and game
// mode in slots 0..2.
inline constexpr std::size_t kSlotPosX = 0;
inline constexpr std::size_t kSlotPosY = 1;
inline constexpr std::size_t kSlotDirX = 2;
inline constexpr std::size_t kSlotDirY = 3;
inline constexpr std::size_t kSlotIsBall = 4;
inline constexpr std::size_t kSlotIsLeft = 5;
inline constexpr std::size_t kSlotIsRight = 6;
inline constexpr std::size_t kSlotIsActive = 7;
inline constexpr std::size_t kSlotExtra = 8;

// Node order inside the graph.
inline constexpr std::size_t kBallNode = 22;
inline constexpr std::size_t kGlobalNode = 23;

// How graph edges are chosen. "full" connects everything; "knn:<k>" links
// each player/ball node to its k nearest by pitch distance (the global node
// stays connected to everyone, it has no position).
struct EdgeRule {
  enum class Kind { FullyConnected, Knn };
  Kind kind = Kind::FullyConnected;
  int k = 0;

  static EdgeRule parse(const std::string& text);
  std::string to_string() const;
  bool operator==(const EdgeRule&) const = default;
};

// Builds the 24-node graph: left players 0..10, right players 11..21, ball,
// global. Throws ValidationError listing the violations if `obs` is invalid.
Graph obs_to_graph(const Observation& obs, const EdgeRule& rule = EdgeRule{});

// Adjacency as a pure function of a 24x9 feature matrix: node positions sit
// in slots 0..1 of the located nodes, which is all the knn rule needs. Used
// by obs_to_graph itself and to rebuild adjacency for deserialized features.
Matrix adjacency_from_features(const Matrix& features, const EdgeRule& rule);

}  // namespace gqn
