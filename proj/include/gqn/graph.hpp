#pragma once

#include <cstddef>

#include "gqn/matrix.hpp"

namespace gqn {

inline constexpr std::size_t kNodeFeatures = 9;
inline constexpr std::size_t kGraphNodes = 24;  // 22 players + ball + global

// One game state as the networks see it: per-node features plus a binary
// symmetric adjacency with self-loops. Adjacency entries are exactly 0 or 1.
struct Graph {
  std::size_t n = 0;
  Matrix features;   // n x kNodeFeatures
  Matrix adjacency;  // n x n

  Graph() = default;
  Graph(Matrix feats, Matrix adj);

  // Throws ValidationError when adjacency is non-square/asymmetric/missing
  // self-loops, holds values other than 0/1, or features are misshaped.
  void validate() const;

  bool operator==(const Graph& other) const {
    return n == other.n && features == other.features &&
           adjacency == other.adjacency;
  }
};

Graph fully_connected_graph(Matrix features);

// Symmetric degree normalization of a binary adjacency with self-loops:
// entry (i,j) becomes A_ij / sqrt(d_i * d_j) with degrees counting the loop.
Matrix normalize_adjacency(const Matrix& adjacency);

}  // namespace gqn
