#include "gqn/graph.hpp"

#include <cmath>
#include <string>

#include "gqn/errors.hpp"

namespace gqn {

Graph::Graph(Matrix feats, Matrix adj)
    : n(feats.rows()), features(std::move(feats)), adjacency(std::move(adj)) {
  validate();
}

void Graph::validate() const {
  if (features.rows() != n || adjacency.rows() != n || adjacency.cols() != n) {
    throw ValidationError("Graph: adjacency must be n x n with n = feature rows");
  }
  if (features.cols() != kNodeFeatures) {
    throw ValidationError("Graph: expected " + std::to_string(kNodeFeatures) +
                          " feature columns, got " +
                          std::to_string(features.cols()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (adjacency.at(i, i) != 1.0) {
      throw ValidationError("Graph: missing self-loop at node " + std::to_string(i));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double a = adjacency.at(i, j);
      if (a != 0.0 && a != 1.0) {
        throw ValidationError("Graph: adjacency entries must be 0 or 1");
      }
      if (a != adjacency.at(j, i)) {
        throw ValidationError("Graph: adjacency not symmetric at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  if (!features.all_finite()) {
    throw ValidationError("Graph: features contain non-finite values");
  }
}

Graph fully_connected_graph(Matrix features) {
  const std::size_t n = features.rows();
  return Graph(std::move(features), Matrix(n, n, 1.0));
}

Matrix normalize_adjacency(const Matrix& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw ShapeError("normalize_adjacency: adjacency must be square");
  }
  const std::size_t n = adjacency.rows();
  std::vector<double> deg(n, 0.0);  // >= 1 via self-loops
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) deg[i] += adjacency.at(i, j);
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (adjacency.at(i, j) != 0.0) {
        out.at(i, j) = adjacency.at(i, j) / std::sqrt(deg[i] * deg[j]);
      }
    }
  }
  return out;
}

}  // namespace gqn
