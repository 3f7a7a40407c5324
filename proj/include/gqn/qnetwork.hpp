#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>

#include "gqn/graph.hpp"
#include "gqn/layers.hpp"
#include "gqn/param.hpp"

namespace gqn {

inline constexpr std::size_t kNumActions = 19;
inline constexpr std::size_t kHiddenDim = 32;

enum class NetKind { Gcn, Gat };

// Accepts "gcn" or "gat"; anything else is a ConfigError.
NetKind net_kind_from_string(const std::string& s);
std::string to_string(NetKind kind);

using ActionValues = std::array<double, kNumActions>;

// Mean-pooled node embeddings through one affine map to the action values.
struct ReadoutHead {
  Matrix W;  // hidden x actions
  Matrix b;  // 1 x actions
  Matrix dW;
  Matrix db;

  ReadoutHead() = default;
  ReadoutHead(std::size_t in_dim, std::size_t out_dim, Rng& rng);
};

// Two stacked graph layers (GCN or GAT, chosen at construction) feeding the
// readout head. Copyable value type; copying the local network is how the
// target network gets synced.
class QNetwork {
 public:
  QNetwork() = default;
  QNetwork(NetKind kind, Rng& rng);

  NetKind kind() const { return kind_; }

  // Caches intermediates for q_backward. ReLU after layer 1, identity after
  // layer 2; Q = mean-pool(H2) · W_r + b_r.
  ActionValues q_forward(const Graph& graph);

  // Accumulates d(upstream · Q)/dθ into each parameter's gradient buffer.
  // Throws StateError when no forward pass is cached.
  void q_backward(const ActionValues& upstream);

  // Non-owning, name-stable view over parameters and their gradients; the
  // view's order defines optimizer-state and checkpoint layout.
  ParamSet params();

  // Read-only traversal in the same order, for serialization.
  void visit_params(
      const std::function<void(const std::string&, const Matrix&)>& fn) const;

  void zero_grads();

 private:
  NetKind kind_ = NetKind::Gcn;
  std::vector<GcnLayer> gcn_;  // two layers iff kind == Gcn
  std::vector<GatLayer> gat_;  // two layers iff kind == Gat
  ReadoutHead readout_;

  // Forward cache.
  bool has_cache_ = false;
  Graph cached_graph_{Matrix(1, kNodeFeatures), Matrix::identity(1)};
  Matrix cached_norm_adj_;
  GcnCache gcn_cache_[2];
  GatCache gat_cache_[2];
  Matrix cached_h1_;
  Matrix cached_pooled_;
};

}  // namespace gqn
