#pragma once

#include "gqn/matrix.hpp"
#include "gqn/rng.hpp"

namespace gqn {

enum class Activation { Relu, Identity };

// Graph convolution layer: H_out = act(Â H_in W + b) with Â the
// symmetric-normalized adjacency.
struct GcnLayer {
  Matrix W;   // in_dim x out_dim
  Matrix b;   // 1 x out_dim
  Matrix dW;  // gradient accumulators, same shapes
  Matrix db;

  GcnLayer() = default;
  GcnLayer(std::size_t in_dim, std::size_t out_dim, Rng& rng);
};

struct GcnCache {
  Matrix propagated;  // Â H_in
  Matrix pre_act;     // Â H_in W + b
};

Matrix gcn_layer_forward(const GcnLayer& layer, const Matrix& norm_adj,
                         const Matrix& h_in, Activation act,
                         GcnCache* cache = nullptr);

// Accumulates dW/db and returns dL/dH_in. `norm_adj` and `h_in` must be the
// forward inputs and `cache` the forward's cache.
Matrix gcn_layer_backward(GcnLayer& layer, const Matrix& norm_adj,
                          const Matrix& h_in, const GcnCache& cache,
                          const Matrix& d_out, Activation act);

// Single-head attention layer. For each edge (i,j):
//   logit e_ij = LeakyReLU(a_src . (W h_i) + a_dst . (W h_j))
//   alpha_ij   = softmax over j in N(i) of e_ij
//   out_i      = act(sum_j alpha_ij W h_j)
struct GatLayer {
  Matrix W;      // in_dim x out_dim
  Matrix a_src;  // 1 x out_dim
  Matrix a_dst;  // 1 x out_dim
  Matrix dW;
  Matrix da_src;
  Matrix da_dst;
  double leaky_slope = 0.2;

  GatLayer() = default;
  GatLayer(std::size_t in_dim, std::size_t out_dim, Rng& rng);
};

struct GatCache {
  Matrix transformed;  // W h per node, n x out_dim
  Matrix logits_pre;   // a_src.(Wh_i) + a_dst.(Wh_j) before LeakyReLU, edges only
  Matrix alpha;        // n x n attention weights, zero off-edges
  Matrix pre_act;      // aggregated messages before activation
};

// Edge attention logits after LeakyReLU; off-edge entries are zero and carry
// no meaning. Adjacency is the binary matrix (not normalized).
Matrix gat_attention_logits(const GatLayer& layer, const Matrix& adjacency,
                            const Matrix& h_in, GatCache* cache = nullptr);

// Row-wise softmax over each node's neighborhood, computed with
// max-subtraction so logits up to a few hundred stay stable.
Matrix gat_attention_normalize(const Matrix& logits, const Matrix& adjacency);

Matrix gat_layer_forward(const GatLayer& layer, const Matrix& adjacency,
                         const Matrix& h_in, Activation act,
                         GatCache* cache = nullptr);

Matrix gat_layer_backward(GatLayer& layer, const Matrix& adjacency,
                          const Matrix& h_in, const GatCache& cache,
                          const Matrix& d_out, Activation act);

}  // namespace gqn
