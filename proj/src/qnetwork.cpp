#include "gqn/qnetwork.hpp"

#include "gqn/errors.hpp"

namespace gqn {

NetKind net_kind_from_string(const std::string& s) {
  if (s == "gcn") return NetKind::Gcn;
  if (s == "gat") return NetKind::Gat;
  throw ConfigError("unknown network kind '" + s + "', expected gcn or gat");
}

std::string to_string(NetKind kind) {
  return kind == NetKind::Gcn ? "gcn" : "gat";
}

ReadoutHead::ReadoutHead(std::size_t in_dim, std::size_t out_dim, Rng& rng)
    : W(xavier_init(in_dim, out_dim, rng)),
      b(1, out_dim),
      dW(in_dim, out_dim),
      db(1, out_dim) {}

QNetwork::QNetwork(NetKind kind, Rng& rng) : kind_(kind) {
  // Draw order is fixed (layer 1, layer 2, readout) so a seed pins the
  // parameters regardless of call site.
  if (kind_ == NetKind::Gcn) {
    gcn_.emplace_back(kNodeFeatures, kHiddenDim, rng);
    gcn_.emplace_back(kHiddenDim, kHiddenDim, rng);
  } else {
    gat_.emplace_back(kNodeFeatures, kHiddenDim, rng);
    gat_.emplace_back(kHiddenDim, kHiddenDim, rng);
  }
  readout_ = ReadoutHead(kHiddenDim, kNumActions, rng);
}

ActionValues QNetwork::q_forward(const Graph& graph) {
  if (graph.features.cols() != kNodeFeatures) {
    throw ShapeError("q_forward: expected " + std::to_string(kNodeFeatures) +
                     " node features, got " +
                     std::to_string(graph.features.cols()));
  }
  cached_graph_ = graph;

  Matrix h2;
  if (kind_ == NetKind::Gcn) {
    cached_norm_adj_ = normalize_adjacency(graph.adjacency);
    cached_h1_ = gcn_layer_forward(gcn_[0], cached_norm_adj_, graph.features,
                                   Activation::Relu, &gcn_cache_[0]);
    h2 = gcn_layer_forward(gcn_[1], cached_norm_adj_, cached_h1_,
                           Activation::Identity, &gcn_cache_[1]);
  } else {
    cached_h1_ = gat_layer_forward(gat_[0], graph.adjacency, graph.features,
                                   Activation::Relu, &gat_cache_[0]);
    h2 = gat_layer_forward(gat_[1], graph.adjacency, cached_h1_,
                           Activation::Identity, &gat_cache_[1]);
  }

  cached_pooled_ = Matrix(1, h2.cols());
  for (std::size_t r = 0; r < h2.rows(); ++r) {
    for (std::size_t c = 0; c < h2.cols(); ++c) {
      cached_pooled_.at(0, c) += h2.at(r, c);
    }
  }
  cached_pooled_.scale(1.0 / static_cast<double>(h2.rows()));

  Matrix q = matmul(cached_pooled_, readout_.W);
  ActionValues out{};
  for (std::size_t a = 0; a < kNumActions; ++a) {
    out[a] = q.at(0, a) + readout_.b.at(0, a);
  }
  has_cache_ = true;
  return out;
}

void QNetwork::q_backward(const ActionValues& upstream) {
  if (!has_cache_) {
    throw StateError("q_backward called without a cached forward pass");
  }
  Matrix d_q(1, kNumActions);
  for (std::size_t a = 0; a < kNumActions; ++a) d_q.at(0, a) = upstream[a];

  // Readout: q = pooled · W + b.
  readout_.dW.add(matmul(transpose(cached_pooled_), d_q));
  readout_.db.add(d_q);
  Matrix d_pooled = matmul(d_q, transpose(readout_.W));

  // Mean pool spreads the pooled gradient evenly over the nodes.
  const std::size_t n = cached_graph_.n;
  Matrix d_h2(n, d_pooled.cols());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d_pooled.cols(); ++c) {
      d_h2.at(r, c) = d_pooled.at(0, c) / static_cast<double>(n);
    }
  }

  if (kind_ == NetKind::Gcn) {
    Matrix d_h1 = gcn_layer_backward(gcn_[1], cached_norm_adj_, cached_h1_,
                                     gcn_cache_[1], d_h2, Activation::Identity);
    gcn_layer_backward(gcn_[0], cached_norm_adj_, cached_graph_.features,
                       gcn_cache_[0], d_h1, Activation::Relu);
  } else {
    Matrix d_h1 =
        gat_layer_backward(gat_[1], cached_graph_.adjacency, cached_h1_,
                           gat_cache_[1], d_h2, Activation::Identity);
    gat_layer_backward(gat_[0], cached_graph_.adjacency,
                       cached_graph_.features, gat_cache_[0], d_h1,
                       Activation::Relu);
  }
}

ParamSet QNetwork::params() {
  ParamSet set;
  if (kind_ == NetKind::Gcn) {
    for (std::size_t i = 0; i < gcn_.size(); ++i) {
      const std::string prefix = "layer" + std::to_string(i + 1);
      set.add(prefix + ".W", gcn_[i].W, gcn_[i].dW);
      set.add(prefix + ".b", gcn_[i].b, gcn_[i].db);
    }
  } else {
    for (std::size_t i = 0; i < gat_.size(); ++i) {
      const std::string prefix = "layer" + std::to_string(i + 1);
      set.add(prefix + ".W", gat_[i].W, gat_[i].dW);
      set.add(prefix + ".a_src", gat_[i].a_src, gat_[i].da_src);
      set.add(prefix + ".a_dst", gat_[i].a_dst, gat_[i].da_dst);
    }
  }
  set.add("readout.W", readout_.W, readout_.dW);
  set.add("readout.b", readout_.b, readout_.db);
  return set;
}

void QNetwork::visit_params(
    const std::function<void(const std::string&, const Matrix&)>& fn) const {
  if (kind_ == NetKind::Gcn) {
    for (std::size_t i = 0; i < gcn_.size(); ++i) {
      const std::string prefix = "layer" + std::to_string(i + 1);
      fn(prefix + ".W", gcn_[i].W);
      fn(prefix + ".b", gcn_[i].b);
    }
  } else {
    for (std::size_t i = 0; i < gat_.size(); ++i) {
      const std::string prefix = "layer" + std::to_string(i + 1);
      fn(prefix + ".W", gat_[i].W);
      fn(prefix + ".a_src", gat_[i].a_src);
      fn(prefix + ".a_dst", gat_[i].a_dst);
    }
  }
  fn("readout.W", readout_.W);
  fn("readout.b", readout_.b);
}

void QNetwork::zero_grads() { params().zero_grads(); }

}  // namespace gqn
