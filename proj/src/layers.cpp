#include "gqn/layers.hpp"

#include <cmath>
#include <limits>

#include "gqn/errors.hpp"

namespace gqn {

namespace {

Matrix apply_activation(const Matrix& pre, Activation act) {
  if (act == Activation::Identity) return pre;
  Matrix out = pre;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0.0) out[i] = 0.0;
  }
  return out;
}

// d_out masked by the activation derivative at the cached pre-activation.
Matrix activation_backward(const Matrix& d_out, const Matrix& pre, Activation act) {
  if (act == Activation::Identity) return d_out;
  Matrix d = d_out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (pre[i] <= 0.0) d[i] = 0.0;
  }
  return d;
}

Matrix column_sums(const Matrix& m) {
  Matrix out(1, m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out.at(0, c) += m.at(r, c);
  }
  return out;
}

void add_bias_row(Matrix& m, const Matrix& b) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) m.at(r, c) += b.at(0, c);
  }
}

double leaky_relu(double x, double slope) { return x > 0.0 ? x : slope * x; }
double leaky_relu_grad(double x, double slope) { return x > 0.0 ? 1.0 : slope; }

}  // namespace

GcnLayer::GcnLayer(std::size_t in_dim, std::size_t out_dim, Rng& rng)
    : W(xavier_init(in_dim, out_dim, rng)),
      b(1, out_dim),
      dW(in_dim, out_dim),
      db(1, out_dim) {}

Matrix gcn_layer_forward(const GcnLayer& layer, const Matrix& norm_adj,
                         const Matrix& h_in, Activation act, GcnCache* cache) {
  if (h_in.cols() != layer.W.rows()) {
    throw ShapeError("gcn_layer_forward: input width " +
                     std::to_string(h_in.cols()) + " != layer in_dim " +
                     std::to_string(layer.W.rows()));
  }
  Matrix propagated = matmul(norm_adj, h_in);
  Matrix pre = matmul(propagated, layer.W);
  add_bias_row(pre, layer.b);
  Matrix out = apply_activation(pre, act);
  if (cache != nullptr) {
    cache->propagated = std::move(propagated);
    cache->pre_act = std::move(pre);
  }
  return out;
}

Matrix gcn_layer_backward(GcnLayer& layer, const Matrix& norm_adj,
                          const Matrix& h_in, const GcnCache& cache,
                          const Matrix& d_out, Activation act) {
  (void)h_in;
  Matrix d_pre = activation_backward(d_out, cache.pre_act, act);
  layer.dW.add(matmul(transpose(cache.propagated), d_pre));
  layer.db.add(column_sums(d_pre));
  // Z = (Â H) W  =>  dH = Âᵀ (dZ Wᵀ); Â is symmetric but transpose is cheap.
  return matmul(transpose(norm_adj), matmul(d_pre, transpose(layer.W)));
}

GatLayer::GatLayer(std::size_t in_dim, std::size_t out_dim, Rng& rng)
    : W(xavier_init(in_dim, out_dim, rng)),
      a_src(xavier_init(1, out_dim, rng)),
      a_dst(xavier_init(1, out_dim, rng)),
      dW(in_dim, out_dim),
      da_src(1, out_dim),
      da_dst(1, out_dim) {}

Matrix gat_attention_logits(const GatLayer& layer, const Matrix& adjacency,
                            const Matrix& h_in, GatCache* cache) {
  if (h_in.cols() != layer.W.rows()) {
    throw ShapeError("gat_attention_logits: input width " +
                     std::to_string(h_in.cols()) + " != layer in_dim " +
                     std::to_string(layer.W.rows()));
  }
  const std::size_t n = adjacency.rows();
  Matrix transformed = matmul(h_in, layer.W);
  const std::size_t out_dim = transformed.cols();

  std::vector<double> src_score(n, 0.0);
  std::vector<double> dst_score(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < out_dim; ++c) {
      src_score[i] += layer.a_src.at(0, c) * transformed.at(i, c);
      dst_score[i] += layer.a_dst.at(0, c) * transformed.at(i, c);
    }
  }

  Matrix pre(n, n);
  Matrix logits(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (adjacency.at(i, j) == 0.0) continue;
      const double z = src_score[i] + dst_score[j];
      pre.at(i, j) = z;
      logits.at(i, j) = leaky_relu(z, layer.leaky_slope);
    }
  }
  if (cache != nullptr) {
    cache->transformed = std::move(transformed);
    cache->logits_pre = std::move(pre);
  }
  return logits;
}

Matrix gat_attention_normalize(const Matrix& logits, const Matrix& adjacency) {
  const std::size_t n = adjacency.rows();
  Matrix alpha(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (adjacency.at(i, j) != 0.0 && logits.at(i, j) > max_logit) {
        max_logit = logits.at(i, j);
      }
    }
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (adjacency.at(i, j) == 0.0) continue;
      const double e = std::exp(logits.at(i, j) - max_logit);
      alpha.at(i, j) = e;
      denom += e;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (adjacency.at(i, j) != 0.0) alpha.at(i, j) /= denom;
    }
  }
  return alpha;
}

Matrix gat_layer_forward(const GatLayer& layer, const Matrix& adjacency,
                         const Matrix& h_in, Activation act, GatCache* cache) {
  GatCache local;
  GatCache* c = cache != nullptr ? cache : &local;
  Matrix logits = gat_attention_logits(layer, adjacency, h_in, c);
  c->alpha = gat_attention_normalize(logits, adjacency);
  Matrix pre = matmul(c->alpha, c->transformed);
  Matrix out = apply_activation(pre, act);
  c->pre_act = std::move(pre);
  return out;
}

Matrix gat_layer_backward(GatLayer& layer, const Matrix& adjacency,
                          const Matrix& h_in, const GatCache& cache,
                          const Matrix& d_out, Activation act) {
  const std::size_t n = adjacency.rows();
  const Matrix& t = cache.transformed;
  const std::size_t out_dim = t.cols();

  Matrix d_pre = activation_backward(d_out, cache.pre_act, act);

  // pre_i = sum_j alpha_ij t_j
  Matrix d_t(n, out_dim);
  Matrix d_alpha(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (adjacency.at(i, j) == 0.0) continue;
      double dot = 0.0;
      const double aij = cache.alpha.at(i, j);
      for (std::size_t c = 0; c < out_dim; ++c) {
        dot += d_pre.at(i, c) * t.at(j, c);
        d_t.at(j, c) += aij * d_pre.at(i, c);
      }
      d_alpha.at(i, j) = dot;
    }
  }

  // Softmax rows, then LeakyReLU, back to per-node source/dest scores.
  std::vector<double> d_src(n, 0.0);
  std::vector<double> d_dst(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double weighted = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (adjacency.at(i, k) != 0.0) {
        weighted += cache.alpha.at(i, k) * d_alpha.at(i, k);
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (adjacency.at(i, j) == 0.0) continue;
      const double d_logit =
          cache.alpha.at(i, j) * (d_alpha.at(i, j) - weighted);
      const double d_z =
          d_logit * leaky_relu_grad(cache.logits_pre.at(i, j), layer.leaky_slope);
      d_src[i] += d_z;
      d_dst[j] += d_z;
    }
  }

  // src_i = a_src . t_i and dst_j = a_dst . t_j
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < out_dim; ++c) {
      layer.da_src.at(0, c) += d_src[i] * t.at(i, c);
      layer.da_dst.at(0, c) += d_dst[i] * t.at(i, c);
      d_t.at(i, c) += d_src[i] * layer.a_src.at(0, c) +
                      d_dst[i] * layer.a_dst.at(0, c);
    }
  }

  layer.dW.add(matmul(transpose(h_in), d_t));
  return matmul(d_t, transpose(layer.W));
}

}  // namespace gqn
