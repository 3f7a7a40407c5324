#include "gqn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace gqn {

namespace {

// Relative error with a floor so finite-difference noise on dead (exactly
// zero) gradients does not register as failure. Above the floor this is the
// usual symmetric relative error.
double rel_error(double analytic, double numeric) {
  const double denom =
      std::max({1e-4, std::fabs(analytic), std::fabs(numeric)});
  return std::fabs(analytic - numeric) / denom;
}

Graph random_graph(Rng& rng) {
  Matrix features(kGraphNodes, kNodeFeatures);
  for (std::size_t i = 0; i < features.size(); ++i) {
    features[i] = rng.uniform(-1.0, 1.0);
  }
  Matrix adj(kGraphNodes, kGraphNodes);
  for (std::size_t i = 0; i < kGraphNodes; ++i) {
    adj.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < kGraphNodes; ++j) {
      const double edge = rng.uniform() < 0.5 ? 1.0 : 0.0;
      adj.at(i, j) = edge;
      adj.at(j, i) = edge;
    }
  }
  return Graph(std::move(features), std::move(adj));
}

}  // namespace

GradCheckReport run_gradcheck(NetKind kind, std::uint64_t seed,
                              bool perturb_backward) {
  Rng rng(seed);
  QNetwork net(kind, rng);
  Graph graph = random_graph(rng);

  ActionValues upstream{};
  for (double& u : upstream) u = rng.uniform(-1.0, 1.0);

  ParamSet params = net.params();
  net.zero_grads();
  net.q_forward(graph);
  net.q_backward(upstream);
  if (perturb_backward) {
    Matrix& g = *params[0].grad;
    g[0] += 0.05 * (std::fabs(g[0]) + 1.0);
  }

  auto loss_fn = [&net, &graph, &upstream]() {
    const ActionValues q = net.q_forward(graph);
    double loss = 0.0;
    for (std::size_t a = 0; a < kNumActions; ++a) loss += upstream[a] * q[a];
    return loss;
  };
  const std::vector<Matrix> numeric = finite_diff_grad(loss_fn, params, 1e-5);

  GradCheckReport report;
  for (std::size_t p = 0; p < params.size(); ++p) {
    GradCheckEntry entry;
    entry.name = params[p].name;
    const Matrix& analytic = *params[p].grad;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      entry.max_rel_error =
          std::max(entry.max_rel_error, rel_error(analytic[i], numeric[p][i]));
    }
    if (entry.max_rel_error >= report.worst) {
      report.worst = entry.max_rel_error;
      report.worst_param = entry.name;
    }
    report.entries.push_back(std::move(entry));
  }
  report.passed = report.worst < kGradCheckTolerance;
  return report;
}

}  // namespace gqn
