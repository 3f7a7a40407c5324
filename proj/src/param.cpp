#include "gqn/param.hpp"

#include <cmath>

#include "gqn/errors.hpp"

namespace gqn {

void ParamSet::add(std::string name, Matrix& value, Matrix& grad) {
  if (find(name) != nullptr) {
    throw ConfigError("ParamSet: duplicate parameter name '" + name + "'");
  }
  if (!value.same_shape(grad)) {
    throw ConfigError("ParamSet: gradient shape differs from value for '" +
                      name + "'");
  }
  entries_.push_back(ParamEntry{std::move(name), &value, &grad});
}

const ParamEntry* ParamSet::find(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::size_t ParamSet::coordinate_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value->size();
  return n;
}

void ParamSet::zero_grads() const {
  for (const auto& e : entries_) e.grad->fill(0.0);
}

AdamState AdamState::for_params(const ParamSet& params) {
  AdamState s;
  s.m.reserve(params.size());
  s.v.reserve(params.size());
  for (const auto& e : params) {
    s.m.emplace_back(e.value->rows(), e.value->cols());
    s.v.emplace_back(e.value->rows(), e.value->cols());
  }
  return s;
}

void adam_step(const ParamSet& params, AdamState& state, const AdamConfig& cfg) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ConfigError("adam_step: optimizer state entry count differs from params");
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t p = 0; p < params.size(); ++p) {
    const ParamEntry& e = params[p];
    Matrix& m = state.m[p];
    Matrix& v = state.v[p];
    if (!m.same_shape(*e.value) || !v.same_shape(*e.value)) {
      throw ConfigError("adam_step: moment shape differs from param '" + e.name + "'");
    }
    for (std::size_t i = 0; i < e.value->size(); ++i) {
      const double g = (*e.grad)[i];
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      (*e.value)[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

std::vector<Matrix> finite_diff_grad(const std::function<double()>& loss_fn,
                                     const ParamSet& params, double h) {
  if (!(h > 0.0)) {
    throw ConfigError("finite_diff_grad: step h must be positive");
  }
  std::vector<Matrix> grads;
  grads.reserve(params.size());
  for (const auto& e : params) {
    Matrix g(e.value->rows(), e.value->cols());
    for (std::size_t i = 0; i < e.value->size(); ++i) {
      const double original = (*e.value)[i];
      (*e.value)[i] = original + h;
      const double up = loss_fn();
      (*e.value)[i] = original - h;
      const double down = loss_fn();
      (*e.value)[i] = original;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumericError("finite_diff_grad: non-finite loss probing " +
                           e.name + "[" + std::to_string(i) + "]");
      }
      g[i] = (up - down) / (2.0 * h);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

}  // namespace gqn
