#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "gqn/matrix.hpp"

namespace gqn {

// One named parameter with its gradient accumulator. ParamSet does not own
// the matrices; it is a stable-ordered view over storage that lives in the
// layers, so networks stay plain copyable values.
struct ParamEntry {
  std::string name;
  Matrix* value;
  Matrix* grad;
};

class ParamSet {
 public:
  // Throws ConfigError on duplicate name or value/grad shape mismatch.
  void add(std::string name, Matrix& value, Matrix& grad);

  std::size_t size() const { return entries_.size(); }
  const ParamEntry& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  const ParamEntry* find(std::string_view name) const;

  std::size_t coordinate_count() const;
  void zero_grads() const;

 private:
  std::vector<ParamEntry> entries_;
};

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment accumulators, one pair per parameter, plus the step
// counter used for bias correction.
struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  long t = 0;

  static AdamState for_params(const ParamSet& params);
};

// One Adam update with bias correction, applied in place. Gradients are left
// untouched; the caller zeroes them. Throws ConfigError when state and params
// disagree in count or shape.
void adam_step(const ParamSet& params, AdamState& state, const AdamConfig& cfg);

// Central finite differences of `loss_fn` with respect to every coordinate in
// `params`, one result matrix per entry. `loss_fn` must be deterministic and
// is expected to read the parameters through the same storage `params` views.
// Parameters are restored bit-exactly afterwards. Throws NumericError naming
// the coordinate if the loss comes back non-finite during probing.
std::vector<Matrix> finite_diff_grad(const std::function<double()>& loss_fn,
                                     const ParamSet& params, double h);

}  // namespace gqn
