#pragma once

#include <cstdint>
#include <vector>

#include "gqn/graph.hpp"
#include "gqn/rng.hpp"

namespace gqn {

struct Transition {
  Graph state;
  int action = 0;
  double reward = 0.0;
  Graph next_state;
  bool done = false;
};

// Fixed-capacity ring. Push evicts strictly oldest-first; sampling is
// uniform without replacement within one batch.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);

  // k transitions, no duplicates within the batch; DataError if k exceeds
  // the current size. Deterministic for a fixed rng state.
  std::vector<Transition> sample(std::size_t k, Rng& rng) const;

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t pushed_total() const { return pushed_; }

  // Logical index: 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const;

  // Rebuilds a buffer from persisted contents. `items` must already be in
  // logical (oldest-first) order and fit the capacity; `pushed_total` keeps
  // the lifetime insertion counter consistent across a save/load cycle.
  static ReplayBuffer restore(std::size_t capacity,
                              std::vector<Transition> items,
                              std::uint64_t pushed_total);

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // slot holding the oldest element
  std::uint64_t pushed_ = 0;
  std::vector<Transition> data_;
};

}  // namespace gqn
