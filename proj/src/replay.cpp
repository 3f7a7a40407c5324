#include "gqn/replay.hpp"

#include <numeric>
#include <utility>

#include "gqn/errors.hpp"

namespace gqn {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity < 1) {
    throw ConfigError("ReplayBuffer: capacity must be >= 1");
  }
  data_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
  pushed_ += 1;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= data_.size()) {
    throw DataError("ReplayBuffer: index " + std::to_string(i) +
                    " out of range for size " + std::to_string(data_.size()));
  }
  return data_[(head_ + i) % data_.size()];
}

ReplayBuffer ReplayBuffer::restore(std::size_t capacity,
                                   std::vector<Transition> items,
                                   std::uint64_t pushed_total) {
  ReplayBuffer buf(capacity);
  if (items.size() > capacity) {
    throw DataError("ReplayBuffer: restore got " + std::to_string(items.size()) +
                    " items for capacity " + std::to_string(capacity));
  }
  if (pushed_total < items.size()) {
    throw DataError("ReplayBuffer: restore counter " +
                    std::to_string(pushed_total) + " below item count " +
                    std::to_string(items.size()));
  }
  for (Transition& t : items) {
    buf.push(std::move(t));
  }
  buf.pushed_ = pushed_total;
  return buf;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t k, Rng& rng) const {
  if (k > data_.size()) {
    throw DataError("ReplayBuffer: cannot sample " + std::to_string(k) +
                    " transitions from " + std::to_string(data_.size()));
  }
  // partial Fisher-Yates over logical indices keeps the draw uniform and
  // without replacement
  std::vector<std::size_t> idx(data_.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<Transition> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t r = j + rng.uniform_int(idx.size() - j);
    std::swap(idx[j], idx[r]);
    out.push_back(at(idx[j]));
  }
  return out;
}

}  // namespace gqn
