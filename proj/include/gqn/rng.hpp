#pragma once

#include <cstdint>

namespace gqn {

// Deterministic splitmix64 stream. The whole generator state is one u64, so
// it serializes into checkpoints trivially and two runs with equal seeds are
// bitwise identical on any platform. All randomness in this project flows
// through explicitly seeded instances of this class; nothing uses global RNG
// state or std:: distributions (their output is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform in [0, n). Rejection sampling keeps the draw unbiased.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t bound = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= bound);
    return x % n;
  }

  // Independent stream derived from (seed, stream id) without consuming from
  // either; used so episode seeds do not depend on how much randomness the
  // main stream has already produced.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    Rng r(seed ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
    r.next_u64();
    return r.next_u64();
  }

  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t s) { state_ = s; }

 private:
  std::uint64_t state_;
};

}  // namespace gqn
