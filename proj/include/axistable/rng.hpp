#pragma once

// Deterministic counter-style random streams. A stream is identified by
// (seed, stream id); its state advances by a fixed odd constant and the
// output is the SplitMix64 finalizer of the state, so draws depend only on
// (seed, stream, position). Pure integer arithmetic: identical across
// platforms and thread schedules, which is what the byte-identical-output
// contract of the CLI rests on.

#include <cmath>
#include <cstdint>

namespace axistable {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(detail::mix64(detail::mix64(seed) ^
                             detail::mix64(stream * 0x9e3779b97f4a7c15ULL + 1))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return detail::mix64(state_);
  }

  // Uniform on the open interval (0,1); never returns 0 or 1, so logs and
  // inverse CDFs are always finite.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on (lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double exponential() { return -std::log(uniform()); }

  int uniform_index(int n) {
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  double sign() { return (next_u64() & 1) ? 1.0 : -1.0; }

 private:
  std::uint64_t state_;
};

}  // namespace axistable
