#pragma once

// Counter-based pseudo-random streams.
//
// Every consumer of randomness owns a (seed, stream) pair and draws are a
// pure function of (seed, stream, counter). Replaying a run therefore
// regenerates the exact same values, and the environment's round-t
// realizations are independent of how many draws the algorithm made
// elsewhere: they live on their own streams.

#include <cmath>
#include <cstdint>

namespace bmmfa {

namespace detail {

// Stafford's "mix13" finalizer for splitmix64.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

struct RngHandle {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  // New handle for a labelled substream. Derivation is a one-way mix so
  // sibling substreams do not overlap in practice.
  [[nodiscard]] constexpr RngHandle derived(std::uint64_t substream) const {
    return {seed, detail::mix64(stream + detail::kGolden * (substream + 1))};
  }
  [[nodiscard]] constexpr RngHandle derived(std::uint64_t a, std::uint64_t b) const {
    return derived(a).derived(b);
  }

  constexpr bool operator==(const RngHandle&) const = default;
};

// splitmix64 keyed by (seed, stream); the counter is the splitmix state.
class CounterRng {
 public:
  explicit constexpr CounterRng(RngHandle h)
      : state_(detail::mix64(h.seed + detail::kGolden) ^ detail::mix64(h.stream)) {}

  constexpr std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); safe to pass to log().
  double next_unit_open() {
    for (;;) {
      const double u = next_unit();
      if (u > 0.0) return u;
    }
  }

  // Uniform integer in [0, bound). Rejection keeps it unbiased.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal (Box-Muller, cosine branch only; one draw per call).
  double next_normal() {
    const double u1 = next_unit_open();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::uint64_t state_;
};

// Stream-domain tags. Keeping them in one place avoids accidental reuse of
// the same (seed, stream) by unrelated components.
namespace stream_domain {
inline constexpr std::uint64_t kEnvValues = 0x01;
inline constexpr std::uint64_t kInstanceMeans = 0x02;
inline constexpr std::uint64_t kPlantedAssignment = 0x03;
inline constexpr std::uint64_t kHarnessRun = 0x04;
inline constexpr std::uint64_t kEmpiricalOpt = 0x05;
}  // namespace stream_domain

}  // namespace bmmfa
