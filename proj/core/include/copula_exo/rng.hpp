#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace copula_exo {

/// SplitMix64 finalizer; also used to derive stream identifiers.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Order-dependent combination of two 64-bit values.
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept;

/// FNV-1a over bytes, finalized with mix64.
std::uint64_t hash_bytes(std::string_view bytes) noexcept;

/// Deterministic random stream identified by (seed, stream_id).
///
/// The generator is xoshiro256** keyed by SplitMix64 expansion of the pair,
/// so a stream's draws depend only on its identity, never on which thread
/// consumes it or on what other streams have produced. A stream must be
/// owned by a single execution context at a time.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Child stream with the same seed and stream id hash(stream_id, index).
  RngStream substream(std::uint64_t index) const noexcept;

  std::uint64_t next_u64() noexcept;
  result_type operator()() noexcept { return next_u64(); }
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on the open interval (lo, hi); returns lo when lo == hi.
  double uniform(double lo, double hi) noexcept;
  /// Standard normal by inversion.
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> state_;
};

}  // namespace copula_exo
