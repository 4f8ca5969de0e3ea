#include "copula_exo/rng.hpp"

#include "copula_exo/special_functions.hpp"

namespace copula_exo {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(mix64(a) ^ rotl(b, 17) ^ 0x632be59bd9b4e019ULL);
}

std::uint64_t hash_bytes(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t key = hash_combine(seed, stream_id);
  for (auto& word : state_) {
    key += 0x9e3779b97f4a7c15ULL;
    word = mix64(key);
  }
  // xoshiro must not start from the all-zero state.
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

RngStream RngStream::substream(std::uint64_t index) const noexcept {
  return RngStream(seed_, hash_combine(stream_id_, index));
}

std::uint64_t RngStream::next_u64() noexcept {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) noexcept {
  if (lo == hi) return lo;
  double u = lo + (hi - lo) * uniform();
  // Rounding can land exactly on an endpoint when the cell is narrow.
  if (u <= lo || u >= hi) u = 0.5 * (lo + hi);
  return u;
}

double RngStream::normal() { return normal_quantile(uniform()); }

}  // namespace copula_exo
