#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mtsim {

/// Single-owner stream of pseudo-random variates.
///
/// Backed by std::mt19937_64, whose output sequence is fixed by the
/// standard; the variate transforms below are ours, so the whole stream is
/// reproducible bit-for-bit across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : engine_(key) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0,1), 53-bit resolution.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound), bound > 0. Lemire's nearly-divisionless
  /// rejection method.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Standard normal variate (Marsaglia polar method).
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Key for the stream of one (cell, replicate) work unit. Same inputs give
/// the same key; any change in base seed, cell id or replicate gives an
/// unrelated key.
std::uint64_t derive_stream_key(std::uint64_t base_seed, std::string_view cell_id,
                                std::uint64_t replicate);

inline RandomStream derive_stream(std::uint64_t base_seed, std::string_view cell_id,
                                  std::uint64_t replicate) {
  return RandomStream(derive_stream_key(base_seed, cell_id, replicate));
}

}  // namespace mtsim
