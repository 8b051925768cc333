#include "mtsim/random.hpp"

#include <cmath>

namespace mtsim {

__extension__ using u128 = unsigned __int128;

std::uint64_t RandomStream::uniform_below(std::uint64_t bound) {
  u128 product = static_cast<u128>(engine_()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<u128>(engine_()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform_open() - 1.0;
    v = 2.0 * uniform_open() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

std::uint64_t derive_stream_key(std::uint64_t base_seed, std::string_view cell_id,
                                std::uint64_t replicate) {
  std::uint64_t key = mix64(base_seed + 0x9E3779B97F4A7C15ULL);
  key = mix64(key ^ fnv1a64(cell_id));
  key = mix64(key + (replicate + 1) * 0x9E3779B97F4A7C15ULL);
  return key;
}

}  // namespace mtsim
