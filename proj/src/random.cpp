#include "vcausal/random.hpp"

#include <array>

namespace vcausal {

Stream derive_substream(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(index ^ 0xD1B54A32D192ED03ULL);
  std::array<std::uint32_t, 4> words{
      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  return Stream(seq);
}

}  // namespace vcausal
