#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace neckflex {

// Deterministic random helpers on top of mt19937_64. The standard library
// distributions are implementation-defined, so the draw algorithms live
// here and byte-identical streams follow from the seed alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform();

  // Uniform integer in [0, n); n must be positive. Rejection sampling,
  // no modulo bias.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller; one spare value is cached.
  double normal();

  // Derives an independent generator for a named substream of this
  // generator's seed.
  Rng fork(const std::string& label) const;

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  double spare_ = 0;
  bool has_spare_ = false;
};

// Stable 64-bit mix of a seed and a label, for substream derivation.
std::uint64_t mix_seed(std::uint64_t seed, const std::string& label);

// Fisher-Yates shuffle driven by Rng::below.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace neckflex
