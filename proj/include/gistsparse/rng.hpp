#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace gistsparse {

/// Generator seeded from a tuple of integers, e.g. (seed, trial, stream),
/// so that independent runs get independent, reproducible streams.
inline std::mt19937_64 make_rng(std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * keys.size());
  for (const auto k : keys) {
    words.push_back(static_cast<std::uint32_t>(k & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace gistsparse
