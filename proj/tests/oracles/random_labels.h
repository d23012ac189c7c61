#pragma once

#include <random>
#include <string>

#include "harmscan/consensus.h"

namespace fixtures {

// Any status, Harmful with a random non-empty set or the no-majority flag.
inline harmscan::FinalLabel random_label(std::mt19937_64& rng) {
  using namespace harmscan;
  switch (rng() % 8) {
    case 0:
    case 1:
      return FinalLabel::harmless();
    case 2:
      return FinalLabel::unavailable();
    case 3:
      return rng() % 2 ? FinalLabel::no_agreement() : FinalLabel::removed();
    case 4:
      return FinalLabel::harmful_no_majority();
    default:
      return FinalLabel::harmful(CategorySet::from_mask(static_cast<std::uint8_t>(1 + rng() % 63)));
  }
}

// Gold and pred over up to max_videos ids with some ids missing on one side.
inline std::pair<harmscan::LabelMap, harmscan::LabelMap> random_maps(std::mt19937_64& rng, int max_videos) {
  harmscan::LabelMap gold, pred;
  const int n = 1 + static_cast<int>(rng() % max_videos);
  for (int i = 0; i < n; ++i) {
    const auto id = "v" + std::to_string(i);
    const auto r = rng() % 10;
    if (r != 0) gold.emplace(id, random_label(rng));
    if (r != 1) pred.emplace(id, random_label(rng));
  }
  return {gold, pred};
}

}  // namespace fixtures
