#pragma once

// Integer tallies behind the metrics. Every kernel has a serial reference
// and an OpenMP version; both return identical counts because all
// accumulators are exact integers.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "harmscan/taxonomy.h"

namespace harmscan::kernels {

enum class Exec : std::uint8_t { Auto, Serial, Parallel };

// Below this many units Auto picks the serial path.
inline constexpr std::size_t kParallelThreshold = 4096;

struct Confusion {
  std::int64_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::int64_t total() const noexcept { return tp + tn + fp + fn; }
  bool operator==(const Confusion&) const = default;
};

struct CategoryTally {
  std::array<Confusion, kCategoryCount> per_category{};
  std::int64_t exact_matches = 0;
  std::int64_t concurrent = 0;  // pairs whose masks share a bit
  std::int64_t n = 0;
  bool operator==(const CategoryTally&) const = default;
};

// Coincidences grouped by how many values the unit carried: pairs[m] holds
// a k x k row-major block of ordered value pairs from units with m values.
// Dividing block m by (m - 1) and summing gives the coincidence matrix.
struct CoincidenceTally {
  int values = 0;
  int max_coders = 0;
  std::vector<std::int64_t> pairs;  // (max_coders + 1) * values * values
  std::int64_t pairable_units = 0;

  std::int64_t at(int m, int c, int k) const {
    return pairs[(static_cast<std::size_t>(m) * values + c) * values + k];
  }
  bool operator==(const CoincidenceTally&) const = default;
};

// gold/pred hold 1 for Harmful, 0 for Harmless.
Confusion tally_binary_serial(std::span<const std::uint8_t> gold, std::span<const std::uint8_t> pred);
Confusion tally_binary_parallel(std::span<const std::uint8_t> gold, std::span<const std::uint8_t> pred);
Confusion tally_binary(std::span<const std::uint8_t> gold, std::span<const std::uint8_t> pred,
                       Exec exec = Exec::Auto);

// Six-bit category masks per pair.
CategoryTally tally_categories_serial(std::span<const std::uint8_t> gold,
                                      std::span<const std::uint8_t> pred);
CategoryTally tally_categories_parallel(std::span<const std::uint8_t> gold,
                                        std::span<const std::uint8_t> pred);
CategoryTally tally_categories(std::span<const std::uint8_t> gold, std::span<const std::uint8_t> pred,
                               Exec exec = Exec::Auto);

// codes is coders x items row-major; values in [0, values) or -1 for missing.
CoincidenceTally tally_coincidences_serial(std::span<const int> codes, int coders, int values);
CoincidenceTally tally_coincidences_parallel(std::span<const int> codes, int coders, int values);
CoincidenceTally tally_coincidences(std::span<const int> codes, int coders, int values,
                                    Exec exec = Exec::Auto);

}  // namespace harmscan::kernels
