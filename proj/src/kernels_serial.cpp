#include "harmscan/error.h"
#include "harmscan/kernels.h"

namespace harmscan::kernels {

namespace detail {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw Error(ErrorKind::LengthMismatch, "gold and pred lengths differ");
}

void check_codes(std::span<const int> codes, int coders, int values) {
  if (coders < 1 || values < 1) throw Error(ErrorKind::InvalidArgument, "need coders and values");
  if (codes.size() % static_cast<std::size_t>(coders) != 0) {
    throw Error(ErrorKind::LengthMismatch, "code matrix is not coders x items");
  }
  for (int c : codes) {
    if (c < -1 || c >= values) throw Error(ErrorKind::InvalidArgument, "code out of range");
  }
}

}  // namespace detail

Confusion tally_binary_serial(std::span<const std::uint8_t> gold, std::span<const std::uint8_t> pred) {
  detail::check_lengths(gold.size(), pred.size());
  Confusion c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool g = gold[i] != 0, p = pred[i] != 0;
    if (g && p) ++c.tp;
    else if (g) ++c.fn;
    else if (p) ++c.fp;
    else ++c.tn;
  }
  return c;
}

CategoryTally tally_categories_serial(std::span<const std::uint8_t> gold,
                                      std::span<const std::uint8_t> pred) {
  detail::check_lengths(gold.size(), pred.size());
  CategoryTally t;
  t.n = static_cast<std::int64_t>(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const unsigned g = gold[i], p = pred[i];
    if (g == p) ++t.exact_matches;
    if (g & p) ++t.concurrent;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      const bool gb = (g >> c) & 1u, pb = (p >> c) & 1u;
      auto& cell = t.per_category[c];
      if (gb && pb) ++cell.tp;
      else if (gb) ++cell.fn;
      else if (pb) ++cell.fp;
      else ++cell.tn;
    }
  }
  return t;
}

CoincidenceTally tally_coincidences_serial(std::span<const int> codes, int coders, int values) {
  detail::check_codes(codes, coders, values);
  const std::size_t items = codes.size() / coders;
  CoincidenceTally t;
  t.values = values;
  t.max_coders = coders;
  t.pairs.assign(static_cast<std::size_t>(coders + 1) * values * values, 0);
  std::vector<std::int64_t> counts(values);
  for (std::size_t u = 0; u < items; ++u) {
    std::fill(counts.begin(), counts.end(), 0);
    int m = 0;
    for (int a = 0; a < coders; ++a) {
      const int v = codes[a * items + u];
      if (v >= 0) {
        ++counts[v];
        ++m;
      }
    }
    if (m < 2) continue;
    ++t.pairable_units;
    for (int c = 0; c < values; ++c) {
      for (int k = 0; k < values; ++k) {
        const std::int64_t n = c == k ? counts[c] * (counts[c] - 1) : counts[c] * counts[k];
        t.pairs[(static_cast<std::size_t>(m) * values + c) * values + k] += n;
      }
    }
  }
  return t;
}

Confusion tally_binary(std::span<const std::uint8_t> gold, std::span<const std::uint8_t> pred, Exec exec) {
  if (exec == Exec::Parallel || (exec == Exec::Auto && gold.size() >= kParallelThreshold)) {
    return tally_binary_parallel(gold, pred);
  }
  return tally_binary_serial(gold, pred);
}

CategoryTally tally_categories(std::span<const std::uint8_t> gold, std::span<const std::uint8_t> pred,
                               Exec exec) {
  if (exec == Exec::Parallel || (exec == Exec::Auto && gold.size() >= kParallelThreshold)) {
    return tally_categories_parallel(gold, pred);
  }
  return tally_categories_serial(gold, pred);
}

CoincidenceTally tally_coincidences(std::span<const int> codes, int coders, int values, Exec exec) {
  if (exec == Exec::Parallel || (exec == Exec::Auto && codes.size() >= kParallelThreshold)) {
    return tally_coincidences_parallel(codes, coders, values);
  }
  return tally_coincidences_serial(codes, coders, values);
}

}  // namespace harmscan::kernels
