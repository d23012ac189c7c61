#include <omp.h>

#include "harmscan/error.h"
#include "harmscan/kernels.h"

namespace harmscan::kernels {

namespace detail {
void check_lengths(std::size_t a, std::size_t b);
void check_codes(std::span<const int> codes, int coders, int values);
}  // namespace detail

Confusion tally_binary_parallel(std::span<const std::uint8_t> gold, std::span<const std::uint8_t> pred) {
  detail::check_lengths(gold.size(), pred.size());
  const std::int64_t n = static_cast<std::int64_t>(gold.size());
  std::int64_t tp = 0, fn = 0, fp = 0, tn = 0;
#pragma omp parallel for reduction(+ : tp, fn, fp, tn) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const bool g = gold[i] != 0, p = pred[i] != 0;
    tp += g && p;
    fn += g && !p;
    fp += !g && p;
    tn += !g && !p;
  }
  return {tp, tn, fp, fn};
}

CategoryTally tally_categories_parallel(std::span<const std::uint8_t> gold,
                                        std::span<const std::uint8_t> pred) {
  detail::check_lengths(gold.size(), pred.size());
  const std::int64_t n = static_cast<std::int64_t>(gold.size());
  constexpr int K = static_cast<int>(kCategoryCount);
  std::int64_t tp[K] = {}, fn[K] = {}, fp[K] = {}, tn[K] = {};
  std::int64_t exact = 0, overlap = 0;
#pragma omp parallel for reduction(+ : tp[:K], fn[:K], fp[:K], tn[:K], exact, overlap) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const unsigned g = gold[i], p = pred[i];
    exact += g == p;
    overlap += (g & p) != 0;
    for (int c = 0; c < K; ++c) {
      const bool gb = (g >> c) & 1u, pb = (p >> c) & 1u;
      tp[c] += gb && pb;
      fn[c] += gb && !pb;
      fp[c] += !gb && pb;
      tn[c] += !gb && !pb;
    }
  }
  CategoryTally t;
  t.n = n;
  t.exact_matches = exact;
  t.concurrent = overlap;
  for (int c = 0; c < K; ++c) t.per_category[c] = {tp[c], tn[c], fp[c], fn[c]};
  return t;
}

CoincidenceTally tally_coincidences_parallel(std::span<const int> codes, int coders, int values) {
  detail::check_codes(codes, coders, values);
  const std::int64_t items = static_cast<std::int64_t>(codes.size() / coders);
  CoincidenceTally t;
  t.values = values;
  t.max_coders = coders;
  const std::size_t cells = static_cast<std::size_t>(coders + 1) * values * values;
  t.pairs.assign(cells, 0);
  std::int64_t* acc = t.pairs.data();
  const std::size_t len = cells;
  std::int64_t units = 0;
#pragma omp parallel reduction(+ : acc[:len], units)
  {
    std::vector<std::int64_t> counts(values);
#pragma omp for schedule(static)
    for (std::int64_t u = 0; u < items; ++u) {
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
      ++units;
      for (int c = 0; c < values; ++c) {
        for (int k = 0; k < values; ++k) {
          acc[(static_cast<std::size_t>(m) * values + c) * values + k] +=
              c == k ? counts[c] * (counts[c] - 1) : counts[c] * counts[k];
        }
      }
    }
  }
  t.pairable_units = units;
  return t;
}

}  // namespace harmscan::kernels
