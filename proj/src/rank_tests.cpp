#include "harmscan/rank_tests.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "harmscan/error.h"

namespace harmscan {

namespace {

struct Ranked {
  std::vector<std::int64_t> doubled;  // doubled midrank per input, x first then y
  std::vector<std::int64_t> group_ranks;  // doubled midrank per distinct value, ascending
  double tie_term = 0;  // sum of t^3 - t over tie groups
};

Ranked rank_all(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size() + y.size();
  std::vector<std::pair<double, std::size_t>> v;
  v.reserve(n);
  for (std::size_t i = 0; i < x.size(); ++i) v.emplace_back(x[i], i);
  for (std::size_t i = 0; i < y.size(); ++i) v.emplace_back(y[i], x.size() + i);
  std::sort(v.begin(), v.end());
  Ranked r;
  r.doubled.resize(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && v[j + 1].first == v[i].first) ++j;
    // ranks i+1..j+1 share the midrank (i+j+2)/2
    const auto d = static_cast<std::int64_t>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) r.doubled[v[k].second] = d;
    r.group_ranks.push_back(d);
    const double t = static_cast<double>(j - i + 1);
    r.tie_term += t * t * t - t;
    i = j + 1;
  }
  return r;
}

double exact_p(const Ranked& r, std::size_t n1, std::int64_t dev_obs) {
  const std::size_t n = r.doubled.size();
  const std::int64_t max_sum = std::accumulate(r.doubled.begin(), r.doubled.end(), std::int64_t{0});
  // ways[k][s]: subsets of size k with doubled rank sum s
  std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = r.doubled[i];
    for (std::size_t k = std::min(n1, i + 1); k >= 1; --k) {
      for (std::int64_t s = max_sum; s >= d; --s) ways[k][s] += ways[k - 1][s - d];
    }
  }
  const auto n2 = static_cast<std::int64_t>(n - n1);
  const auto k1 = static_cast<std::int64_t>(n1);
  double hit = 0, total = 0;
  for (std::int64_t s = 0; s <= max_sum; ++s) {
    const double w = ways[n1][s];
    if (w == 0) continue;
    total += w;
    const std::int64_t two_u = s - k1 * (k1 + 1);
    if (std::llabs(two_u - k1 * n2) >= dev_obs) hit += w;
  }
  return std::min(1.0, hit / total);
}

}  // namespace

MannWhitney mann_whitney_u(std::span<const double> x, std::span<const double> y, PMethod method) {
  if (x.empty() || y.empty()) throw Error(ErrorKind::InvalidArgument, "Mann-Whitney needs two non-empty samples");
  const std::size_t n = x.size() + y.size();
  if (method == PMethod::Exact && n > kExactLimit) {
    throw Error(ErrorKind::InvalidArgument, "exact p limited to 16 observations");
  }
  const auto r = rank_all(x, y);
  const auto n1 = static_cast<std::int64_t>(x.size());
  const auto n2 = static_cast<std::int64_t>(y.size());
  std::int64_t d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += r.doubled[i];
  const std::int64_t two_u = d - n1 * (n1 + 1);

  MannWhitney out;
  out.u = static_cast<double>(two_u) / 2.0;
  const double mu = static_cast<double>(n1 * n2) / 2.0;
  const double nn = static_cast<double>(n);
  const double var = static_cast<double>(n1 * n2) / 12.0 * ((nn + 1) - r.tie_term / (nn * (nn - 1)));

  const bool use_exact = method == PMethod::Exact || (method == PMethod::Auto && n <= kExactLimit);
  if (use_exact) {
    out.exact = true;
    out.p = exact_p(r, x.size(), std::llabs(two_u - n1 * n2));
    if (var > 0) out.z = (out.u - mu) / std::sqrt(var);
    return out;
  }
  if (var <= 0 || r.group_ranks.size() < 2) {
    out.p = 1;
    return out;
  }
  // U moves in steps of half the gcd of gaps between doubled midranks;
  // the continuity correction is half of that step.
  std::int64_t g = 0;
  for (std::size_t i = 1; i < r.group_ranks.size(); ++i) g = std::gcd(g, r.group_ranks[i] - r.group_ranks[i - 1]);
  const double cc = static_cast<double>(g) / 4.0;
  const double sd = std::sqrt(var);
  out.z = (out.u - mu) / sd;
  const double z = std::max(0.0, std::abs(out.u - mu) - cc) / sd;
  out.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return out;
}

}  // namespace harmscan
