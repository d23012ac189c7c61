#include <doctest.h>

#include <random>

#include "harmscan/error.h"
#include "harmscan/reliability.h"
#include "oracles/compare.h"
#include "oracles/random_labels.h"

using namespace harmscan;

namespace {

const CategorySet kInfo{HarmCategory::Information};
const CategorySet kSex{HarmCategory::Sexual};

std::vector<int> flatten(const std::vector<std::vector<int>>& rows) {
  std::vector<int> out;
  for (const auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

}  // namespace

TEST_SUITE("reliability") {

TEST_CASE("Holsti agreement") {
  LabelMap a, b;
  for (int i = 0; i < 100; ++i) {
    a.emplace("v" + std::to_string(i), FinalLabel::harmless());
    b.emplace("v" + std::to_string(i), i < 88 ? FinalLabel::harmless() : FinalLabel::harmful(kInfo));
  }
  CHECK(percentage_agreement(a, b) == Rational(88, 100));
  CHECK(percentage_agreement(a, a) == Rational(1));
  LabelMap c;
  for (const auto& [k, l] : a) c.emplace(k, FinalLabel::harmful(kSex));
  CHECK(percentage_agreement(a, c) == Rational(0));
  try {
    percentage_agreement(a, LabelMap{{"zzz", FinalLabel::harmless()}});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyOverlap);
  }
}

TEST_CASE("per-category agreement uses videos either coder tagged") {
  LabelMap a, b;
  for (int i = 0; i < 20; ++i) {
    const auto id = "v" + std::to_string(i);
    a.emplace(id, i < 10 ? FinalLabel::harmful(kSex) : FinalLabel::harmless());
    b.emplace(id, i < 10 ? FinalLabel::harmless() : FinalLabel::harmful(kSex));
  }
  auto r = per_category_agreement(a, b);
  const auto& sex = r[index_of(HarmCategory::Sexual)];
  CHECK(sex.either == 20);
  CHECK(sex.ratio == Rational(0));
  CHECK_FALSE(r[index_of(HarmCategory::Information)].ratio.has_value());
  auto same = per_category_agreement(a, a);
  CHECK(same[index_of(HarmCategory::Sexual)].ratio == Rational(1));
}

TEST_CASE("kappa examples") {
  std::vector<int> a{0, 0, 1, 1}, b{0, 1, 0, 1};
  CHECK(cohen_kappa(a, b) == Rational(0));
  CHECK(cohen_kappa(a, a) == Rational(1));
  std::vector<int> one{3, 3, 3};
  try {
    cohen_kappa(one, one);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateMarginals);
  }
  // hand-built 10-item table
  std::vector<int> x{0, 0, 0, 0, 0, 1, 1, 1, 2, 2}, y{0, 0, 0, 1, 2, 1, 1, 0, 2, 2};
  CHECK(cohen_kappa(x, y) == *oracle::kappa(x, y));
}

TEST_CASE("kappa on label maps uses set-equality classes") {
  LabelMap a{{"1", FinalLabel::harmful(kInfo)}, {"2", FinalLabel::harmful(kInfo | kSex)}, {"3", FinalLabel::harmless()}};
  LabelMap b{{"1", FinalLabel::harmful(kInfo)}, {"2", FinalLabel::harmful(kInfo)}, {"3", FinalLabel::harmless()}};
  std::vector<int> x{0, 1, 2}, y{0, 0, 2};
  CHECK(cohen_kappa(a, b) == *oracle::kappa(x, y));
  auto per = cohen_kappa_per_category(a, b);
  CHECK(per[index_of(HarmCategory::Information)].has_value());
  CHECK_FALSE(per[index_of(HarmCategory::Addictive)].has_value());
}

TEST_CASE("kappa and alpha match their oracles on random data") {
  std::mt19937_64 rng(77);
  for (int it = 0; it < 500; ++it) {
    const int n = 1 + static_cast<int>(rng() % 20);
    const int k = 2 + static_cast<int>(rng() % 3);
    std::vector<int> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng() % k);
      b[i] = static_cast<int>(rng() % k);
    }
    auto want = oracle::kappa(a, b);
    if (want) {
      auto got = cohen_kappa(a, b);
      CHECK(got == *want);
      CHECK(got <= Rational(1));
    } else {
      CHECK_THROWS_AS(cohen_kappa(a, b), Error);
    }

    const int coders = 2 + static_cast<int>(rng() % 3);
    std::vector<std::vector<int>> rows(coders, std::vector<int>(n));
    for (auto& r : rows) {
      for (auto& v : r) v = rng() % 4 == 0 ? -1 : static_cast<int>(rng() % k);
    }
    auto wa = oracle::alpha(rows);
    if (wa) {
      auto ga = krippendorff_alpha(flatten(rows), coders, k);
      CHECK(ga == *wa);
      CHECK(ga <= Rational(1));
      CHECK(krippendorff_alpha(flatten(rows), coders, k, kernels::Exec::Parallel) == ga);
    } else {
      CHECK_THROWS_AS(krippendorff_alpha(flatten(rows), coders, k), Error);
    }
  }
}

TEST_CASE("alpha boundaries") {
  std::vector<std::vector<int>> same{{0, 1, 1, 0}, {0, 1, 1, 0}, {0, 1, 1, 0}};
  CHECK(krippendorff_alpha(flatten(same), 3, 2) == Rational(1));
  // one shared item only
  std::vector<std::vector<int>> shared{{0, -1, 1}, {0, 1, -1}};
  try {
    krippendorff_alpha(flatten(shared), 2, 2);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateMarginals);
  }
  std::vector<std::vector<int>> shared2{{0, -1, 1}, {1, 1, -1}};
  CHECK_NOTHROW(krippendorff_alpha(flatten(shared2), 2, 2));
  std::vector<std::vector<int>> none{{0, -1}, {-1, 1}};
  try {
    krippendorff_alpha(flatten(none), 2, 2);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooFewPairs);
  }
  // 3 coders, 4 items, hand-built disagreements
  std::vector<std::vector<int>> hand{{0, 1, 1, 0}, {0, 1, 0, 0}, {1, 1, -1, 0}};
  CHECK(krippendorff_alpha(flatten(hand), 3, 2) == *oracle::alpha(hand));
}

TEST_CASE("alpha falls as disagreement grows at fixed marginals") {
  // both coders code ten 1s and ten 0s; d swaps create 2d disagreements
  Rational prev(2);
  for (int d = 0; d <= 10; ++d) {
    std::vector<int> a(20), b(20);
    for (int i = 0; i < 20; ++i) a[i] = b[i] = i < 10;
    for (int s = 0; s < d; ++s) {
      b[s] = 0;
      b[10 + s] = 1;
    }
    std::vector<int> codes(a);
    codes.insert(codes.end(), b.begin(), b.end());
    auto alpha = krippendorff_alpha(codes, 2, 2);
    CHECK(alpha < prev);
    prev = alpha;
  }
}

TEST_CASE("binary code matrix") {
  LabelMap a{{"x", FinalLabel::harmful(kInfo)}, {"y", FinalLabel::unavailable()}};
  LabelMap b{{"x", FinalLabel::harmless()}, {"z", FinalLabel::harmless()}};
  std::vector<const LabelMap*> src{&a, &b};
  auto m = binary_code_matrix(src);
  CHECK(m.items == std::vector<std::string>{"x", "y", "z"});
  CHECK(m.codes == std::vector<int>{1, -1, -1, 0, -1, 0});
}

}
