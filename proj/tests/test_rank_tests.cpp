#include <doctest.h>

#include <random>

#include "harmscan/error.h"
#include "harmscan/rank_tests.h"
#include "oracles/compare.h"

using namespace harmscan;

namespace {

std::vector<double> as_double(const std::vector<int>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_SUITE("rank_tests") {

TEST_CASE("extreme separation") {
  std::vector<double> x{1, 1, 1}, y{0, 0, 0};
  auto r = mann_whitney_u(x, y);
  CHECK(r.u == 9);
  CHECK(r.exact);
  CHECK(r.p == doctest::Approx(0.1));
}

TEST_CASE("identical samples") {
  std::vector<double> x{0, 1, 1, 0, 1}, y{0, 1, 1, 0, 1};
  auto r = mann_whitney_u(x, y);
  CHECK(r.u == 12.5);
  CHECK(r.p == doctest::Approx(1.0));
  std::vector<double> big(500);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = i % 3 == 0;
  auto n = mann_whitney_u(big, big);
  CHECK_FALSE(n.exact);
  CHECK(n.p == doctest::Approx(1.0));
}

TEST_CASE("exact matches enumeration for small continuous samples") {
  std::mt19937_64 rng(4);
  for (int it = 0; it < 200; ++it) {
    const int n1 = 1 + static_cast<int>(rng() % 6), n2 = 1 + static_cast<int>(rng() % 6);
    std::vector<int> x(n1), y(n2);
    for (auto& v : x) v = static_cast<int>(rng() % 5);
    for (auto& v : y) v = static_cast<int>(rng() % 5);
    auto want = oracle::mann_whitney(x, y);
    auto got = mann_whitney_u(as_double(x), as_double(y), PMethod::Exact);
    CHECK(got.u == doctest::Approx(oracle::to_d(want.u)));
    CHECK(got.p == doctest::Approx(oracle::to_d(want.p)).epsilon(1e-12));
  }
}

TEST_CASE("normal approximation is close on untied data") {
  std::vector<double> x{1.1, 2.3, 3.8, 4.0, 5.5, 6.1, 7.7, 8.2}, y{0.5, 1.9, 2.0, 3.3, 4.4, 4.9, 6.6, 9.1};
  auto e = mann_whitney_u(x, y, PMethod::Exact);
  auto n = mann_whitney_u(x, y, PMethod::Normal);
  CHECK(e.u == n.u);
  CHECK(std::abs(e.p - n.p) < 0.02);
}

TEST_CASE("input checks") {
  std::vector<double> empty, one{1};
  CHECK_THROWS_AS(mann_whitney_u(empty, one), Error);
  std::vector<double> big(17, 0.0);
  CHECK_THROWS_AS(mann_whitney_u(big, one, PMethod::Exact), Error);
  CHECK_FALSE(mann_whitney_u(big, one).exact);
}

TEST_CASE("large samples with equal means give p near 1") {
  std::mt19937_64 rng(6);
  std::vector<double> x(16199), y(17536);
  for (auto& v : x) v = (rng() % 100) < 66;
  for (auto& v : y) v = (rng() % 100) < 66;
  auto r = mann_whitney_u(x, y);
  CHECK(r.p > 0.01);
}

}
