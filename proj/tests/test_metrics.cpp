#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>

#include "harmscan/error.h"
#include "harmscan/metrics.h"
#include "oracles/compare.h"
#include "oracles/random_labels.h"

using namespace harmscan;
using oracle::same;

namespace {

const CategorySet kInfo{HarmCategory::Information};
const CategorySet kSex{HarmCategory::Sexual};
const CategorySet kClick{HarmCategory::Clickbait};

std::vector<oracle::Pair> to_oracle(const std::vector<ComparablePair>& pairs) {
  std::vector<oracle::Pair> out;
  for (const auto& p : pairs) out.push_back({p.gold, p.pred});
  return out;
}

ComparablePair pair(FinalLabel g, FinalLabel p) { return {"v", g, p}; }

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("filter examples") {
  LabelMap gold{{"a", FinalLabel::harmful(kInfo)}, {"b", FinalLabel::unavailable()},
                {"c", FinalLabel::harmful(kInfo)}, {"d", FinalLabel::harmless()}, {"e", FinalLabel::harmless()}};
  LabelMap pred{{"a", FinalLabel::harmless()}, {"b", FinalLabel::harmful(kInfo)},
                {"c", FinalLabel::no_agreement()}, {"d", FinalLabel::harmless()}, {"z", FinalLabel::harmless()}};
  auto bin = filter_comparable(gold, pred, EvalMode::Binary);
  REQUIRE(bin.pairs.size() == 2);
  CHECK(bin.pairs[0].video_id == "a");
  CHECK(bin.pairs[1].video_id == "d");
  CHECK(bin.missing_pred == 1);
  CHECK(bin.missing_gold == 1);
  CHECK(bin.excluded == 2);
  auto ml = filter_comparable(gold, pred, EvalMode::MultiLabel);
  REQUIRE(ml.pairs.size() == 1);
  CHECK(ml.pairs[0].video_id == "a");
}

TEST_CASE("multi-label filter skips gold harmful without categories") {
  LabelMap gold{{"a", FinalLabel::harmful_no_majority()}};
  LabelMap pred{{"a", FinalLabel::harmful(kInfo)}};
  CHECK(filter_comparable(gold, pred, EvalMode::MultiLabel).pairs.empty());
  CHECK(filter_comparable(gold, pred, EvalMode::Binary).pairs.size() == 1);
}

TEST_CASE("standard error") {
  CHECK(std::abs(AgreementStat::from_mean(0.66, 16199).se - 0.0037) <= 0.0001);
  CHECK(std::abs(AgreementStat::from_mean(0.66, 17536).se - 0.0036) <= 0.0001);
  CHECK(AgreementStat::from_counts(3, 4).mean == 0.75);
  CHECK_THROWS_AS(AgreementStat::from_mean(0.5, 0), Error);
}

TEST_CASE("perfect predictions") {
  std::vector<ComparablePair> ps{pair(FinalLabel::harmful(kInfo), FinalLabel::harmful(kInfo)),
                                 pair(FinalLabel::harmless(), FinalLabel::harmless())};
  auto b = binary_metrics(ps);
  CHECK(*b.accuracy == 1.0);
  CHECK(*b.macro_f1 == 1.0);
  CHECK(b.agreement.se == 0.0);
  auto m = multilabel_metrics(std::vector<ComparablePair>{ps[0]});
  CHECK(*m.subset_accuracy == 1.0);
  CHECK(*m.per_category[0].scores.f1 == 1.0);
}

TEST_CASE("degenerate classes are undefined, not zero") {
  // all gold harmless: sensitivity has no denominator
  auto b = binary_metrics_from_counts({0, 5, 0, 0});
  CHECK_FALSE(b.sensitivity.has_value());
  CHECK(*b.specificity == 1.0);
  CHECK_FALSE(b.harmful.precision.has_value());
  CHECK(*b.macro_recall == 1.0);
  CHECK(b.undefined_excluded == 3);
  CHECK_THROWS_AS(binary_metrics(std::vector<ComparablePair>{}), Error);
}

TEST_CASE("two-pair multi-label hand tally") {
  std::vector<ComparablePair> ps{pair(FinalLabel::harmful(kInfo), FinalLabel::harmful(kInfo)),
                                 pair(FinalLabel::harmful(kSex), FinalLabel::harmless())};
  auto m = multilabel_metrics(ps);
  const auto& info = m.per_category[index_of(HarmCategory::Information)].scores;
  const auto& sex = m.per_category[index_of(HarmCategory::Sexual)].scores;
  CHECK(*info.f1 == 1.0);
  CHECK(*sex.recall == 0.0);
  CHECK_FALSE(sex.precision.has_value());
  CHECK(*sex.f1 == 0.0);
  CHECK(*m.subset_accuracy == 0.5);
  CHECK(m.agreement.mean == 0.5);
  // four categories never appear on either side
  CHECK_FALSE(m.per_category[index_of(HarmCategory::Addictive)].scores.f1.has_value());
  CHECK(*m.micro_sensitivity == 0.5);
  CHECK(*m.micro_specificity == 1.0);
  CHECK(*m.micro_accuracy == doctest::Approx(11.0 / 12.0));
}

TEST_CASE("concurrence examples") {
  CHECK(concurrence_agreement(std::vector<ComparablePair>{pair(FinalLabel::harmful(kInfo | kClick), FinalLabel::harmful(kInfo))}).mean == 1.0);
  CHECK(concurrence_agreement(std::vector<ComparablePair>{pair(FinalLabel::harmful(kInfo), FinalLabel::harmless())}).mean == 0.0);
  CHECK(concurrence_agreement(std::vector<ComparablePair>{pair(FinalLabel::harmful(kInfo), FinalLabel::harmful(kSex))}).mean == 0.0);
}

TEST_CASE("macro recall identity on random confusion tables") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 5000; ++i) {
    ConfusionCounts c{static_cast<std::int64_t>(1 + rng() % 500), static_cast<std::int64_t>(1 + rng() % 500),
                      static_cast<std::int64_t>(rng() % 500), static_cast<std::int64_t>(rng() % 500)};
    auto b = binary_metrics_from_counts(c);
    CHECK(*b.macro_recall == (*b.sensitivity + *b.specificity) / 2);
  }
}

TEST_CASE("oracle equivalence on random datasets") {
  std::mt19937_64 rng(2024);
  for (int it = 0; it < 300; ++it) {
    auto [gold, pred] = fixtures::random_maps(rng, 20);
    auto bin = filter_comparable(gold, pred, EvalMode::Binary);
    if (!bin.pairs.empty()) {
      auto got = binary_metrics(bin.pairs);
      auto want = oracle::binary(to_oracle(bin.pairs));
      CHECK(got.counts == ConfusionCounts{want.tp, want.tn, want.fp, want.fn});
      CHECK(same(got.accuracy, want.accuracy));
      CHECK(same(got.sensitivity, want.sensitivity));
      CHECK(same(got.specificity, want.specificity));
      CHECK(same(got.macro_f1, want.macro_f1));
      CHECK(same(got.macro_precision, want.macro_p));
      CHECK(same(got.macro_recall, want.macro_r));
    }
    auto ml = filter_comparable(gold, pred, EvalMode::MultiLabel);
    if (!ml.pairs.empty()) {
      auto got = multilabel_metrics(ml.pairs);
      auto want = oracle::multilabel(to_oracle(ml.pairs));
      for (int c = 0; c < 6; ++c) {
        CHECK(same(got.per_category[c].scores.f1, want.per[c].f1));
        CHECK(same(got.per_category[c].scores.precision, want.per[c].p));
        CHECK(same(got.per_category[c].scores.recall, want.per[c].r));
      }
      CHECK(same(got.macro_f1, want.macro_f1));
      CHECK(same(got.subset_accuracy, want.subset));
      CHECK(same(got.micro_sensitivity, want.micro_sens));
      CHECK(same(got.micro_specificity, want.micro_spec));
      CHECK(same(got.micro_accuracy, want.micro_acc));
      CHECK(same(std::optional<double>(got.agreement.mean), want.concurrence));
      // exact match implies overlap when gold is non-empty
      CHECK(*got.subset_accuracy <= got.agreement.mean);
    }
  }
}

TEST_CASE("multi-label metrics ignore video order") {
  std::mt19937_64 rng(8);
  auto [gold, pred] = fixtures::random_maps(rng, 20);
  auto ml = filter_comparable(gold, pred, EvalMode::MultiLabel).pairs;
  if (ml.empty()) return;
  auto a = multilabel_metrics(ml);
  std::shuffle(ml.begin(), ml.end(), rng);
  auto b = multilabel_metrics(ml);
  CHECK(a.micro_sensitivity == b.micro_sensitivity);
  CHECK(a.macro_f1 == b.macro_f1);
}

TEST_CASE("report JSON round trip and CSV shapes") {
  LabelMap gold{{"a", FinalLabel::harmful(kInfo)}, {"b", FinalLabel::harmless()}, {"c", FinalLabel::harmful(kSex | kClick)}};
  LabelMap pred{{"a", FinalLabel::harmful(kInfo)}, {"b", FinalLabel::harmful(kSex)}, {"c", FinalLabel::harmful(kSex)}};
  auto r = evaluate(gold, pred, "expert", "gpt");
  REQUIRE(r.binary);
  REQUIRE(r.multilabel);
  CHECK(r.n_binary == 3);
  CHECK(r.n_multilabel == 2);
  auto path = std::filesystem::temp_directory_path() / "harmscan_tests" / "metrics.json";
  std::filesystem::create_directories(path.parent_path());
  write_metrics_report(path, r);
  auto back = read_metrics_report(path);
  CHECK(to_json(back) == to_json(r));

  std::vector<MetricsReport> rs{r, r};
  rs[1].pred_source = "crowd";
  std::ostringstream perf, cats;
  write_performance_csv(perf, rs);
  write_category_csv(cats, rs);
  CHECK(perf.str().rfind("metric,gpt binary,gpt multilabel,crowd binary,crowd multilabel\n", 0) == 0);
  CHECK(cats.str().rfind("category,gpt f1,gpt precision,gpt recall,crowd f1", 0) == 0);
  const auto cat_text = cats.str();
  CHECK(std::count(cat_text.begin(), cat_text.end(), '\n') == 7);
  CHECK_THROWS_AS(metrics_report_from_json(Json{{"binary", 1}}), Error);
}

}
