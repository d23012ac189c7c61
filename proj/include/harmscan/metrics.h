#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "harmscan/consensus.h"
#include "harmscan/io.h"
#include "harmscan/kernels.h"
#include "harmscan/taxonomy.h"

namespace harmscan {

enum class EvalMode : std::uint8_t { Binary, MultiLabel };
std::string_view to_string(EvalMode m);
EvalMode parse_eval_mode(std::string_view s);

struct ComparablePair {
  std::string video_id;
  FinalLabel gold;
  FinalLabel pred;
};

struct ComparableSet {
  std::vector<ComparablePair> pairs;  // gold-map order
  std::size_t missing_pred = 0;       // gold video absent from pred
  std::size_t missing_gold = 0;       // pred video absent from gold
  std::size_t excluded = 0;           // present on both sides, filtered by status
};

// Binary keeps Harmful/Harmless on both sides. MultiLabel keeps gold Harmful
// with at least one category and any pred status except Unavailable,
// NoAgreement and Removed.
ComparableSet filter_comparable(const LabelMap& gold, const LabelMap& pred, EvalMode mode);

using ConfusionCounts = kernels::Confusion;

struct AgreementStat {
  double mean = 0;
  double se = 0;
  std::int64_t n = 0;

  static AgreementStat from_mean(double mean, std::int64_t n);
  static AgreementStat from_counts(std::int64_t successes, std::int64_t n);
};

struct ClassScores {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::int64_t support = 0;  // tp + fn
};

// 0/0 yields nullopt.
std::optional<double> safe_ratio(std::int64_t num, std::int64_t den);
ClassScores class_scores(const ConfusionCounts& c);

struct BinaryBlock {
  ConfusionCounts counts;
  std::optional<double> accuracy, sensitivity, specificity;
  ClassScores harmful, harmless;
  std::optional<double> macro_precision, macro_recall, macro_f1;
  AgreementStat agreement;
  int undefined_excluded = 0;  // class scores left out of macro means
};

BinaryBlock binary_metrics_from_counts(const ConfusionCounts& counts);
// Throws InvalidArgument on an empty pair list.
BinaryBlock binary_metrics(std::span<const ComparablePair> pairs,
                           kernels::Exec exec = kernels::Exec::Auto);

struct CategoryScores {
  HarmCategory category = HarmCategory::Information;
  ConfusionCounts counts;
  ClassScores scores;
};

struct MultilabelBlock {
  std::array<CategoryScores, kCategoryCount> per_category{};
  std::optional<double> macro_precision, macro_recall, macro_f1;
  std::optional<double> subset_accuracy;
  std::optional<double> micro_sensitivity, micro_specificity, micro_accuracy;
  AgreementStat agreement;  // concurrence
  std::int64_t n = 0;
  int undefined_excluded = 0;
};

MultilabelBlock multilabel_metrics_from_tally(const kernels::CategoryTally& tally);
MultilabelBlock multilabel_metrics(std::span<const ComparablePair> pairs,
                                   kernels::Exec exec = kernels::Exec::Auto);

// 1 per pair when gold and pred category sets overlap.
std::vector<std::uint8_t> concurrence_vector(std::span<const ComparablePair> pairs);
AgreementStat concurrence_agreement(std::span<const ComparablePair> pairs);

struct MetricsReport {
  std::string gold_source;
  std::string pred_source;
  std::optional<BinaryBlock> binary;
  std::optional<MultilabelBlock> multilabel;
  std::size_t n_binary = 0;
  std::size_t n_multilabel = 0;
  std::size_t dropped_binary = 0;
  std::size_t dropped_multilabel = 0;
};

// Computes whichever blocks have at least one comparable pair.
MetricsReport evaluate(const LabelMap& gold, const LabelMap& pred, std::string gold_source = "gold",
                       std::string pred_source = "pred");

Json to_json(const MetricsReport& r);
MetricsReport metrics_report_from_json(const Json& j);
void write_metrics_report(const std::filesystem::path& path, const MetricsReport& r);
MetricsReport read_metrics_report(const std::filesystem::path& path);

// Rows are metrics, column pairs are binary/multi-label per report.
void write_performance_csv(std::ostream& out, std::span<const MetricsReport> reports);
// Rows are categories, columns F1/precision/recall per report.
void write_category_csv(std::ostream& out, std::span<const MetricsReport> reports);

}  // namespace harmscan
