#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "harmscan/consensus.h"
#include "harmscan/io.h"
#include "harmscan/reliability.h"

namespace harmscan {

struct DistributionRow {
  LabelStatus status = LabelStatus::Harmless;
  std::int64_t count = 0;
  std::int64_t hundredths = 0;  // percentage x 100, rounded half-up

  double percent() const { return static_cast<double>(hundredths) / 100.0; }
  std::string percent_text() const { return format_hundredths(hundredths); }
};

struct DistributionTable {
  std::vector<DistributionRow> rows;  // one per status, fixed order
  std::int64_t grand_total = 0;

  const DistributionRow& row(LabelStatus s) const;
};

// Throws InvalidArgument when there is nothing to count.
DistributionTable distribution_table(const LabelMap& labels);
DistributionTable distribution_from_counts(std::span<const std::pair<LabelStatus, std::int64_t>> counts);

struct NamedDistribution {
  std::string source;
  DistributionTable table;
};
void write_distribution_csv(std::ostream& out, std::span<const NamedDistribution> tables);

struct FlowEdge {
  std::string source_label;
  std::string target_label;
  std::int64_t count = 0;
};

struct FlowExport {
  std::vector<FlowEdge> edges;  // status order on both sides, zero edges omitted
};

// Joint counts of (gold status, pred status) over shared videos.
FlowExport flow_export(const LabelMap& gold, const LabelMap& pred);
void write_flow_csv(std::ostream& out, const FlowExport& flow);

struct CostModel {
  Rational per_video_model_cost{1, 100};
  Rational per_task_worker_pay{2};
  std::int64_t videos_per_task = 25;
  std::int64_t workers_per_video = 3;
  Rational platform_fee_multiplier{5, 4};

  // Throws ConfigError unless every field is positive.
  void validate() const;
};

// Accepts decimal strings or numbers for the currency fields.
CostModel cost_model_from_json(const Json& j);

struct CostEstimate {
  std::int64_t n_videos = 0;
  std::int64_t tasks = 0;
  Rational model_total{0};
  Rational human_total{0};
  Rational model_per_video{0};
  Rational human_per_video{0};            // one worker-task share of a video
  Rational human_effective_per_video{0};  // human_total / n_videos
};

CostEstimate estimate_cost(std::int64_t n_videos, const CostModel& model = {});
Json to_json(const CostEstimate& c);
void write_cost_csv(std::ostream& out, const CostEstimate& c);

// Exact decimal parse ("2.50" -> 5/2). Throws ConfigError.
Rational parse_decimal(std::string_view s);
std::string format_money(const Rational& r, int decimals = 2);

}  // namespace harmscan
