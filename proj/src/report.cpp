#include "harmscan/report.h"

#include <cmath>

#include "harmscan/error.h"

namespace harmscan {

const DistributionRow& DistributionTable::row(LabelStatus s) const {
  for (const auto& r : rows) {
    if (r.status == s) return r;
  }
  throw Error(ErrorKind::InvalidArgument, "status missing from table");
}

DistributionTable distribution_from_counts(std::span<const std::pair<LabelStatus, std::int64_t>> counts) {
  DistributionTable t;
  std::array<std::int64_t, kAllStatuses.size()> by_status{};
  for (const auto& [s, n] : counts) {
    if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative count");
    by_status[static_cast<std::size_t>(s)] += n;
    t.grand_total += n;
  }
  if (t.grand_total == 0) throw Error(ErrorKind::InvalidArgument, "distribution of zero videos");
  for (auto s : kAllStatuses) {
    const auto n = by_status[static_cast<std::size_t>(s)];
    t.rows.push_back({s, n, percent_hundredths(n, t.grand_total)});
  }
  return t;
}

DistributionTable distribution_table(const LabelMap& labels) {
  std::vector<std::pair<LabelStatus, std::int64_t>> counts;
  for (auto s : kAllStatuses) counts.emplace_back(s, 0);
  for (const auto& [vid, l] : labels) ++counts[static_cast<std::size_t>(l.status())].second;
  return distribution_from_counts(counts);
}

void write_distribution_csv(std::ostream& out, std::span<const NamedDistribution> tables) {
  CsvWriter w(out);
  std::vector<std::string> header{"status"};
  for (const auto& t : tables) {
    header.push_back(t.source + " count");
    header.push_back(t.source + " percent");
  }
  w.row(header);
  for (auto s : kAllStatuses) {
    std::vector<std::string> fields{std::string(display_name(s))};
    for (const auto& t : tables) {
      const auto& r = t.table.row(s);
      fields.push_back(std::to_string(r.count));
      fields.push_back(r.percent_text());
    }
    w.row(fields);
  }
  std::vector<std::string> total{"Total"};
  for (const auto& t : tables) {
    total.push_back(std::to_string(t.table.grand_total));
    total.push_back("100.00");
  }
  w.row(total);
}

FlowExport flow_export(const LabelMap& gold, const LabelMap& pred) {
  constexpr std::size_t k = kAllStatuses.size();
  std::array<std::array<std::int64_t, k>, k> joint{};
  for (const auto& [vid, g] : gold) {
    auto it = pred.find(vid);
    if (it == pred.end()) continue;
    ++joint[static_cast<std::size_t>(g.status())][static_cast<std::size_t>(it->second.status())];
  }
  FlowExport f;
  for (auto a : kAllStatuses) {
    for (auto b : kAllStatuses) {
      const auto n = joint[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      if (n) f.edges.push_back({std::string(to_string(a)), std::string(to_string(b)), n});
    }
  }
  return f;
}

void write_flow_csv(std::ostream& out, const FlowExport& flow) {
  CsvWriter w(out);
  w.row({"source_label", "target_label", "count"});
  for (const auto& e : flow.edges) w.row({e.source_label, e.target_label, std::to_string(e.count)});
}

void CostModel::validate() const {
  if (per_video_model_cost <= 0 || per_task_worker_pay <= 0 || videos_per_task <= 0 ||
      workers_per_video <= 0 || platform_fee_multiplier <= 0) {
    throw Error(ErrorKind::ConfigError, "cost model fields must be positive");
  }
}

Rational parse_decimal(std::string_view s) {
  auto t = text::trim(s);
  if (!t.empty() && t[0] == '$') t.erase(0, 1);
  bool neg = false;
  std::size_t i = 0;
  if (i < t.size() && (t[i] == '-' || t[i] == '+')) neg = t[i++] == '-';
  std::int64_t num = 0, den = 1;
  bool digits = false, dot = false;
  for (; i < t.size(); ++i) {
    const char c = t[i];
    if (c == '.' && !dot) {
      dot = true;
    } else if (c >= '0' && c <= '9') {
      digits = true;
      if (num > (INT64_MAX - 9) / 10 || den > INT64_MAX / 10) {
        throw Error(ErrorKind::ConfigError, "decimal too long: " + t);
      }
      num = num * 10 + (c - '0');
      if (dot) den *= 10;
    } else if (c != ',') {
      throw Error(ErrorKind::ConfigError, "not a decimal: " + t);
    }
  }
  if (!digits) throw Error(ErrorKind::ConfigError, "not a decimal: " + t);
  return {neg ? -num : num, den};
}

std::string format_money(const Rational& r, int decimals) {
  std::int64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  // half-up on the magnitude
  const bool neg = r < 0;
  const Rational a = neg ? -r : r;
  const std::int64_t scaled = (2 * a.numerator() * scale + a.denominator()) / (2 * a.denominator());
  std::string whole = std::to_string(scaled / scale);
  std::string frac = decimals ? std::to_string(scaled % scale) : "";
  frac.insert(0, static_cast<std::size_t>(decimals) - frac.size(), '0');
  return (neg && scaled ? "-" : "") + whole + (decimals ? "." + frac : "");
}

namespace {

Rational rational_field(const Json& j, const char* key, Rational fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_string()) return parse_decimal(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_number()) {
    // numbers go through their shortest decimal form
    return parse_decimal(v.dump());
  }
  throw Error(ErrorKind::ConfigError, std::string("cost field ") + key + " must be a number");
}

}  // namespace

CostModel cost_model_from_json(const Json& j) {
  CostModel m;
  m.per_video_model_cost = rational_field(j, "per_video_model_cost", m.per_video_model_cost);
  m.per_task_worker_pay = rational_field(j, "per_task_worker_pay", m.per_task_worker_pay);
  m.platform_fee_multiplier = rational_field(j, "platform_fee_multiplier", m.platform_fee_multiplier);
  m.videos_per_task = j.value("videos_per_task", m.videos_per_task);
  m.workers_per_video = j.value("workers_per_video", m.workers_per_video);
  m.validate();
  return m;
}

CostEstimate estimate_cost(std::int64_t n_videos, const CostModel& model) {
  if (n_videos < 0) throw Error(ErrorKind::InvalidArgument, "n_videos must be >= 0");
  model.validate();
  CostEstimate c;
  c.n_videos = n_videos;
  const std::int64_t slots = n_videos * model.workers_per_video;
  c.tasks = (slots + model.videos_per_task - 1) / model.videos_per_task;
  const Rational task_cost = model.per_task_worker_pay * model.platform_fee_multiplier;
  c.human_total = task_cost * c.tasks;
  c.model_total = model.per_video_model_cost * n_videos;
  c.model_per_video = model.per_video_model_cost;
  c.human_per_video = task_cost / model.videos_per_task;
  if (n_videos > 0) c.human_effective_per_video = c.human_total / n_videos;
  return c;
}

Json to_json(const CostEstimate& c) {
  return Json{{"n_videos", c.n_videos},
              {"tasks", c.tasks},
              {"model_total", format_money(c.model_total)},
              {"human_total", format_money(c.human_total)},
              {"model_per_video", format_money(c.model_per_video, 4)},
              {"human_per_video", format_money(c.human_per_video, 4)},
              {"human_effective_per_video", format_money(c.human_effective_per_video, 4)}};
}

void write_cost_csv(std::ostream& out, const CostEstimate& c) {
  CsvWriter w(out);
  w.row({"item", "value"});
  w.row({"n_videos", std::to_string(c.n_videos)});
  w.row({"tasks", std::to_string(c.tasks)});
  w.row({"model_total", format_money(c.model_total)});
  w.row({"human_total", format_money(c.human_total)});
  w.row({"model_per_video", format_money(c.model_per_video, 4)});
  w.row({"human_per_video", format_money(c.human_per_video, 4)});
  w.row({"human_effective_per_video", format_money(c.human_effective_per_video, 4)});
}

}  // namespace harmscan
