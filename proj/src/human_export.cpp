#include "harmscan/human_export.h"

#include <algorithm>

#include "harmscan/error.h"

namespace harmscan {

HumanExportMapping HumanExportMapping::mturk() {
  HumanExportMapping m;
  m.worker_id = "WorkerId";
  m.video_id = "Input.video_id";
  m.status = "Answer.status";
  m.categories = "Answer.categories";
  m.filter = "Answer.filter";
  m.duration = "WorkTimeInSeconds";
  return m;
}

HumanExportMapping HumanExportMapping::from_json(const Json& j) { return from_json(j, HumanExportMapping{}); }

HumanExportMapping HumanExportMapping::from_json(const Json& j, const HumanExportMapping& base) {
  HumanExportMapping m = base;
  if (!j.is_object()) return m;
  m.worker_id = j.value("worker_id", m.worker_id);
  m.video_id = j.value("video_id", m.video_id);
  m.status = j.value("status", m.status);
  m.categories = j.value("categories", m.categories);
  m.filter = j.value("filter", m.filter);
  m.duration = j.value("duration", m.duration);
  return m;
}

Json HumanIngestSummary::to_json() const {
  auto pairs = [](const auto& v) {
    Json a = Json::array();
    for (const auto& [id, n] : v) a.push_back({{"video_id", id}, {"ballots", n}});
    return a;
  };
  return Json{{"rows", rows},
              {"ballots_kept", ballots_kept},
              {"rows_dropped_filter", rows_dropped_filter},
              {"rows_invalid", rows_invalid},
              {"workers", workers},
              {"workers_failed", workers_failed},
              {"workers_over_task_limit", workers_over_task_limit},
              {"under_covered", pairs(under_covered)},
              {"over_covered", pairs(over_covered)}};
}

std::string hash_worker_id(std::string_view raw, std::string_view salt) {
  std::string material(salt);
  material.push_back(':');
  material += raw;
  return sha256_hex(material).substr(0, 16);
}

namespace {

enum class FilterCell { Pass, Fail, Unknown };

FilterCell read_filter(const std::string& cell, const HumanIngestOptions& options,
                       std::optional<std::array<bool, kFilterTaskSize>>& answers_out) {
  auto v = text::normalize(cell);
  if (v == "pass" || v == "passed" || v == "true" || v == "1" || v == "yes") return FilterCell::Pass;
  if (v == "fail" || v == "failed" || v == "false" || v == "0" || v == "no") return FilterCell::Fail;
  if (v.size() == kFilterTaskSize && v.find_first_not_of("01") == std::string::npos) {
    if (!options.filter_key) {
      throw Error(ErrorKind::SchemaError, "raw filter answers need a filter key");
    }
    std::array<bool, kFilterTaskSize> answers{};
    for (std::size_t i = 0; i < kFilterTaskSize; ++i) answers[i] = v[i] == '1';
    answers_out = answers;
    return validate_filter_task(answers, *options.filter_key).passed ? FilterCell::Pass
                                                                     : FilterCell::Fail;
  }
  return FilterCell::Unknown;
}

std::optional<RawVerdict> read_verdict(const std::string& status_cell, const std::string& cats_cell) {
  auto s = text::normalize(status_cell);
  if (s == "unavailable" || s == "removed" || s == "unviewable") {
    return RawVerdict::unavailable(status_cell);
  }
  if (s != "harmful" && s != "harmless") return std::nullopt;
  CategorySet cats;
  std::string unified = cats_cell;
  for (char& c : unified) {
    if (c == ';' || c == '+' || c == '|') c = ',';
  }
  for (const auto& part : text::split(unified, ',')) {
    auto name = text::trim(part);
    if (name.empty() || text::normalize(name) == "none") continue;
    std::optional<HarmCategory> cat;
    if (name.size() == 1 && name[0] >= '1' && name[0] <= '6') {
      cat = category_from_ordinal(name[0] - '0');
    } else {
      cat = try_parse_category(name);
    }
    if (!cat) return std::nullopt;
    cats.insert(*cat);
  }
  RawVerdict v = RawVerdict::classified(
      s == "harmful" ? BinaryStatus::Harmful : BinaryStatus::Harmless, cats);
  v.raw_text = status_cell + (cats_cell.empty() ? "" : ":" + cats_cell);
  v.coerced = (s == "harmful" && cats.empty()) || (s == "harmless" && !cats.empty());
  return v;
}

}  // namespace

HumanIngestResult ingest_human_export(const CsvTable& table, const HumanExportMapping& m,
                                      const HumanIngestOptions& options) {
  const auto worker_col = table.require_column(m.worker_id);
  const auto video_col = table.require_column(m.video_id);
  const auto status_col = table.require_column(m.status);
  const auto cats_col = table.require_column(m.categories);
  const auto filter_col = table.require_column(m.filter);
  const auto duration_col = table.column(m.duration);

  HumanIngestResult result;
  auto& summary = result.summary;
  summary.rows = table.rows().size();

  // First pass: which workers failed the filter task.
  std::map<std::string, HumanTaskRecord> tasks;
  std::map<std::string, bool> failed;
  for (const auto& row : table.rows()) {
    auto raw_worker = text::trim(row[worker_col]);
    if (raw_worker.empty()) continue;
    auto wid = hash_worker_id(raw_worker, options.salt);
    auto& task = tasks[wid];
    task.worker_id = wid;
    auto cell = read_filter(row[filter_col], options, task.filter_answers);
    if (cell == FilterCell::Fail) failed[wid] = true;
    if (cell == FilterCell::Pass) failed.try_emplace(wid, false);
    if (duration_col && !text::trim(row[*duration_col]).empty()) {
      try {
        double d = std::stod(row[*duration_col]);
        task.duration_minutes = m.duration == "WorkTimeInSeconds" ? d / 60.0 : d;
      } catch (const std::exception&) {
      }
    }
  }
  summary.workers = tasks.size();

  for (const auto& row : table.rows()) {
    auto raw_worker = text::trim(row[worker_col]);
    auto video_id = text::trim(row[video_col]);
    if (raw_worker.empty() || video_id.empty()) {
      ++summary.rows_invalid;
      continue;
    }
    auto wid = hash_worker_id(raw_worker, options.salt);
    auto f = failed.find(wid);
    // Unknown filter outcome counts as not passed.
    if (f == failed.end() || f->second) {
      ++summary.rows_dropped_filter;
      continue;
    }
    auto verdict = read_verdict(row[status_col], row[cats_col]);
    if (!verdict) {
      ++summary.rows_invalid;
      continue;
    }
    Ballot b;
    b.video_id = video_id;
    b.annotator_id = "human:" + wid;
    b.verdict = std::move(*verdict);
    b.round = Round::Initial;
    tasks[wid].task_answers.push_back(b);
    result.ballots[video_id].push_back(std::move(b));
    ++summary.ballots_kept;
  }

  for (auto& [wid, task] : tasks) {
    if (failed.count(wid) == 0 || failed[wid]) ++summary.workers_failed;
    if (task.task_answers.size() > kVideosPerTask) summary.workers_over_task_limit.push_back(wid);
    result.tasks.push_back(std::move(task));
  }
  std::map<std::string, std::size_t> coverage;
  for (const auto& row : table.rows()) {
    auto vid = text::trim(row[video_col]);
    if (!vid.empty()) coverage.try_emplace(vid, 0);
  }
  for (const auto& [vid, ballots] : result.ballots) coverage[vid] = ballots.size();
  for (const auto& [vid, n] : coverage) {
    if (n < 3) summary.under_covered.emplace_back(vid, n);
    if (n > 3) summary.over_covered.emplace_back(vid, n);
  }
  return result;
}

}  // namespace harmscan
