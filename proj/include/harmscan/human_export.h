#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "harmscan/annotators.h"
#include "harmscan/io.h"

namespace harmscan {

inline constexpr std::size_t kVideosPerTask = 25;

/// Column names in a survey-platform export.
struct HumanExportMapping {
  std::string worker_id = "worker_id";
  std::string video_id = "video_id";
  std::string status = "status";
  std::string categories = "categories";
  // pass/fail, true/false, 1/0, or the five raw 0/1 filter answers
  std::string filter = "filter_passed";
  std::string duration = "duration_min";  // optional

  // Mechanical Turk batch-results naming.
  static HumanExportMapping mturk();
  static HumanExportMapping from_json(const Json& j, const HumanExportMapping& base);
  static HumanExportMapping from_json(const Json& j);
};

struct HumanTaskRecord {
  std::string worker_id;  // hashed
  std::optional<std::array<bool, kFilterTaskSize>> filter_answers;
  std::vector<Ballot> task_answers;
  double duration_minutes = 0;
};

struct HumanIngestOptions {
  std::string salt;
  // Needed when the filter column carries raw answers.
  std::optional<std::array<bool, kFilterTaskSize>> filter_key;
};

struct HumanIngestSummary {
  std::size_t rows = 0;
  std::size_t ballots_kept = 0;
  std::size_t rows_dropped_filter = 0;
  std::size_t rows_invalid = 0;
  std::size_t workers = 0;
  std::size_t workers_failed = 0;
  std::vector<std::string> workers_over_task_limit;
  std::vector<std::pair<std::string, std::size_t>> under_covered;
  std::vector<std::pair<std::string, std::size_t>> over_covered;

  Json to_json() const;
};

struct HumanIngestResult {
  std::map<std::string, std::vector<Ballot>> ballots;  // by video_id
  std::vector<HumanTaskRecord> tasks;
  HumanIngestSummary summary;
};

std::string hash_worker_id(std::string_view raw, std::string_view salt);

// Drops every ballot of workers that failed the filter task, groups the rest
// by video, and lists videos without exactly three ballots. Throws
// SchemaError naming a missing required column.
HumanIngestResult ingest_human_export(const CsvTable& table, const HumanExportMapping& mapping = {},
                                      const HumanIngestOptions& options = {});

}  // namespace harmscan
