#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "harmscan/io.h"
#include "harmscan/taxonomy.h"

namespace harmscan {

using Ratio = boost::rational<std::int64_t>;

enum class Availability : std::uint8_t { Available, Removed, Unknown };
std::string_view to_string(Availability a);
Availability parse_availability(std::string_view s);

enum class SortFilter : std::uint8_t { Relevance, Recency };
std::string_view to_string(SortFilter f);
SortFilter parse_sort_filter(std::string_view s);

/// Where a record came from. Text form: "keyword:<filter>:<query>",
/// "channel:<handle>", "external:<dataset>".
struct SourceTag {
  enum class Kind : std::uint8_t { Keyword, Channel, External };

  Kind kind = Kind::External;
  std::string value;
  SortFilter filter = SortFilter::Relevance;  // keyword tags only

  static SourceTag keyword(std::string query, SortFilter filter);
  static SourceTag channel(std::string handle);
  static SourceTag external(std::string dataset);

  friend bool operator==(const SourceTag&, const SourceTag&) = default;
};
std::string format_source_tag(const SourceTag& tag);
SourceTag parse_source_tag(std::string_view text);

struct VideoRecord {
  std::string video_id;
  std::string url;
  std::string title;
  std::string channel_name;
  std::string description;
  std::string transcript;
  std::chrono::year_month_day publish_date{};
  std::int64_t duration_s = 0;
  std::uint64_t views = 0;
  // Primary provenance first; merges append.
  std::vector<SourceTag> source_tag;
  std::optional<HarmCategory> harm_hint;
  Availability availability = Availability::Unknown;

  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

std::string format_date(const std::chrono::year_month_day& d);
// Accepts YYYY-MM-DD (a trailing time part is ignored); empty -> default date.
std::chrono::year_month_day parse_date(std::string_view s);

Json to_json(const VideoRecord& r);
VideoRecord video_record_from_json(const Json& j);

inline constexpr std::size_t kMaxTranscriptWords = 3000;

// First max_words whitespace-delimited tokens joined by single spaces.
std::string trim_transcript(std::string_view text, std::size_t max_words = kMaxTranscriptWords);

struct Keyword {
  std::string text;
  HarmCategory category;
};

struct SearchQuery {
  std::string query_text;
  SortFilter sort_filter = SortFilter::Relevance;
  int quota = 0;
  std::string region = "US";
  std::string language = "en";
  std::optional<HarmCategory> harm_hint;
};

inline constexpr int kMinKeywordQuota = 50;
inline constexpr int kMaxKeywordQuota = 500;

// One Relevance and one Recency query per keyword. The Relevance share is
// round-half-up(quota * ratio); Recency receives the remainder.
std::vector<SearchQuery> build_search_plan(std::span<const Keyword> keywords,
                                           int per_keyword_quota, Ratio relevance_share = Ratio(7, 10));
void write_search_plan_csv(std::ostream& out, std::span<const SearchQuery> plan);

// Seed lists: CSV with columns category,keyword (or category,channel).
std::vector<Keyword> load_keywords(const std::filesystem::path& path);
std::vector<std::pair<std::string, HarmCategory>> load_channels(const std::filesystem::path& path);

/// Substrings whose presence in a watch page marks the video as removed.
class RemovalSignatures {
 public:
  RemovalSignatures() = default;
  explicit RemovalSignatures(std::vector<std::string> patterns);
  static RemovalSignatures defaults();
  static RemovalSignatures load(const std::filesystem::path& path);

  // Case-insensitive substring match.
  bool matches(std::string_view body) const;
  const std::vector<std::string>& patterns() const { return patterns_; }

 private:
  std::vector<std::string> patterns_;
};

// Empty bodies signal a transport failure and throw FetchFailed.
Availability check_availability(std::string_view page_body, const RemovalSignatures& signatures);
// GET the page and classify it. Non-200 or connection errors throw FetchFailed.
Availability fetch_availability(const std::string& url, const RemovalSignatures& signatures,
                                std::chrono::seconds timeout = std::chrono::seconds(20));

/// Records keyed by video_id, in insertion order.
class Corpus {
 public:
  // Returns false when the id already existed. The existing record wins;
  // the incoming source tags are appended to its provenance.
  bool add(VideoRecord record);

  std::size_t size() const noexcept { return records_.size(); }
  const std::vector<VideoRecord>& records() const noexcept { return records_; }
  const VideoRecord* find(std::string_view video_id) const;
  VideoRecord* find_mutable(std::string_view video_id);
  std::vector<const VideoRecord*> with_external_tag(std::string_view dataset) const;

  void store(const std::filesystem::path& path) const;
  static Corpus load(const std::filesystem::path& path);

 private:
  std::vector<VideoRecord> records_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Union by video_id; colliding ids keep the existing record.
Corpus merge_external(std::span<const VideoRecord> records, Corpus existing);

// Id+dataset import: CSV with video_id and dataset columns (optional url,
// harm_hint).
std::vector<VideoRecord> load_external_list(const std::filesystem::path& path);

// Normalizes a fetched record for the corpus: trims the transcript.
VideoRecord ingest_record(VideoRecord record);

/// Concurrent appends go through one queue; readers see committed records
/// after flush().
class CorpusStore {
 public:
  explicit CorpusStore(Corpus initial = {}) : committed_(std::move(initial)) {}

  void append(VideoRecord record);
  // Applies queued appends in arrival order; returns the number applied.
  std::size_t flush();
  Corpus snapshot() const;

 private:
  mutable std::mutex mu_;
  std::vector<VideoRecord> pending_;
  Corpus committed_;
};

}  // namespace harmscan
