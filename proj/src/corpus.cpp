#include "harmscan/corpus.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "harmscan/error.h"
#include "harmscan/transport.h"
#include "httplib.h"

namespace harmscan {

std::string_view to_string(Availability a) {
  switch (a) {
    case Availability::Available: return "available";
    case Availability::Removed: return "removed";
    case Availability::Unknown: return "unknown";
  }
  return "unknown";
}

Availability parse_availability(std::string_view s) {
  auto key = text::normalize(s);
  if (key == "available") return Availability::Available;
  if (key == "removed") return Availability::Removed;
  if (key == "unknown" || key.empty()) return Availability::Unknown;
  throw Error(ErrorKind::SchemaError, "availability '" + std::string(s) + "'");
}

std::string_view to_string(SortFilter f) {
  return f == SortFilter::Relevance ? "relevance" : "recency";
}

SortFilter parse_sort_filter(std::string_view s) {
  auto key = text::normalize(s);
  if (key == "relevance") return SortFilter::Relevance;
  if (key == "recency" || key == "date") return SortFilter::Recency;
  throw Error(ErrorKind::SchemaError, "sort filter '" + std::string(s) + "'");
}

SourceTag SourceTag::keyword(std::string query, SortFilter filter) {
  return {Kind::Keyword, std::move(query), filter};
}
SourceTag SourceTag::channel(std::string handle) {
  return {Kind::Channel, std::move(handle), SortFilter::Relevance};
}
SourceTag SourceTag::external(std::string dataset) {
  return {Kind::External, std::move(dataset), SortFilter::Relevance};
}

std::string format_source_tag(const SourceTag& tag) {
  switch (tag.kind) {
    case SourceTag::Kind::Keyword:
      return "keyword:" + std::string(to_string(tag.filter)) + ":" + tag.value;
    case SourceTag::Kind::Channel: return "channel:" + tag.value;
    case SourceTag::Kind::External: return "external:" + tag.value;
  }
  return {};
}

SourceTag parse_source_tag(std::string_view s) {
  auto colon = s.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorKind::SchemaError, "source tag '" + std::string(s) + "'");
  }
  auto kind = s.substr(0, colon);
  auto rest = s.substr(colon + 1);
  if (kind == "channel") return SourceTag::channel(std::string(rest));
  if (kind == "external") return SourceTag::external(std::string(rest));
  if (kind == "keyword") {
    auto c2 = rest.find(':');
    if (c2 == std::string_view::npos) {
      throw Error(ErrorKind::SchemaError, "keyword tag '" + std::string(s) + "'");
    }
    return SourceTag::keyword(std::string(rest.substr(c2 + 1)),
                              parse_sort_filter(rest.substr(0, c2)));
  }
  throw Error(ErrorKind::SchemaError, "source tag kind '" + std::string(kind) + "'");
}

std::string format_date(const std::chrono::year_month_day& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::chrono::year_month_day parse_date(std::string_view s) {
  using namespace std::chrono;
  auto t = text::trim(s);
  if (t.empty()) return year_month_day{};
  int y = 0;
  unsigned m = 0, d = 0;
  if (std::sscanf(t.c_str(), "%d-%u-%u", &y, &m, &d) != 3) {
    throw Error(ErrorKind::SchemaError, "publish_date '" + t + "'");
  }
  year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) throw Error(ErrorKind::SchemaError, "publish_date '" + t + "'");
  return ymd;
}

Json to_json(const VideoRecord& r) {
  Json tags = Json::array();
  for (const auto& t : r.source_tag) tags.push_back(format_source_tag(t));
  return Json{
      {"video_id", r.video_id},
      {"url", r.url},
      {"title", r.title},
      {"channel_name", r.channel_name},
      {"description", r.description},
      {"transcript", r.transcript},
      {"publish_date", r.publish_date.ok() ? format_date(r.publish_date) : std::string()},
      {"duration_s", r.duration_s},
      {"views", r.views},
      {"source_tag", tags},
      {"harm_hint", r.harm_hint ? Json(std::string(short_name(*r.harm_hint))) : Json(nullptr)},
      {"availability", std::string(to_string(r.availability))},
  };
}

namespace {
std::string str_field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) throw Error(ErrorKind::SchemaError, std::string(key) + " must be text");
  return it->get<std::string>();
}
}  // namespace

VideoRecord video_record_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::SchemaError, "record must be an object");
  VideoRecord r;
  r.video_id = str_field(j, "video_id");
  if (r.video_id.empty()) throw Error(ErrorKind::SchemaError, "video_id");
  r.url = str_field(j, "url");
  if (r.url.empty()) r.url = "https://www.youtube.com/watch?v=" + r.video_id;
  r.title = str_field(j, "title");
  r.channel_name = str_field(j, "channel_name");
  r.description = str_field(j, "description");
  r.transcript = str_field(j, "transcript");
  r.publish_date = parse_date(str_field(j, "publish_date"));
  r.duration_s = j.value("duration_s", std::int64_t{0});
  if (r.duration_s < 0) throw Error(ErrorKind::SchemaError, "duration_s negative");
  r.views = j.value("views", std::uint64_t{0});
  if (auto it = j.find("source_tag"); it != j.end() && !it->is_null()) {
    if (it->is_string()) {
      r.source_tag.push_back(parse_source_tag(it->get<std::string>()));
    } else {
      for (const auto& t : *it) r.source_tag.push_back(parse_source_tag(t.get<std::string>()));
    }
  }
  auto hint = str_field(j, "harm_hint");
  if (!hint.empty()) r.harm_hint = parse_category(hint);
  r.availability = parse_availability(str_field(j, "availability"));
  return r;
}

std::string trim_transcript(std::string_view input, std::size_t max_words) {
  auto tokens = text::split_whitespace(input);
  if (tokens.size() > max_words) tokens.resize(max_words);
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<SearchQuery> build_search_plan(std::span<const Keyword> keywords,
                                           int per_keyword_quota, Ratio share) {
  if (per_keyword_quota < kMinKeywordQuota || per_keyword_quota > kMaxKeywordQuota) {
    throw Error(ErrorKind::QuotaOutOfRange, std::to_string(per_keyword_quota));
  }
  if (share <= 0 || share > 1) {
    throw Error(ErrorKind::InvalidArgument, "relevance share must be in (0, 1]");
  }
  const std::int64_t q = per_keyword_quota;
  const std::int64_t relevance = (2 * q * share.numerator() + share.denominator()) /
                                 (2 * share.denominator());
  std::vector<SearchQuery> plan;
  plan.reserve(2 * keywords.size());
  for (const auto& kw : keywords) {
    SearchQuery rel;
    rel.query_text = kw.text;
    rel.sort_filter = SortFilter::Relevance;
    rel.quota = static_cast<int>(relevance);
    rel.harm_hint = kw.category;
    SearchQuery rec = rel;
    rec.sort_filter = SortFilter::Recency;
    rec.quota = static_cast<int>(q - relevance);
    plan.push_back(std::move(rel));
    plan.push_back(std::move(rec));
  }
  return plan;
}

void write_search_plan_csv(std::ostream& out, std::span<const SearchQuery> plan) {
  CsvWriter w(out);
  w.row({"query_text", "sort_filter", "quota", "region", "language"});
  for (const auto& q : plan) {
    w.row({q.query_text, std::string(to_string(q.sort_filter)), std::to_string(q.quota),
           q.region, q.language});
  }
}

std::vector<Keyword> load_keywords(const std::filesystem::path& path) {
  auto table = CsvTable::read_file(path);
  auto cat = table.require_column("category");
  auto kw = table.require_column("keyword");
  std::vector<Keyword> out;
  for (const auto& row : table.rows()) {
    auto t = text::trim(row[kw]);
    if (t.empty()) continue;
    out.push_back({t, parse_category(row[cat])});
  }
  return out;
}

std::vector<std::pair<std::string, HarmCategory>> load_channels(const std::filesystem::path& path) {
  auto table = CsvTable::read_file(path);
  auto cat = table.require_column("category");
  auto ch = table.require_column("channel");
  std::vector<std::pair<std::string, HarmCategory>> out;
  for (const auto& row : table.rows()) {
    auto t = text::trim(row[ch]);
    if (!t.empty()) out.emplace_back(t, parse_category(row[cat]));
  }
  return out;
}

RemovalSignatures::RemovalSignatures(std::vector<std::string> patterns)
    : patterns_(std::move(patterns)) {
  for (auto& p : patterns_) p = text::to_lower(p);
}

RemovalSignatures RemovalSignatures::defaults() {
  return RemovalSignatures({
      "video unavailable",
      "this video has been removed",
      "this video is no longer available",
      "this video is private",
      "\"playabilitystatus\":{\"status\":\"error\"",
      "\"playabilitystatus\":{\"status\":\"unplayable\"",
      "\"playabilitystatus\":{\"status\":\"login_required\"",
      "because the youtube account associated with this video has been terminated",
      "removed for violating",
  });
}

RemovalSignatures RemovalSignatures::load(const std::filesystem::path& path) {
  return RemovalSignatures(read_list_file(path));
}

bool RemovalSignatures::matches(std::string_view body) const {
  auto lowered = text::to_lower(body);
  for (const auto& p : patterns_) {
    if (!p.empty() && lowered.find(p) != std::string::npos) return true;
  }
  return false;
}

Availability check_availability(std::string_view body, const RemovalSignatures& signatures) {
  if (text::trim(body).empty()) throw Error(ErrorKind::FetchFailed, "empty page body");
  return signatures.matches(body) ? Availability::Removed : Availability::Available;
}

Availability fetch_availability(const std::string& url, const RemovalSignatures& signatures,
                                std::chrono::seconds timeout) {
  auto parts = split_url(url);
  httplib::Client client(parts.scheme_host_port);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_follow_location(true);
  auto res = client.Get(parts.path);
  if (!res) throw Error(ErrorKind::FetchFailed, httplib::to_string(res.error()));
  if (res->status == 404 || res->status == 410) return Availability::Removed;
  if (res->status != 200) {
    throw Error(ErrorKind::FetchFailed, "HTTP " + std::to_string(res->status));
  }
  return check_availability(res->body, signatures);
}

bool Corpus::add(VideoRecord record) {
  if (auto it = index_.find(record.video_id); it != index_.end()) {
    auto& existing = records_[it->second];
    for (auto& tag : record.source_tag) {
      if (std::find(existing.source_tag.begin(), existing.source_tag.end(), tag) ==
          existing.source_tag.end()) {
        existing.source_tag.push_back(std::move(tag));
      }
    }
    return false;
  }
  index_.emplace(record.video_id, records_.size());
  records_.push_back(std::move(record));
  return true;
}

const VideoRecord* Corpus::find(std::string_view video_id) const {
  auto it = index_.find(video_id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

VideoRecord* Corpus::find_mutable(std::string_view video_id) {
  auto it = index_.find(video_id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::vector<const VideoRecord*> Corpus::with_external_tag(std::string_view dataset) const {
  std::vector<const VideoRecord*> out;
  for (const auto& r : records_) {
    for (const auto& t : r.source_tag) {
      if (t.kind == SourceTag::Kind::External && t.value == dataset) {
        out.push_back(&r);
        break;
      }
    }
  }
  return out;
}

void Corpus::store(const std::filesystem::path& path) const {
  std::vector<Json> lines;
  lines.reserve(records_.size());
  for (const auto& r : records_) lines.push_back(to_json(r));
  write_jsonl_file(path, lines);
}

Corpus Corpus::load(const std::filesystem::path& path) {
  Corpus c;
  for (const auto& j : read_jsonl_file(path)) c.add(video_record_from_json(j));
  return c;
}

Corpus merge_external(std::span<const VideoRecord> records, Corpus existing) {
  for (const auto& r : records) existing.add(r);
  return existing;
}

std::vector<VideoRecord> load_external_list(const std::filesystem::path& path) {
  auto table = CsvTable::read_file(path);
  auto id_col = table.require_column("video_id");
  auto ds_col = table.require_column("dataset");
  auto url_col = table.column("url");
  auto hint_col = table.column("harm_hint");
  std::vector<VideoRecord> out;
  for (const auto& row : table.rows()) {
    VideoRecord r;
    r.video_id = text::trim(row[id_col]);
    if (r.video_id.empty()) continue;
    r.url = url_col && !row[*url_col].empty() ? row[*url_col]
                                               : "https://www.youtube.com/watch?v=" + r.video_id;
    r.source_tag.push_back(SourceTag::external(text::trim(row[ds_col])));
    if (hint_col && !text::trim(row[*hint_col]).empty()) r.harm_hint = parse_category(row[*hint_col]);
    out.push_back(std::move(r));
  }
  return out;
}

VideoRecord ingest_record(VideoRecord record) {
  record.transcript = trim_transcript(record.transcript);
  return record;
}

void CorpusStore::append(VideoRecord record) {
  std::lock_guard lock(mu_);
  pending_.push_back(std::move(record));
}

std::size_t CorpusStore::flush() {
  std::lock_guard lock(mu_);
  std::size_t n = pending_.size();
  for (auto& r : pending_) committed_.add(std::move(r));
  pending_.clear();
  return n;
}

Corpus CorpusStore::snapshot() const {
  std::lock_guard lock(mu_);
  return committed_;
}

}  // namespace harmscan
