#include <doctest.h>

#include <filesystem>
#include <algorithm>
#include <sstream>
#include <thread>

#include "harmscan/corpus.h"
#include "harmscan/error.h"

using namespace harmscan;
namespace fs = std::filesystem;

namespace {

VideoRecord sample(std::string id) {
  VideoRecord r;
  r.video_id = std::move(id);
  r.url = "https://www.youtube.com/watch?v=" + r.video_id;
  r.title = "Title, with \"quotes\"";
  r.channel_name = "@chan";
  r.description = "line one\nline two";
  r.transcript = "a b c";
  r.publish_date = std::chrono::year{2023} / 11 / 5;
  r.duration_s = 61;
  r.views = 12345;
  r.source_tag = {SourceTag::keyword("chemtrails", SortFilter::Recency)};
  r.harm_hint = HarmCategory::Information;
  r.availability = Availability::Available;
  return r;
}

fs::path temp_file(const std::string& name) {
  auto dir = fs::temp_directory_path() / "harmscan_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("search plan splits 7:3 with half-up rounding") {
  std::vector<Keyword> kw{{"self-harm", HarmCategory::Physical}};
  auto plan = build_search_plan(kw, 100);
  REQUIRE(plan.size() == 2);
  CHECK(plan[0].sort_filter == SortFilter::Relevance);
  CHECK(plan[0].quota == 70);
  CHECK(plan[1].quota == 30);
  CHECK(plan[0].region == "US");
  CHECK(plan[0].language == "en");
  CHECK(plan[0].harm_hint == HarmCategory::Physical);

  plan = build_search_plan(kw, 75);
  CHECK(plan[0].quota == 53);
  CHECK(plan[1].quota == 22);

  plan = build_search_plan(kw, 50, Ratio(1));
  CHECK(plan[0].quota == 50);
  CHECK(plan[1].quota == 0);
}

TEST_CASE("search plan quotas always sum to the request") {
  std::vector<Keyword> kw{{"a", HarmCategory::Sexual}, {"b", HarmCategory::Clickbait}};
  for (int q = kMinKeywordQuota; q <= kMaxKeywordQuota; ++q) {
    for (int t = 1; t <= 10; ++t) {
      auto plan = build_search_plan(kw, q, Ratio(t, 10));
      REQUIRE(plan.size() == 4);
      CHECK(plan[0].quota + plan[1].quota == q);
      CHECK(plan[2].quota + plan[3].quota == q);
      CHECK(plan[0].quota >= 0);
      CHECK(plan[1].quota >= 0);
    }
  }
}

TEST_CASE("search plan rejects quotas outside 50..500") {
  std::vector<Keyword> kw{{"a", HarmCategory::Sexual}};
  for (int q : {0, 49, 501}) {
    try {
      build_search_plan(kw, q);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::QuotaOutOfRange);
    }
  }
}

TEST_CASE("search plan CSV header") {
  std::vector<Keyword> kw{{"flat Earth, evidence", HarmCategory::Information}};
  std::ostringstream out;
  write_search_plan_csv(out, build_search_plan(kw, 100));
  auto s = out.str();
  CHECK(s.rfind("query_text,sort_filter,quota,region,language", 0) == 0);
  CHECK(s.find("\"flat Earth, evidence\"") != std::string::npos);
}

TEST_CASE("transcript trimming") {
  CHECK(trim_transcript("") == "");
  CHECK(trim_transcript("  a\t b \n c ") == "a b c");
  std::string many;
  for (int i = 0; i < 3001; ++i) many += "w ";
  auto out = trim_transcript(many);
  CHECK(std::count(out.begin(), out.end(), 'w') == 3000);
  CHECK(trim_transcript(out) == out);
  CHECK(trim_transcript("a b c d", 2) == "a b");
  CHECK(trim_transcript("a b", 0) == "");
}

TEST_CASE("source tag text form") {
  for (const auto& t : {SourceTag::keyword("vaccine dangers", SortFilter::Relevance), SourceTag::channel("@mgtow"),
                        SourceTag::external("YouNICon")}) {
    CHECK(parse_source_tag(format_source_tag(t)) == t);
  }
}

TEST_CASE("record JSON and corpus file round trip") {
  Corpus c;
  c.add(sample("abc123"));
  auto second = sample("def456");
  second.harm_hint.reset();
  second.transcript.clear();
  second.availability = Availability::Removed;
  c.add(second);
  auto path = temp_file("corpus.jsonl");
  c.store(path);
  auto loaded = Corpus::load(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded.records()[0] == c.records()[0]);
  CHECK(loaded.records()[1] == c.records()[1]);
  CHECK(to_json(sample("x")).at("publish_date") == "2023-11-05");
}

TEST_CASE("duplicate add keeps first record and appends provenance") {
  Corpus c;
  CHECK(c.add(sample("v1")));
  auto dup = sample("v1");
  dup.harm_hint = HarmCategory::Sexual;
  dup.source_tag = {SourceTag::channel("@other")};
  CHECK_FALSE(c.add(dup));
  REQUIRE(c.size() == 1);
  const auto* r = c.find("v1");
  CHECK(r->harm_hint == HarmCategory::Information);
  CHECK(r->source_tag.size() == 2);
}

TEST_CASE("merge_external unions by id") {
  Corpus base;
  base.add(sample("a"));
  base.add(sample("b"));
  base.add(sample("c"));
  std::vector<VideoRecord> ext;
  for (auto id : {"c", "d", "e"}) {
    VideoRecord r;
    r.video_id = id;
    r.source_tag = {SourceTag::external("YouNICon")};
    ext.push_back(r);
  }
  auto merged = merge_external(ext, base);
  CHECK(merged.size() == 5);
  CHECK(merged.with_external_tag("YouNICon").size() == 3);
  CHECK(merged.find("c")->title == sample("c").title);
}

TEST_CASE("availability from page bodies") {
  auto sigs = RemovalSignatures::defaults();
  CHECK(check_availability("<html>Video unavailable. This video has been removed</html>", sigs) == Availability::Removed);
  CHECK(check_availability("<html><div id=player>ok</div></html>", sigs) == Availability::Available);
  try {
    check_availability("", sigs);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FetchFailed);
  }
}

TEST_CASE("ingest trims transcripts") {
  auto r = sample("t");
  r.transcript = std::string(4000 * 2, ' ');
  for (int i = 0; i < 4000; ++i) r.transcript[2 * i] = 'x';
  auto out = ingest_record(r);
  CHECK(std::count(out.transcript.begin(), out.transcript.end(), 'x') == 3000);
}

TEST_CASE("concurrent appends are all visible after flush") {
  CorpusStore store;
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 50; ++i) store.append(sample("v" + std::to_string(t * 100 + i)));
    });
  }
  for (auto& th : threads) th.join();
  store.flush();
  CHECK(store.snapshot().size() == 200);
}

TEST_CASE("keyword and channel seed lists load") {
  auto kw = load_keywords(fs::path(HARMSCAN_SOURCE_DIR) / "config/keywords.csv");
  CHECK(kw.size() > 100);
  auto ch = load_channels(fs::path(HARMSCAN_SOURCE_DIR) / "config/channels.csv");
  CHECK(ch.size() > 80);
  bool saw_phys = false;
  for (const auto& [h, c] : ch) saw_phys |= c == HarmCategory::Physical;
  CHECK(saw_phys);
}

}
