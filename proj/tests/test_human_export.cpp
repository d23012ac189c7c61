#include <doctest.h>

#include <sstream>

#include "harmscan/error.h"
#include "harmscan/human_export.h"

using namespace harmscan;

namespace {

CsvTable table(const std::string& csv) {
  std::istringstream in(csv);
  return CsvTable::parse(in);
}

}  // namespace

TEST_SUITE("human_export") {

TEST_CASE("failed workers lose every ballot") {
  auto t = table(
      "worker_id,video_id,status,categories,filter_passed\n"
      "w1,v1,harmful,info+click,pass\n"
      "w1,v2,harmless,,pass\n"
      "w2,v1,harmful,info,pass\n"
      "w3,v1,harmful,sex,fail\n"
      "w3,v2,harmful,sex,fail\n"
      "w4,v1,unavailable,,pass\n");
  auto r = ingest_human_export(t);
  CHECK(r.summary.rows == 6);
  CHECK(r.summary.rows_dropped_filter == 2);
  CHECK(r.summary.ballots_kept == 4);
  CHECK(r.summary.workers == 4);
  CHECK(r.summary.workers_failed == 1);
  REQUIRE(r.ballots.count("v1"));
  CHECK(r.ballots["v1"].size() == 3);
  CHECK(r.ballots["v1"][2].verdict.kind == RawVerdict::Kind::Unavailable);
  CHECK(r.ballots["v1"][0].verdict.categories == CategorySet{HarmCategory::Information, HarmCategory::Clickbait});
  // v2 lost w3's ballot; only one survives
  REQUIRE(r.summary.under_covered.size() == 1);
  CHECK(r.summary.under_covered[0] == std::pair<std::string, std::size_t>{"v2", 1});
}

TEST_CASE("videos whose ballots were all dropped still show as under-covered") {
  auto t = table(
      "worker_id,video_id,status,categories,filter_passed\n"
      "w1,v9,harmful,info,fail\n");
  auto r = ingest_human_export(t);
  REQUIRE(r.summary.under_covered.size() == 1);
  CHECK(r.summary.under_covered[0].second == 0);
}

TEST_CASE("raw filter answers are scored against the key") {
  auto t = table(
      "worker_id,video_id,status,categories,filter_passed\n"
      "a,v1,harmless,,10110\n"
      "b,v1,harmless,,10111\n"
      "c,v1,harmless,,01001\n");
  HumanIngestOptions opts;
  opts.filter_key = std::array<bool, 5>{true, false, true, true, false};
  auto r = ingest_human_export(t, {}, opts);
  CHECK(r.summary.ballots_kept == 2);
  CHECK(r.summary.workers_failed == 1);
  CHECK_THROWS_AS(ingest_human_export(t), Error);
}

TEST_CASE("worker ids are salted hashes") {
  auto t = table(
      "worker_id,video_id,status,categories,filter_passed\n"
      "A1B2C3,v1,harmless,,pass\n");
  HumanIngestOptions opts;
  opts.salt = "s";
  auto r = ingest_human_export(t, {}, opts);
  const auto& b = r.ballots["v1"][0];
  CHECK(b.annotator_id == "human:" + hash_worker_id("A1B2C3", "s"));
  CHECK(b.annotator_id.find("A1B2C3") == std::string::npos);
  CHECK(hash_worker_id("A1B2C3", "s").size() == 16);
  CHECK(hash_worker_id("A1B2C3", "s") != hash_worker_id("A1B2C3", "t"));
}

TEST_CASE("mturk column names and invalid rows") {
  auto t = table(
      "WorkerId,Input.video_id,Answer.status,Answer.categories,Answer.filter,WorkTimeInSeconds\n"
      "w,v1,harmful,1;6,pass,600\n"
      "w,v2,maybe,,pass,600\n"
      "w,v3,harmful,violence,pass,600\n");
  auto r = ingest_human_export(t, HumanExportMapping::mturk());
  CHECK(r.summary.ballots_kept == 1);
  CHECK(r.summary.rows_invalid == 2);
  CHECK(r.ballots["v1"][0].verdict.categories == CategorySet{HarmCategory::Information, HarmCategory::Physical});
  REQUIRE(r.tasks.size() == 1);
  CHECK(r.tasks[0].duration_minutes == doctest::Approx(10.0));
}

TEST_CASE("missing columns are schema errors") {
  auto t = table("worker_id,video_id\nw,v\n");
  try {
    ingest_human_export(t);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaError);
  }
}

TEST_CASE("over-covered videos are reported") {
  std::string csv = "worker_id,video_id,status,categories,filter_passed\n";
  for (int w = 0; w < 4; ++w) csv += "w" + std::to_string(w) + ",v1,harmless,,pass\n";
  auto r = ingest_human_export(table(csv));
  REQUIRE(r.summary.over_covered.size() == 1);
  CHECK(r.summary.over_covered[0].second == 4);
}

}
