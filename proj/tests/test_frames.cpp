#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "harmscan/error.h"
#include "harmscan/frames.h"

using namespace harmscan;
namespace fs = std::filesystem;

TEST_SUITE("frames") {

TEST_CASE("two-frame video only admits index 0") {
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    auto v = sample_frame_indices(2, 15, seed);
    CHECK(v == std::vector<std::int64_t>(15, 0));
  }
}

TEST_CASE("draws are deterministic and within range") {
  auto a = sample_frame_indices(1000, 15, 7);
  auto b = sample_frame_indices(1000, 15, 7);
  CHECK(a == b);
  CHECK(a != sample_frame_indices(1000, 15, 8));
  for (auto i : a) {
    CHECK(i >= 0);
    CHECK(i <= 998);
  }
}

TEST_CASE("too short videos are rejected") {
  for (std::int64_t total : {0, 1}) {
    try {
      sample_frame_indices(total, 15, 1);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::VideoTooShort);
    }
  }
  CHECK_THROWS_AS(sample_frame_indices(10, 15, 1, true), Error);
}

TEST_CASE("distinct mode never repeats") {
  auto v = sample_frame_indices(20, 15, 3, true);
  std::sort(v.begin(), v.end());
  CHECK(std::adjacent_find(v.begin(), v.end()) == v.end());
  CHECK(v.back() <= 18);
}

TEST_CASE("frame plan paths and JSON") {
  auto plan = make_frame_plan("vid1", 500, 42, "frames");
  CHECK(plan.frame_indices.size() == kFramesPerVideo);
  REQUIRE(plan.frame_refs.size() == kFramesPerVideo);
  CHECK(plan.frame_refs[0] == fs::path("frames/vid1/frame_0.jpg"));
  CHECK(plan.frame_refs[14] == fs::path("frames/vid1/frame_14.jpg"));
  CHECK(plan.thumbnail_ref == fs::path("frames/vid1/thumb.jpg"));
  CHECK(plan.rng_seed == video_seed(42, "vid1"));
  auto back = frame_plan_from_json(to_json(plan));
  CHECK(back.frame_indices == plan.frame_indices);
  CHECK(back.frame_refs == plan.frame_refs);
  CHECK(back.rng_seed == plan.rng_seed);
}

TEST_CASE("per-video seeds differ") {
  CHECK(video_seed(1, "a") != video_seed(1, "b"));
  CHECK(video_seed(1, "a") != video_seed(2, "a"));
}

TEST_CASE("frame refs find existing files in k order") {
  auto root = fs::temp_directory_path() / "harmscan_tests" / "frames_refs";
  fs::remove_all(root);
  fs::create_directories(root / "v");
  for (int k : {0, 1, 2, 10}) std::ofstream(frame_path(root, "v", k)) << "x";
  auto refs = find_frame_refs(root, "v");
  REQUIRE(refs.frames.size() == 4);
  CHECK(refs.frames[3] == frame_path(root, "v", 10));
  CHECK(refs.thumbnail.empty());
  std::ofstream(thumbnail_path(root, "v")) << "x";
  CHECK(find_frame_refs(root, "v").thumbnail == thumbnail_path(root, "v"));
}

TEST_CASE("extractor surfaces tool failures as FetchFailed") {
  FrameExtractor ex("false");
  try {
    ex.probe("nothing.mp4");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FetchFailed);
  }
}

}
