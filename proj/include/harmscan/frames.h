#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "harmscan/io.h"

namespace harmscan {

inline constexpr int kFramesPerVideo = 15;

// k indices drawn uniformly from [0, total_frames - 2] (the last frame is
// never used). Draws are independent, so duplicates may occur unless
// `distinct` is set. Throws VideoTooShort when total_frames < 2.
std::vector<std::int64_t> sample_frame_indices(std::int64_t total_frames, int k,
                                               std::uint64_t seed, bool distinct = false);

// Per-video seed derived from a run seed and the id, stable across runs.
std::uint64_t video_seed(std::uint64_t base_seed, std::string_view video_id);

struct FramePlan {
  std::string video_id;
  std::vector<std::int64_t> frame_indices;
  std::filesystem::path thumbnail_ref;
  std::vector<std::filesystem::path> frame_refs;
  std::uint64_t rng_seed = 0;
};

// Paths follow frames/<video_id>/frame_<k>.jpg and frames/<video_id>/thumb.jpg.
std::filesystem::path frame_path(const std::filesystem::path& frames_root,
                                 std::string_view video_id, int k);
std::filesystem::path thumbnail_path(const std::filesystem::path& frames_root,
                                     std::string_view video_id);

FramePlan make_frame_plan(std::string video_id, std::int64_t total_frames,
                          std::uint64_t base_seed, const std::filesystem::path& frames_root,
                          bool distinct = false);

Json to_json(const FramePlan& plan);
FramePlan frame_plan_from_json(const Json& j);

struct FrameRefs {
  std::vector<std::filesystem::path> frames;  // in k order, existing files only
  std::filesystem::path thumbnail;            // empty when missing
};
FrameRefs find_frame_refs(const std::filesystem::path& frames_root, std::string_view video_id);

struct CommandResult {
  int exit_code = 0;
  std::string output;  // captured stdout
};

// Runs argv through the shell with every argument single-quoted.
CommandResult run_command(const std::vector<std::string>& argv);

/// Boundary to an external frame-extraction program. Contract:
///   <tool> probe <input>                      prints the total frame count
///   <tool> extract <input> <out_dir> <i0,..>  writes out_dir/frame_<k>.jpg
///   <tool> thumbnail <input> <out_path>       writes the thumbnail image
/// A non-zero exit status is reported as FetchFailed.
class FrameExtractor {
 public:
  explicit FrameExtractor(std::string tool) : tool_(std::move(tool)) {}

  std::int64_t probe(const std::string& input) const;
  void extract(const std::string& input, const FramePlan& plan) const;
  void thumbnail(const std::string& input, const std::filesystem::path& out) const;

 private:
  std::string tool_;
};

}  // namespace harmscan
