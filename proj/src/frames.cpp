#include "harmscan/frames.h"

#include <cstdio>
#include <random>
#include <sys/wait.h>
#include <unordered_set>

#include "harmscan/error.h"

namespace harmscan {

std::vector<std::int64_t> sample_frame_indices(std::int64_t total_frames, int k,
                                               std::uint64_t seed, bool distinct) {
  if (total_frames < 2) {
    throw Error(ErrorKind::VideoTooShort, std::to_string(total_frames) + " frames");
  }
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "negative frame count");
  const std::int64_t hi = total_frames - 2;
  if (distinct && hi + 1 < k) {
    throw Error(ErrorKind::VideoTooShort,
                "cannot draw " + std::to_string(k) + " distinct frames from " +
                    std::to_string(total_frames));
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(0, hi);
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(k));
  std::unordered_set<std::int64_t> seen;
  while (static_cast<int>(out.size()) < k) {
    auto v = dist(rng);
    if (distinct && !seen.insert(v).second) continue;
    out.push_back(v);
  }
  return out;
}

std::uint64_t video_seed(std::uint64_t base_seed, std::string_view video_id) {
  // splitmix64 finalizer over the id hash
  std::uint64_t z = base_seed ^ fnv1a64(video_id);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::filesystem::path frame_path(const std::filesystem::path& root, std::string_view video_id,
                                 int k) {
  return root / std::string(video_id) / ("frame_" + std::to_string(k) + ".jpg");
}

std::filesystem::path thumbnail_path(const std::filesystem::path& root,
                                     std::string_view video_id) {
  return root / std::string(video_id) / "thumb.jpg";
}

FramePlan make_frame_plan(std::string video_id, std::int64_t total_frames,
                          std::uint64_t base_seed, const std::filesystem::path& root,
                          bool distinct) {
  FramePlan plan;
  plan.rng_seed = video_seed(base_seed, video_id);
  plan.frame_indices = sample_frame_indices(total_frames, kFramesPerVideo, plan.rng_seed, distinct);
  for (int k = 0; k < kFramesPerVideo; ++k) plan.frame_refs.push_back(frame_path(root, video_id, k));
  plan.thumbnail_ref = thumbnail_path(root, video_id);
  plan.video_id = std::move(video_id);
  return plan;
}

Json to_json(const FramePlan& plan) {
  Json refs = Json::array();
  for (const auto& p : plan.frame_refs) refs.push_back(p.string());
  return Json{{"video_id", plan.video_id},
              {"frame_indices", plan.frame_indices},
              {"thumbnail_ref", plan.thumbnail_ref.string()},
              {"frame_refs", refs},
              {"rng_seed", plan.rng_seed}};
}

FramePlan frame_plan_from_json(const Json& j) {
  FramePlan plan;
  plan.video_id = j.at("video_id").get<std::string>();
  plan.frame_indices = j.at("frame_indices").get<std::vector<std::int64_t>>();
  plan.thumbnail_ref = j.at("thumbnail_ref").get<std::string>();
  for (const auto& p : j.at("frame_refs")) plan.frame_refs.emplace_back(p.get<std::string>());
  plan.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  return plan;
}

FrameRefs find_frame_refs(const std::filesystem::path& root, std::string_view video_id) {
  FrameRefs refs;
  for (int k = 0; k < kFramesPerVideo; ++k) {
    auto p = frame_path(root, video_id, k);
    if (std::filesystem::exists(p)) refs.frames.push_back(p);
  }
  if (auto t = thumbnail_path(root, video_id); std::filesystem::exists(t)) refs.thumbnail = t;
  return refs;
}

namespace {
std::string shell_quote(const std::string& arg) {
  std::string out = "'";
  for (char c : arg) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}
}  // namespace

CommandResult run_command(const std::vector<std::string>& argv) {
  std::string cmd;
  for (const auto& a : argv) {
    if (!cmd.empty()) cmd.push_back(' ');
    cmd += shell_quote(a);
  }
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) throw Error(ErrorKind::IOError, "cannot spawn " + cmd);
  CommandResult result;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
  int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::int64_t FrameExtractor::probe(const std::string& input) const {
  auto r = run_command({tool_, "probe", input});
  if (r.exit_code != 0) {
    throw Error(ErrorKind::FetchFailed, "probe exited " + std::to_string(r.exit_code));
  }
  try {
    return std::stoll(text::trim(r.output));
  } catch (const std::exception&) {
    throw Error(ErrorKind::FetchFailed, "probe printed '" + text::trim(r.output) + "'");
  }
}

void FrameExtractor::extract(const std::string& input, const FramePlan& plan) const {
  if (plan.frame_refs.empty()) return;
  auto out_dir = plan.frame_refs.front().parent_path();
  std::filesystem::create_directories(out_dir);
  std::string indices;
  for (auto i : plan.frame_indices) {
    if (!indices.empty()) indices.push_back(',');
    indices += std::to_string(i);
  }
  auto r = run_command({tool_, "extract", input, out_dir.string(), indices});
  if (r.exit_code != 0) {
    throw Error(ErrorKind::FetchFailed, "extract exited " + std::to_string(r.exit_code));
  }
}

void FrameExtractor::thumbnail(const std::string& input, const std::filesystem::path& out) const {
  std::filesystem::create_directories(out.parent_path());
  auto r = run_command({tool_, "thumbnail", input, out.string()});
  if (r.exit_code != 0) {
    throw Error(ErrorKind::FetchFailed, "thumbnail exited " + std::to_string(r.exit_code));
  }
}

}  // namespace harmscan
