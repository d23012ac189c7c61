#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "harmscan/error.h"
#include "harmscan/io.h"
#include "harmscan/promptkit.h"

namespace harmscan {

std::pair<int, int> fit_within(int width, int height, int max_edge) {
  if (width <= 0 || height <= 0) throw Error(ErrorKind::InvalidArgument, "empty image");
  const int longest = std::max(width, height);
  if (longest <= max_edge) return {width, height};
  auto scale = [&](int edge) {
    // half-up rounding of edge * max_edge / longest
    std::int64_t v = (2LL * edge * max_edge + longest) / (2LL * longest);
    return static_cast<int>(std::max<std::int64_t>(1, v));
  };
  return width >= height ? std::pair{max_edge, scale(height)} : std::pair{scale(width), max_edge};
}

namespace {

ImagePayload encode_image(const std::filesystem::path& path, int max_edge) {
  cv::Mat img = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (img.empty()) throw Error(ErrorKind::ImageDecodeError, path.string());
  auto [w, h] = fit_within(img.cols, img.rows, max_edge);
  if (w != img.cols || h != img.rows) {
    cv::Mat resized;
    cv::resize(img, resized, cv::Size(w, h), 0, 0, cv::INTER_AREA);
    img = resized;
  }
  auto ext = text::to_lower(path.extension().string());
  const bool png = ext == ".png";
  std::vector<unsigned char> buf;
  if (!cv::imencode(png ? ".png" : ".jpg", img, buf)) {
    throw Error(ErrorKind::ImageDecodeError, "cannot encode " + path.string());
  }
  return ImagePayload{png ? "image/png" : "image/jpeg", base64_encode(buf), img.cols, img.rows};
}

}  // namespace

PreparedImages prepare_images(std::span<const std::filesystem::path> frame_refs,
                              const std::filesystem::path& thumbnail_ref, int max_edge) {
  PreparedImages out;
  if (frame_refs.empty()) {
    out.degraded = true;
    out.warnings.push_back("no frames; prompt sent without images");
    return out;
  }
  const std::size_t n = std::min(frame_refs.size(), kPromptFrames);
  if (n < kPromptFrames) {
    out.warnings.push_back("only " + std::to_string(n) + " frames available");
  }
  for (std::size_t i = 0; i < n; ++i) out.payloads.push_back(encode_image(frame_refs[i], max_edge));
  if (thumbnail_ref.empty() || !std::filesystem::exists(thumbnail_ref)) {
    out.warnings.push_back("missing thumbnail");
  } else {
    out.payloads.push_back(encode_image(thumbnail_ref, max_edge));
  }
  return out;
}

}  // namespace harmscan
