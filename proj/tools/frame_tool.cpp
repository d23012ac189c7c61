// Reference frame-extraction tool.
//
//   harmscan-frame-tool probe <input>
//   harmscan-frame-tool extract <input> <out_dir> <i0,i1,...>
//   harmscan-frame-tool thumbnail <input> <out_path>
//
// probe prints the frame count. extract writes frame_<k>.jpg for the k-th
// listed index. thumbnail writes the first decodable frame.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/videoio.hpp>

namespace {

int fail(const std::string& msg) {
  std::fprintf(stderr, "harmscan-frame-tool: %s\n", msg.c_str());
  return 1;
}

bool open(cv::VideoCapture& cap, const std::string& input) {
  return cap.open(input) && cap.isOpened();
}

bool read_at(cv::VideoCapture& cap, long index, cv::Mat& frame) {
  cap.set(cv::CAP_PROP_POS_FRAMES, static_cast<double>(index));
  return cap.read(frame) && !frame.empty();
}

std::vector<long> parse_indices(const std::string& list) {
  std::vector<long> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    auto comma = list.find(',', pos);
    if (comma == std::string::npos) comma = list.size();
    if (comma > pos) out.push_back(std::stol(list.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) return fail("usage: probe|extract|thumbnail <input> ...");
  const std::string cmd = argv[1];
  const std::string input = argv[2];
  cv::VideoCapture cap;
  if (!open(cap, input)) return fail("cannot open " + input);

  if (cmd == "probe") {
    const auto n = static_cast<long>(cap.get(cv::CAP_PROP_FRAME_COUNT));
    std::printf("%ld\n", n);
    return n > 0 ? 0 : fail("no frame count for " + input);
  }
  if (cmd == "extract") {
    if (argc < 5) return fail("extract needs <out_dir> <indices>");
    const std::filesystem::path dir = argv[3];
    std::vector<long> indices;
    try {
      indices = parse_indices(argv[4]);
    } catch (const std::exception&) {
      return fail("bad index list");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    cv::Mat frame;
    for (std::size_t k = 0; k < indices.size(); ++k) {
      if (!read_at(cap, indices[k], frame)) return fail("cannot decode frame " + std::to_string(indices[k]));
      const auto path = dir / ("frame_" + std::to_string(k) + ".jpg");
      if (!cv::imwrite(path.string(), frame)) return fail("cannot write " + path.string());
    }
    return 0;
  }
  if (cmd == "thumbnail") {
    if (argc < 4) return fail("thumbnail needs <out_path>");
    cv::Mat frame;
    if (!read_at(cap, 0, frame)) return fail("cannot decode first frame");
    const std::filesystem::path out = argv[3];
    std::error_code ec;
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path(), ec);
    return cv::imwrite(out.string(), frame) ? 0 : fail("cannot write " + out.string());
  }
  return fail("unknown command " + cmd);
}
