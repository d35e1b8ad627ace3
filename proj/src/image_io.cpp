#include "sgpad/image_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <opencv2/imgcodecs.hpp>

namespace sgpad {

std::uint8_t quantize(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

Grid load_gray_levels(const std::string& path) {
  cv::Mat m = cv::imread(path, cv::IMREAD_GRAYSCALE);
  require(!m.empty(), ErrorCode::Io, "cannot read image '" + path + "'");
  Grid g(static_cast<std::size_t>(m.rows), static_cast<std::size_t>(m.cols));
  for (int r = 0; r < m.rows; ++r) {
    const auto* row = m.ptr<std::uint8_t>(r);
    for (int c = 0; c < m.cols; ++c)
      g(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = row[c];
  }
  return g;
}

Image load_gray(const std::string& path) {
  Grid g = load_gray_levels(path);
  for (double& v : g.values()) v /= 255.0;
  return g;
}

void save_gray(const Image& img, const std::string& path) {
  require(!img.empty(), ErrorCode::InvalidArgument, "cannot save an empty image");
  cv::Mat m(static_cast<int>(img.rows()), static_cast<int>(img.cols()), CV_8UC1);
  for (int r = 0; r < m.rows; ++r) {
    auto* row = m.ptr<std::uint8_t>(r);
    for (int c = 0; c < m.cols; ++c)
      row[c] = quantize(img(static_cast<std::size_t>(r), static_cast<std::size_t>(c)));
  }
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  require(cv::imwrite(path, m), ErrorCode::Io, "cannot write image '" + path + "'");
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  static std::atomic<unsigned long> counter{0};
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    require(static_cast<bool>(out), ErrorCode::Io, "write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sgpad
