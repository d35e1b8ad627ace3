#include "sgpad/blur.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <opencv2/imgproc.hpp>

#include "sgpad/image_io.hpp"

namespace sgpad {

void BlurConfig::validate() const {
  require(!radii.empty(), ErrorCode::InvalidArgument, "blur radii must be non-empty");
  for (int r : radii) require(r > 0, ErrorCode::InvalidArgument, "blur radii must be > 0");
  require(mask_smoothing_radius >= 0, ErrorCode::InvalidArgument,
          "mask smoothing radius must be >= 0");
}

namespace {

cv::Mat to_mat(const Grid& g) {
  cv::Mat m(static_cast<int>(g.rows()), static_cast<int>(g.cols()), CV_64F);
  std::copy(g.values().begin(), g.values().end(), m.ptr<double>(0));
  return m;
}

Grid from_mat(const cv::Mat& m) {
  const double* p = m.ptr<double>(0);
  return Grid(static_cast<std::size_t>(m.rows), static_cast<std::size_t>(m.cols),
              std::vector<double>(p, p + m.total()));
}

}  // namespace

Image gaussian_blur(const Image& image, int radius) {
  require(radius >= 0, ErrorCode::InvalidArgument, "blur radius must be >= 0");
  require(!image.empty(), ErrorCode::InvalidArgument, "cannot blur an empty image");
  if (radius == 0) return image;
  const double sigma = radius / 2.0;
  const int half = static_cast<int>(std::ceil(3.0 * sigma));
  const int ksize = 2 * half + 1;
  cv::Mat src = to_mat(image), dst;
  cv::GaussianBlur(src, dst, cv::Size(ksize, ksize), sigma, sigma, cv::BORDER_REFLECT);
  return from_mat(dst);
}

Image blur_nonsalient(const Image& image, const SaliencyMap& saliency, int radius,
                      const BlurConfig& config) {
  config.validate();
  require(image.same_shape(saliency.values()), ErrorCode::Dimension,
          "image and saliency dimensions differ");
  Grid mask = gaussian_blur(saliency.values(), config.mask_smoothing_radius);
  // Kernel normalization leaves ~1e-16 residue on flat regions; snap it so
  // fully salient areas pass through bit-exactly.
  for (double& m : mask.values()) {
    m = std::clamp(m, 0.0, 1.0);
    if (m > 1.0 - 1e-12) m = 1.0;
    if (m < 1e-12) m = 0.0;
  }
  const Image blurred = gaussian_blur(image, radius);
  Image out(image.rows(), image.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double m = mask[i];
    out[i] = m == 1.0 ? image[i] : m == 0.0 ? blurred[i] : m * image[i] + (1.0 - m) * blurred[i];
  }
  return out;
}

std::string ExpandedImage::file_name(const std::string& ext) const {
  return sample_id + (radius == 0 ? "__orig" : "__blur" + std::to_string(radius)) + "." + ext;
}

std::vector<ExpandedImage> expand_saliency_guided(const std::vector<GuidedSample>& samples,
                                                  const BlurConfig& config) {
  config.validate();
  for (const auto& s : samples)
    require(s.saliency.has_value(), ErrorCode::Precondition,
            "sample '" + s.sample_id + "' has no saliency map");
  std::vector<ExpandedImage> out;
  out.reserve(samples.size() * config.radii.size());
  for (const auto& s : samples)
    for (int r : config.radii)
      out.push_back({s.sample_id, r, blur_nonsalient(s.image, *s.saliency, r, config)});
  return out;
}

std::vector<ExpandedImage> expand_control(const std::vector<ControlSample>& samples,
                                          const BlurConfig& config) {
  config.validate();
  std::vector<ExpandedImage> out;
  out.reserve(samples.size() * (config.radii.size() + 1));
  for (const auto& s : samples) {
    out.push_back({s.sample_id, 0, s.image});
    for (int r : config.radii) out.push_back({s.sample_id, r, gaussian_blur(s.image, r)});
  }
  return out;
}

std::vector<std::string> write_expansion(const std::vector<ExpandedImage>& images,
                                         const std::string& dir, const std::string& ext) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> paths;
  std::ostringstream csv;
  csv << "output_path,sample_id,radius\n";
  for (const auto& e : images) {
    const std::string path = (fs::path(dir) / e.file_name(ext)).string();
    save_gray(e.image, path);
    csv << path << ',' << e.sample_id << ',' << e.radius << '\n';
    paths.push_back(path);
  }
  write_file_atomic((fs::path(dir) / "expansion.csv").string(), csv.str());
  return paths;
}

}  // namespace sgpad
