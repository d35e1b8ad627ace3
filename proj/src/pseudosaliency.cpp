#include "sgpad/pseudosaliency.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sgpad/image_io.hpp"

namespace sgpad {

SaliencyMap minutiae_saliency(const std::vector<MinutiaPoint>& points, std::size_t rows,
                              std::size_t cols, double radius) {
  require(radius > 0.0, ErrorCode::InvalidArgument, "minutia radius must be positive");
  require(rows > 0 && cols > 0, ErrorCode::Dimension, "minutiae map needs positive dims");
  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    const auto& p = points[idx];
    require(p.x >= 0.0 && p.y >= 0.0 && p.x < static_cast<double>(cols) &&
                p.y < static_cast<double>(rows),
            ErrorCode::InvalidArgument,
            "minutia " + std::to_string(idx) + " lies outside the image");
  }
  Grid out(rows, cols);
  for (const auto& p : points) {
    const auto r0 = static_cast<long>(std::floor(p.y - radius));
    const auto r1 = static_cast<long>(std::ceil(p.y + radius));
    const auto c0 = static_cast<long>(std::floor(p.x - radius));
    const auto c1 = static_cast<long>(std::ceil(p.x + radius));
    for (long r = std::max(0L, r0); r <= std::min<long>(static_cast<long>(rows) - 1, r1); ++r)
      for (long c = std::max(0L, c0); c <= std::min<long>(static_cast<long>(cols) - 1, c1); ++c) {
        const double d = std::hypot(static_cast<double>(c) - p.x, static_cast<double>(r) - p.y);
        const double s = std::max(0.0, 1.0 - d / radius);
        double& v = out(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        v = std::max(v, s);
      }
  }
  return SaliencyMap(std::move(out), Granularity::FOI, SaliencySource::Minutiae);
}

std::vector<MinutiaPoint> parse_minutiae(const std::string& text) {
  std::vector<MinutiaPoint> pts;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    std::vector<double> nums;
    bool numeric = true;
    for (const auto& field : fields) {
      try {
        std::size_t used = 0;
        nums.push_back(std::stod(field, &used));
        if (field.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      require(lineno == 1 && pts.empty(), ErrorCode::Parse,
              "minutiae line " + std::to_string(lineno) + " is not numeric");
      continue;  // header
    }
    require(nums.size() >= 2 && nums.size() <= 4, ErrorCode::Parse,
            "minutiae line " + std::to_string(lineno) + " needs 2 to 4 fields");
    MinutiaPoint p{nums[0], nums[1], {}, {}};
    if (nums.size() > 2) p.angle = nums[2];
    if (nums.size() > 3) p.quality = nums[3];
    pts.push_back(p);
  }
  return pts;
}

std::vector<MinutiaPoint> load_minutiae(const std::string& path) {
  return parse_minutiae(read_file(path));
}

void QualityInputs::validate() const {
  require(max_level > 0, ErrorCode::InvalidArgument, "quality scale max level must be > 0");
  require(quality_levels.same_shape(low_contrast), ErrorCode::Dimension,
          "quality and low-contrast maps differ in dimensions");
  require(!quality_levels.empty(), ErrorCode::Dimension, "quality map is empty");
  for (double v : quality_levels.values())
    require(v >= 0.0 && v <= max_level && v == std::floor(v), ErrorCode::InvalidArgument,
            "quality level outside 0..max_level");
  for (double v : low_contrast.values())
    require(v == 0.0 || v == 1.0, ErrorCode::InvalidArgument, "low-contrast map must be binary");
}

SaliencyMap low_quality_saliency(const QualityInputs& q) {
  q.validate();
  Grid out(q.quality_levels.rows(), q.quality_levels.cols());
  const auto lmax = static_cast<double>(q.max_level);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double inv_quality = 1.0 - q.quality_levels[i] / lmax;
    const double inv_contrast = 1.0 - q.low_contrast[i];
    out[i] = inv_quality * inv_contrast;
  }
  return SaliencyMap(std::move(out), Granularity::FOI, SaliencySource::LowQuality);
}

QualityInputs load_quality_inputs(const std::string& quality_path,
                                  const std::string& low_contrast_path, int max_level) {
  QualityInputs q;
  q.max_level = max_level;
  q.quality_levels = load_gray_levels(quality_path);
  q.low_contrast = load_gray_levels(low_contrast_path);
  for (double& v : q.low_contrast.values()) v = v >= 128.0 ? 1.0 : 0.0;
  q.validate();
  return q;
}

}  // namespace sgpad
