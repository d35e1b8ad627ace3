#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgpad/grid.hpp"
#include "sgpad/saliency.hpp"

namespace sgpad {

struct MinutiaPoint {
  double x = 0.0;  // column
  double y = 0.0;  // row
  std::optional<double> angle;
  std::optional<double> quality;
};

inline constexpr double kMinutiaRadius = 10.0;

// Linear radial stamp max(0, 1 - d/radius) per minutia, combined by
// per-pixel maximum. Points outside the image are rejected with their index.
SaliencyMap minutiae_saliency(const std::vector<MinutiaPoint>& points, std::size_t rows,
                              std::size_t cols, double radius = kMinutiaRadius);

// Interchange format: `x,y[,angle[,quality]]` per line, optional header.
std::vector<MinutiaPoint> parse_minutiae(const std::string& text);
std::vector<MinutiaPoint> load_minutiae(const std::string& path);

struct QualityInputs {
  Grid quality_levels;  // integer levels 0..max_level, higher is better
  Grid low_contrast;    // 1 marks background / low-contrast pixels
  int max_level = 4;

  void validate() const;
};

// (1 - level/max_level) * (1 - low_contrast)
SaliencyMap low_quality_saliency(const QualityInputs& q);

// Quality map holds raw levels; low-contrast map is 0/255.
QualityInputs load_quality_inputs(const std::string& quality_path,
                                  const std::string& low_contrast_path, int max_level);

}  // namespace sgpad
