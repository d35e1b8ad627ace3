#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgpad/grid.hpp"
#include "sgpad/saliency.hpp"

namespace sgpad {

struct BlurConfig {
  std::vector<int> radii{2, 4, 6, 8, 10, 12, 14, 16};
  int mask_smoothing_radius = 5;
  void validate() const;
};

// Gaussian with sigma = radius/2, kernel truncated at 3 sigma (odd size),
// reflect padding. Radius 0 returns the input unchanged.
Image gaussian_blur(const Image& image, int radius);

// m = clamp(smooth(saliency)); out = m*image + (1-m)*blur(image, radius)
Image blur_nonsalient(const Image& image, const SaliencyMap& saliency, int radius,
                      const BlurConfig& config);

struct GuidedSample {
  std::string sample_id;
  Image image;
  std::optional<SaliencyMap> saliency;
};

struct ControlSample {
  std::string sample_id;
  Image image;
};

struct ExpandedImage {
  std::string sample_id;
  int radius = 0;  // 0 tags an unmodified original
  Image image;

  std::string file_name(const std::string& ext = "png") const;
};

// |samples| * |radii| outputs, sample-major.
std::vector<ExpandedImage> expand_saliency_guided(const std::vector<GuidedSample>& samples,
                                                  const BlurConfig& config);

// |samples| * (|radii| + 1) outputs: each original followed by its full blurs.
std::vector<ExpandedImage> expand_control(const std::vector<ControlSample>& samples,
                                          const BlurConfig& config);

// Writes `<sample_id>__blur<r>.<ext>` / `<sample_id>__orig.<ext>` files and an
// `expansion.csv` (output_path,sample_id,radius) into `dir`. Returns the
// written paths in output order.
std::vector<std::string> write_expansion(const std::vector<ExpandedImage>& images,
                                         const std::string& dir, const std::string& ext = "png");

}  // namespace sgpad
