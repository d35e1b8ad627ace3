#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgpad/grid.hpp"

namespace sgpad {

enum class Granularity { FOI, AOI, BOI };
enum class SaliencySource { Human, Minutiae, LowQuality, Autoencoder, Synthetic };

std::string_view to_string(Granularity g);
std::string_view to_string(SaliencySource s);
Granularity parse_granularity(std::string_view s);
SaliencySource parse_saliency_source(std::string_view s);

// Per-pixel importance field in [0,1]. Construction validates every
// invariant for the declared granularity, so a SaliencyMap value is always
// well-formed.
class SaliencyMap {
 public:
  SaliencyMap(Grid values, Granularity granularity, SaliencySource source);

  const Grid& values() const noexcept { return values_; }
  std::size_t rows() const noexcept { return values_.rows(); }
  std::size_t cols() const noexcept { return values_.cols(); }
  double operator()(std::size_t r, std::size_t c) const { return values_(r, c); }
  Granularity granularity() const noexcept { return granularity_; }
  SaliencySource source() const noexcept { return source_; }

  friend bool operator==(const SaliencyMap&, const SaliencyMap&) = default;

 private:
  Grid values_;
  Granularity granularity_;
  SaliencySource source_;
};

// Inclusive pixel rectangle; empty() when no pixel is covered.
struct Rect {
  std::size_t top = 0, left = 0, bottom = 0, right = 0;
  bool is_empty = true;
  bool empty() const noexcept { return is_empty; }
};

// Throws unless `g` satisfies the invariants of a map at `granularity`.
void validate_saliency(const Grid& g, Granularity granularity);

SaliencyMap fuse_annotations(std::span<const SaliencyMap> maps);

// Strict comparison: a pixel is kept only when its value exceeds `threshold`.
SaliencyMap to_aoi(const SaliencyMap& foi, double threshold);
SaliencyMap to_boi(const SaliencyMap& aoi);

// Bounding rectangle of all pixels with value > 0.
Rect bounding_rect(const Grid& g);

// (v - min) / (max - min); a constant grid maps to all zeros.
Grid minmax_normalize(const Grid& g);

inline constexpr double kHumanAoiThreshold = 0.0;
inline constexpr double kAutoencoderAoiThreshold = 0.5;

// Granularity-aware conversion used by training configs: FOI passes through,
// AOI thresholds, BOI thresholds then boxes.
SaliencyMap derive_granularity(const SaliencyMap& foi, Granularity target,
                               double aoi_threshold);

double default_aoi_threshold(SaliencySource source);

// 8-bit grayscale persistence: stored = round(v*255), loaded = stored/255.
void save_saliency_png(const SaliencyMap& map, const std::string& path);
SaliencyMap load_saliency_png(const std::string& path, Granularity granularity,
                              SaliencySource source);

}  // namespace sgpad
