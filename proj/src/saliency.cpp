#include "sgpad/saliency.hpp"

#include <algorithm>
#include <cmath>

#include "sgpad/image_io.hpp"

namespace sgpad {

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::FOI: return "FOI";
    case Granularity::AOI: return "AOI";
    case Granularity::BOI: return "BOI";
  }
  return "?";
}

std::string_view to_string(SaliencySource s) {
  switch (s) {
    case SaliencySource::Human: return "human";
    case SaliencySource::Minutiae: return "minutiae";
    case SaliencySource::LowQuality: return "low_quality";
    case SaliencySource::Autoencoder: return "autoencoder";
    case SaliencySource::Synthetic: return "synthetic";
  }
  return "?";
}

Granularity parse_granularity(std::string_view s) {
  if (s == "FOI" || s == "foi") return Granularity::FOI;
  if (s == "AOI" || s == "aoi") return Granularity::AOI;
  if (s == "BOI" || s == "boi") return Granularity::BOI;
  fail(ErrorCode::Parse, "unknown granularity '" + std::string(s) + "'");
}

SaliencySource parse_saliency_source(std::string_view s) {
  if (s == "human") return SaliencySource::Human;
  if (s == "minutiae") return SaliencySource::Minutiae;
  if (s == "low_quality") return SaliencySource::LowQuality;
  if (s == "autoencoder") return SaliencySource::Autoencoder;
  if (s == "synthetic") return SaliencySource::Synthetic;
  fail(ErrorCode::Parse, "unknown saliency source '" + std::string(s) + "'");
}

Rect bounding_rect(const Grid& g) {
  Rect r;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      if (g(i, j) <= 0.0) continue;
      if (r.is_empty) {
        r = Rect{i, j, i, j, false};
      } else {
        r.top = std::min(r.top, i);
        r.bottom = std::max(r.bottom, i);
        r.left = std::min(r.left, j);
        r.right = std::max(r.right, j);
      }
    }
  }
  return r;
}

void validate_saliency(const Grid& g, Granularity granularity) {
  require(g.rows() > 0 && g.cols() > 0, ErrorCode::Dimension,
          "saliency map must have positive width and height");
  for (double v : g.values()) {
    require(v >= 0.0 && v <= 1.0, ErrorCode::InvalidArgument,
            "saliency value outside [0,1]");
    if (granularity != Granularity::FOI) {
      require(v == 0.0 || v == 1.0, ErrorCode::InvalidArgument,
              "AOI/BOI saliency must be binary");
    }
  }
  if (granularity == Granularity::BOI) {
    const Rect r = bounding_rect(g);
    if (r.empty()) return;
    for (std::size_t i = r.top; i <= r.bottom; ++i)
      for (std::size_t j = r.left; j <= r.right; ++j)
        require(g(i, j) == 1.0, ErrorCode::InvalidArgument,
                "BOI saliency must be a filled rectangle");
  }
}

SaliencyMap::SaliencyMap(Grid values, Granularity granularity,
                         SaliencySource source)
    : values_(std::move(values)), granularity_(granularity), source_(source) {
  validate_saliency(values_, granularity_);
}

SaliencyMap fuse_annotations(std::span<const SaliencyMap> maps) {
  require(!maps.empty(), ErrorCode::InvalidArgument,
          "fuse_annotations needs at least one map");
  const auto& first = maps.front();
  for (const auto& m : maps) {
    require(m.values().same_shape(first.values()), ErrorCode::Dimension,
            "fuse_annotations: maps differ in dimensions");
    require(m.granularity() == Granularity::FOI, ErrorCode::InvalidArgument,
            "fuse_annotations: inputs must be FOI maps");
  }
  Grid out(first.rows(), first.cols());
  for (const auto& m : maps)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += m.values()[i];
  const double n = static_cast<double>(maps.size());
  for (double& v : out.values()) v = std::clamp(v / n, 0.0, 1.0);
  return SaliencyMap(std::move(out), Granularity::FOI, first.source());
}

SaliencyMap to_aoi(const SaliencyMap& foi, double threshold) {
  require(threshold >= 0.0 && threshold <= 1.0, ErrorCode::InvalidArgument,
          "AOI threshold must lie in [0,1]");
  Grid out(foi.rows(), foi.cols());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = foi.values()[i] > threshold ? 1.0 : 0.0;
  return SaliencyMap(std::move(out), Granularity::AOI, foi.source());
}

SaliencyMap to_boi(const SaliencyMap& aoi) {
  for (double v : aoi.values().values())
    require(v == 0.0 || v == 1.0, ErrorCode::InvalidArgument,
            "to_boi requires a binary map");
  Grid out(aoi.rows(), aoi.cols());
  const Rect r = bounding_rect(aoi.values());
  if (!r.empty()) {
    for (std::size_t i = r.top; i <= r.bottom; ++i)
      for (std::size_t j = r.left; j <= r.right; ++j) out(i, j) = 1.0;
  }
  return SaliencyMap(std::move(out), Granularity::BOI, aoi.source());
}

Grid minmax_normalize(const Grid& g) {
  require(!g.empty(), ErrorCode::InvalidArgument, "cannot normalize an empty grid");
  const auto [lo, hi] = std::minmax_element(g.values().begin(), g.values().end());
  const double mn = *lo, mx = *hi;
  Grid out(g.rows(), g.cols());
  if (mx > mn) {
    const double range = mx - mn;
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = (g[i] - mn) / range;
  }
  return out;
}

double default_aoi_threshold(SaliencySource source) {
  return source == SaliencySource::Autoencoder ? kAutoencoderAoiThreshold
                                               : kHumanAoiThreshold;
}

SaliencyMap derive_granularity(const SaliencyMap& foi, Granularity target,
                               double aoi_threshold) {
  if (foi.granularity() == target) return foi;
  switch (target) {
    case Granularity::FOI: return foi;
    case Granularity::AOI: return to_aoi(foi, aoi_threshold);
    case Granularity::BOI:
      return to_boi(foi.granularity() == Granularity::AOI
                        ? foi
                        : to_aoi(foi, aoi_threshold));
  }
  return foi;
}

void save_saliency_png(const SaliencyMap& map, const std::string& path) {
  save_gray(map.values(), path);
}

SaliencyMap load_saliency_png(const std::string& path, Granularity granularity,
                              SaliencySource source) {
  return SaliencyMap(load_gray(path), granularity, source);
}

}  // namespace sgpad
