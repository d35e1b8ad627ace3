#include "sgpad/losses.hpp"

#include <algorithm>
#include <cmath>

namespace sgpad {

void CamInputs::validate() const {
  require(feature_maps.h >= 1 && feature_maps.w >= 1 && feature_maps.c >= 1,
          ErrorCode::Dimension, "feature maps must be non-empty");
  require(class_weights.size() == num_classes * feature_maps.c, ErrorCode::Dimension,
          "class weight columns must equal feature-map channels");
  require(target_class < num_classes, ErrorCode::InvalidArgument,
          "CAM target class out of range");
}

void LossConfig::validate() const {
  require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::InvalidArgument,
          "alpha must lie in [0,1]");
}

Grid compute_cam(const CamInputs& inputs) {
  inputs.validate();
  const auto& f = inputs.feature_maps;
  Grid cam(f.h, f.w);
  for (std::size_t k = 0; k < f.c; ++k) {
    const double wk = inputs.weight(inputs.target_class, k);
    auto ch = f.channel(k);
    for (std::size_t i = 0; i < cam.size(); ++i) cam[i] += wk * ch[i];
  }
  return cam;
}

namespace {

struct Tap {
  std::size_t index;
  double weight;
};

// For each output cell along one axis, the overlapping source cells and
// their fractional coverage weights (summing to 1).
std::vector<std::vector<Tap>> pooling_taps(std::size_t src, std::size_t dst) {
  std::vector<std::vector<Tap>> taps(dst);
  const double scale = static_cast<double>(src) / static_cast<double>(dst);
  for (std::size_t o = 0; o < dst; ++o) {
    const double lo = static_cast<double>(o) * scale;
    const double hi = static_cast<double>(o + 1) * scale;
    for (auto s = static_cast<std::size_t>(std::floor(lo)); s < src && static_cast<double>(s) < hi; ++s) {
      const double overlap = std::min(hi, static_cast<double>(s + 1)) - std::max(lo, static_cast<double>(s));
      if (overlap > 0.0) taps[o].push_back({s, overlap / scale});
    }
  }
  return taps;
}

}  // namespace

Grid area_pool(const Grid& src, std::size_t rows, std::size_t cols) {
  require(!src.empty() && rows > 0 && cols > 0, ErrorCode::InvalidArgument,
          "area_pool on empty grid");
  require(src.rows() >= rows && src.cols() >= cols, ErrorCode::Dimension,
          "area_pool can only downsample");
  if (src.rows() == rows && src.cols() == cols) return src;
  const auto rt = pooling_taps(src.rows(), rows);
  const auto ct = pooling_taps(src.cols(), cols);
  Grid out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (const Tap& a : rt[i])
        for (const Tap& b : ct[j]) acc += a.weight * b.weight * src(a.index, b.index);
      out(i, j) = acc;
    }
  return out;
}

Grid alignment_target(const SaliencyMap& saliency, std::size_t rows, std::size_t cols) {
  return minmax_normalize(area_pool(saliency.values(), rows, cols));
}

double alignment_term_to_target(const Grid& cam, const Grid& target, Grid* d_cam) {
  require(!cam.empty(), ErrorCode::InvalidArgument, "alignment on empty CAM");
  require(cam.same_shape(target), ErrorCode::Dimension, "CAM and target shapes differ");
  const auto n = static_cast<double>(cam.size());
  const Grid norm = minmax_normalize(cam);
  double loss = 0.0;
  for (std::size_t i = 0; i < cam.size(); ++i) {
    const double diff = norm[i] - target[i];
    loss += diff * diff;
  }
  loss /= n;

  if (d_cam) {
    *d_cam = Grid(cam.rows(), cam.cols());
    const auto vals = cam.values();
    const auto lo = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    const auto hi = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
    const double range = cam[hi] - cam[lo];
    if (range > 0.0) {
      // n_i = (c_i - min) / range; dn_i/dmin = (n_i - 1)/range, dn_i/dmax = -n_i/range.
      double g_min = 0.0, g_max = 0.0;
      for (std::size_t i = 0; i < cam.size(); ++i) {
        const double gn = 2.0 * (norm[i] - target[i]) / n;
        (*d_cam)[i] += gn / range;
        g_min += gn * (norm[i] - 1.0) / range;
        g_max += gn * (-norm[i]) / range;
      }
      (*d_cam)[lo] += g_min;
      (*d_cam)[hi] += g_max;
    }
  }
  return loss;
}

double alignment_term(const Grid& cam, const SaliencyMap& saliency) {
  require(!cam.empty(), ErrorCode::InvalidArgument, "alignment on empty CAM");
  return alignment_term_to_target(cam, alignment_target(saliency, cam.rows(), cam.cols()));
}

double cross_entropy(std::span<const double> logits, std::size_t label,
                     std::vector<double>* d_logits) {
  require(!logits.empty(), ErrorCode::InvalidArgument, "empty logits");
  require(label < logits.size(), ErrorCode::InvalidArgument, "label index out of range");
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - mx);
  const double lse = mx + std::log(sum);
  if (d_logits) {
    d_logits->assign(logits.size(), 0.0);
    for (std::size_t k = 0; k < logits.size(); ++k)
      (*d_logits)[k] = std::exp(logits[k] - lse) - (k == label ? 1.0 : 0.0);
  }
  return lse - logits[label];
}

void cam_backward(const CamInputs& inputs, const Grid& d_cam, nn::Tensor& d_features,
                  std::vector<double>& d_class_weights) {
  const auto& f = inputs.feature_maps;
  if (d_features.size() != f.size()) d_features = nn::Tensor(f.c, f.h, f.w);
  if (d_class_weights.size() != inputs.class_weights.size())
    d_class_weights.assign(inputs.class_weights.size(), 0.0);
  const std::size_t t = inputs.target_class;
  for (std::size_t k = 0; k < f.c; ++k) {
    const double wk = inputs.weight(t, k);
    auto ch = f.channel(k);
    auto gch = d_features.channel(k);
    double gw = 0.0;
    for (std::size_t i = 0; i < ch.size(); ++i) {
      gch[i] += wk * d_cam[i];
      gw += ch[i] * d_cam[i];
    }
    d_class_weights[t * f.c + k] += gw;
  }
}

LossBreakdown cyborg_loss(std::span<const double> logits, std::size_t label,
                          const CamInputs& cam_inputs, const SaliencyMap& saliency,
                          const LossConfig& config, LossGradients* grads) {
  config.validate();
  require(label < logits.size(), ErrorCode::InvalidArgument, "label index out of range");
  CamInputs ci = cam_inputs;
  ci.target_class = label;
  ci.validate();

  LossBreakdown out;
  out.alpha = config.alpha;
  std::vector<double> d_logits;
  out.classification_term = cross_entropy(logits, label, grads ? &d_logits : nullptr);

  const Grid cam = compute_cam(ci);
  const Grid target = alignment_target(saliency, cam.rows(), cam.cols());
  Grid d_cam;
  out.alignment_term = alignment_term_to_target(cam, target, grads ? &d_cam : nullptr);
  out.total = config.alpha * out.classification_term + (1.0 - config.alpha) * out.alignment_term;

  if (grads) {
    grads->d_logits = std::move(d_logits);
    for (double& g : grads->d_logits) g *= config.alpha;
    for (double& g : d_cam.values()) g *= (1.0 - config.alpha);
    grads->d_features = nn::Tensor(ci.feature_maps.c, ci.feature_maps.h, ci.feature_maps.w);
    grads->d_class_weights.assign(ci.class_weights.size(), 0.0);
    cam_backward(ci, d_cam, grads->d_features, grads->d_class_weights);
  }
  return out;
}

LossBreakdown batch_loss(std::span<const LossBreakdown> per_sample) {
  require(!per_sample.empty(), ErrorCode::InvalidArgument, "batch_loss on empty list");
  const double alpha = per_sample.front().alpha;
  LossBreakdown out;
  out.alpha = alpha;
  for (const auto& b : per_sample) {
    require(b.alpha == alpha, ErrorCode::InvalidArgument, "batch_loss: mixed alpha values");
    out.total += b.total;
    out.classification_term += b.classification_term;
    out.alignment_term += b.alignment_term;
  }
  const auto n = static_cast<double>(per_sample.size());
  out.total /= n;
  out.classification_term /= n;
  out.alignment_term /= n;
  return out;
}

LossBreakdown batch_loss_partial(std::span<const double> classification_terms,
                                 std::span<const double> covered_alignment_terms,
                                 double alpha) {
  LossConfig{alpha}.validate();
  require(!classification_terms.empty(), ErrorCode::InvalidArgument,
          "batch_loss_partial on empty batch");
  LossBreakdown out;
  out.alpha = alpha;
  for (double c : classification_terms) out.classification_term += c;
  out.classification_term /= static_cast<double>(classification_terms.size());
  if (!covered_alignment_terms.empty()) {
    for (double a : covered_alignment_terms) out.alignment_term += a;
    out.alignment_term /= static_cast<double>(covered_alignment_terms.size());
  }
  out.total = alpha * out.classification_term + (1.0 - alpha) * out.alignment_term;
  return out;
}

}  // namespace sgpad
