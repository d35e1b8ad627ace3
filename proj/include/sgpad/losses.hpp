#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sgpad/grid.hpp"
#include "sgpad/nn.hpp"
#include "sgpad/saliency.hpp"

namespace sgpad {

// Final-block activations plus the linear head's weights (K x C, row-major).
struct CamInputs {
  nn::Tensor feature_maps;
  std::vector<double> class_weights;
  std::size_t num_classes = 2;
  std::size_t target_class = 0;

  void validate() const;
  double weight(std::size_t k, std::size_t c) const {
    return class_weights[k * feature_maps.c + c];
  }
};

struct LossConfig {
  double alpha = 0.5;
  void validate() const;
};

struct LossBreakdown {
  double total = 0.0;
  double classification_term = 0.0;
  double alignment_term = 0.0;
  double alpha = 1.0;
};

struct LossGradients {
  std::vector<double> d_logits;
  nn::Tensor d_features;
  std::vector<double> d_class_weights;  // K x C
};

// Weighted sum of feature maps with the target class's weights; raw values.
Grid compute_cam(const CamInputs& inputs);

// Fractional-overlap area averaging of `src` down to rows x cols.
Grid area_pool(const Grid& src, std::size_t rows, std::size_t cols);

// Pooled and min-max normalized saliency, the fixed target of the alignment
// term at CAM resolution.
Grid alignment_target(const SaliencyMap& saliency, std::size_t rows, std::size_t cols);

double alignment_term(const Grid& cam, const SaliencyMap& saliency);

// Alignment against a precomputed target. When d_cam is given it receives
// d(term)/d(cam); a constant CAM yields a zero gradient.
double alignment_term_to_target(const Grid& cam, const Grid& target, Grid* d_cam = nullptr);

// log-sum-exp stabilized cross-entropy; d_logits receives softmax - onehot.
double cross_entropy(std::span<const double> logits, std::size_t label,
                     std::vector<double>* d_logits = nullptr);

// Backpropagates a CAM gradient into feature maps and class weights
// (accumulating into the outputs).
void cam_backward(const CamInputs& inputs, const Grid& d_cam, nn::Tensor& d_features,
                  std::vector<double>& d_class_weights);

// alpha * CE(logits, label) + (1 - alpha) * alignment(CAM of the true label).
// The CAM target class is overridden with `label`.
LossBreakdown cyborg_loss(std::span<const double> logits, std::size_t label,
                          const CamInputs& cam_inputs, const SaliencyMap& saliency,
                          const LossConfig& config, LossGradients* grads = nullptr);

LossBreakdown batch_loss(std::span<const LossBreakdown> per_sample);

// Batch reduction when only some samples carry saliency: classification is
// averaged over all samples, alignment over covered samples only.
LossBreakdown batch_loss_partial(std::span<const double> classification_terms,
                                 std::span<const double> covered_alignment_terms,
                                 double alpha);

}  // namespace sgpad
