#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sgpad/grid.hpp"
#include "sgpad/saliency.hpp"

namespace sgpad {

struct AutoencoderConfig {
  std::size_t rows = 224;
  std::size_t cols = 224;
  std::size_t base_channels = 8;
  std::size_t epochs = 20;
  std::size_t batch_size = 4;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

struct AutoencoderMetadata {
  std::size_t rows = 0, cols = 0, base_channels = 0;
  std::size_t epochs = 0;
  std::uint64_t seed = 0;
  std::vector<double> loss_curve;  // mean per-pixel MSE per epoch
  double final_loss() const { return loss_curve.empty() ? 0.0 : loss_curve.back(); }
};

// Trained encoder-decoder (two-level U-Net with skip connections) mapping a
// fingerprint image to an FOI saliency estimate. Immutable once trained;
// prediction is safe from concurrent threads.
class SaliencyPredictor {
 public:
  SaliencyPredictor(SaliencyPredictor&&) noexcept;
  SaliencyPredictor& operator=(SaliencyPredictor&&) noexcept;
  ~SaliencyPredictor();

  const AutoencoderMetadata& metadata() const { return meta_; }

  // Writes the parameter blob to `path` and metadata JSON to `path + ".json"`.
  void save(const std::string& path) const;
  static SaliencyPredictor load(const std::string& path);

  struct Net;

 private:
  friend SaliencyPredictor train_saliency_autoencoder(
      const std::vector<std::pair<Image, SaliencyMap>>&, const AutoencoderConfig&);
  friend SaliencyMap predict_saliency(const SaliencyPredictor&, const Image&);
  SaliencyPredictor(std::unique_ptr<Net> net, AutoencoderMetadata meta);

  std::unique_ptr<Net> net_;
  AutoencoderMetadata meta_;
};

// Per-pixel MSE regression onto human FOI maps with Adam; deterministic
// under config.seed.
SaliencyPredictor train_saliency_autoencoder(
    const std::vector<std::pair<Image, SaliencyMap>>& pairs, const AutoencoderConfig& config);

SaliencyMap predict_saliency(const SaliencyPredictor& model, const Image& image);

}  // namespace sgpad
