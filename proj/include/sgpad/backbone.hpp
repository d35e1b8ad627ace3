#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "sgpad/grid.hpp"
#include "sgpad/nn.hpp"

namespace sgpad {

struct ForwardResult {
  std::vector<double> logits;  // K = 2
  nn::Tensor features;         // C x h x w, final conv block
};

// Trainable two-class classifier exposing its final feature maps and the
// K x C weight matrix of its linear head, which together define the CAM.
class Backbone {
 public:
  virtual ~Backbone() = default;

  virtual std::string name() const = 0;
  virtual void init(std::uint64_t seed) = 0;
  virtual ForwardResult forward(const Image& image) = 0;
  // Gradients of the loss w.r.t. logits, plus any direct gradients into the
  // final feature maps and head weights (from the CAM alignment term).
  // Parameter gradients are accumulated.
  virtual void backward(const std::vector<double>& d_logits, const nn::Tensor* d_features,
                        const std::vector<double>* d_class_weights) = 0;
  virtual std::vector<double> class_weights() const = 0;
  virtual std::size_t num_classes() const { return 2; }
  virtual std::vector<nn::Param*> params() = 0;
  virtual std::unique_ptr<Backbone> clone() const = 0;

  void zero_grad();
  void save(std::ostream& out);
  void load(std::istream& in);
  std::vector<std::vector<double>> snapshot();
  void restore(const std::vector<std::vector<double>>& values);
};

struct ToyBackboneOptions {
  std::size_t stem_pool = 2;
  std::vector<std::size_t> channels{8, 8, 16, 16};
};

// Average-pool stem, four conv3x3+ReLU blocks (max-pool after the first
// three), global average pooling and a linear head.
class ToyBackbone final : public Backbone {
 public:
  explicit ToyBackbone(ToyBackboneOptions opts = {});

  std::string name() const override { return "toy"; }
  void init(std::uint64_t seed) override;
  ForwardResult forward(const Image& image) override;
  void backward(const std::vector<double>& d_logits, const nn::Tensor* d_features,
                const std::vector<double>* d_class_weights) override;
  std::vector<double> class_weights() const override { return head_w_.value; }
  std::vector<nn::Param*> params() override;
  std::unique_ptr<Backbone> clone() const override;

  // Input side length must be a multiple of this.
  std::size_t input_multiple() const { return opts_.stem_pool * 8; }

 private:
  ToyBackboneOptions opts_;
  nn::AvgPool stem_;
  std::vector<nn::Conv2d> convs_;
  std::vector<nn::ReLU> relus_;
  std::vector<nn::MaxPool2> pools_;
  nn::Param head_w_, head_b_;
  nn::Tensor features_;
  std::vector<double> gap_;
};

// "toy" is the only architecture built into the toolkit.
std::unique_ptr<Backbone> make_backbone(const std::string& name,
                                        const ToyBackboneOptions& opts = {});

}  // namespace sgpad
