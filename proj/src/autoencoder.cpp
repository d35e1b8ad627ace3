#include "sgpad/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

#include "sgpad/image_io.hpp"
#include "sgpad/nn.hpp"

namespace sgpad {

using nn::Tensor;

struct SaliencyPredictor::Net {
  explicit Net(std::size_t ch)
      : enc1(1, ch), enc2(ch, 2 * ch), mid(2 * ch, 2 * ch), dec2(4 * ch, ch),
        dec1(2 * ch, ch), head(ch, 1), ch_(ch) {}

  nn::Conv2d enc1, enc2, mid, dec2, dec1, head;
  nn::ReLU r1, r2, r3, r4, r5;
  nn::MaxPool2 p1, p2;
  std::size_t ch_;
  Tensor out_;

  std::vector<nn::Param*> params() {
    return {&enc1.weight, &enc1.bias, &enc2.weight, &enc2.bias, &mid.weight, &mid.bias,
            &dec2.weight, &dec2.bias, &dec1.weight, &dec1.bias, &head.weight, &head.bias};
  }

  void init(nn::Rng& rng) {
    for (auto* c : {&enc1, &enc2, &mid, &dec2, &dec1, &head}) c->init(rng);
  }

  Tensor forward(const Tensor& x) {
    Tensor s1 = r1.forward(enc1.forward(x));                 // H
    Tensor s2 = r2.forward(enc2.forward(p1.forward(s1)));    // H/2
    Tensor m = r3.forward(mid.forward(p2.forward(s2)));      // H/4
    Tensor u2 = r4.forward(dec2.forward(nn::concat(nn::upsample2(m), s2)));
    Tensor u1 = r5.forward(dec1.forward(nn::concat(nn::upsample2(u2), s1)));
    out_ = head.forward(u1);
    for (double& v : out_.d) v = 1.0 / (1.0 + std::exp(-v));
    return out_;
  }

  // g is d(loss)/d(pre-sigmoid logits).
  void backward(const Tensor& g) {
    Tensor gu1 = r5.backward(head.backward(g));
    Tensor gcat1 = dec1.backward(gu1);
    Tensor gup1, gs1;
    nn::split(gcat1, ch_, gup1, gs1);
    Tensor gu2 = r4.backward(nn::upsample2_backward(gup1));
    Tensor gcat2 = dec2.backward(gu2);
    Tensor gup2, gs2;
    nn::split(gcat2, 2 * ch_, gup2, gs2);
    Tensor gm = r3.backward(nn::upsample2_backward(gup2));
    Tensor gs2_total = p2.backward(mid.backward(gm));
    for (std::size_t i = 0; i < gs2_total.size(); ++i) gs2_total.d[i] += gs2.d[i];
    Tensor gs1_total = p1.backward(enc2.backward(r2.backward(gs2_total)));
    for (std::size_t i = 0; i < gs1_total.size(); ++i) gs1_total.d[i] += gs1.d[i];
    enc1.backward(r1.backward(gs1_total));
  }
};

namespace {

Tensor to_tensor(const Grid& g) {
  Tensor t(1, g.rows(), g.cols());
  std::copy(g.values().begin(), g.values().end(), t.d.begin());
  return t;
}

}  // namespace

SaliencyPredictor::SaliencyPredictor(std::unique_ptr<Net> net, AutoencoderMetadata meta)
    : net_(std::move(net)), meta_(std::move(meta)) {}
SaliencyPredictor::SaliencyPredictor(SaliencyPredictor&&) noexcept = default;
SaliencyPredictor& SaliencyPredictor::operator=(SaliencyPredictor&&) noexcept = default;
SaliencyPredictor::~SaliencyPredictor() = default;

SaliencyPredictor train_saliency_autoencoder(
    const std::vector<std::pair<Image, SaliencyMap>>& pairs, const AutoencoderConfig& config) {
  require(pairs.size() >= 2, ErrorCode::InvalidArgument,
          "autoencoder training needs at least 2 image/saliency pairs");
  require(config.rows % 4 == 0 && config.cols % 4 == 0 && config.rows > 0 && config.cols > 0,
          ErrorCode::InvalidArgument, "autoencoder input dims must be positive multiples of 4");
  require(config.epochs > 0 && config.batch_size > 0 && config.base_channels > 0,
          ErrorCode::InvalidArgument, "autoencoder epochs, batch size and width must be > 0");
  for (const auto& [img, sal] : pairs) {
    require(img.rows() == config.rows && img.cols() == config.cols &&
                sal.rows() == config.rows && sal.cols() == config.cols,
            ErrorCode::Dimension, "training pair does not match configured input dims");
  }

  auto net = std::make_unique<SaliencyPredictor::Net>(config.base_channels);
  nn::Rng rng(config.seed);
  net->init(rng);
  nn::Adam adam({.lr = config.learning_rate});
  auto params = net->params();

  AutoencoderMetadata meta{config.rows, config.cols, config.base_channels, config.epochs,
                           config.seed, {}};
  const auto npix = static_cast<double>(config.rows * config.cols);
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      for (auto* p : params) p->zero_grad();
      const auto bs = static_cast<double>(end - start);
      for (std::size_t b = start; b < end; ++b) {
        const auto& [img, sal] = pairs[order[b]];
        Tensor y = net->forward(to_tensor(img));
        Tensor gy(1, y.h, y.w);
        double loss = 0.0;
        // per-pixel binary cross-entropy on the sigmoid output
        for (std::size_t i = 0; i < y.size(); ++i) {
          const double t = sal.values()[i];
          const double p = std::clamp(y.d[i], 1e-12, 1.0 - 1e-12);
          loss -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
          gy.d[i] = (y.d[i] - t) / (npix * bs);
        }
        epoch_loss += loss / npix;
        net->backward(gy);
      }
      adam.step(params);
    }
    meta.loss_curve.push_back(epoch_loss / static_cast<double>(pairs.size()));
  }
  return SaliencyPredictor(std::move(net), std::move(meta));
}

SaliencyMap predict_saliency(const SaliencyPredictor& model, const Image& image) {
  const auto& meta = model.metadata();
  require(image.rows() == meta.rows && image.cols() == meta.cols, ErrorCode::Dimension,
          "image dims do not match the predictor input dims");
  SaliencyPredictor::Net scratch = *model.net_;  // layer caches are per call
  Tensor y = scratch.forward(to_tensor(image));
  Grid out(image.rows(), image.cols(), std::vector<double>(y.d.begin(), y.d.end()));
  for (double& v : out.values()) v = std::clamp(v, 0.0, 1.0);
  return SaliencyMap(std::move(out), Granularity::FOI, SaliencySource::Autoencoder);
}

void SaliencyPredictor::save(const std::string& path) const {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write model '" + path + "'");
    auto params = net_->params();
    nn::write_params(out, params);
  }
  nlohmann::json j = {{"rows", meta_.rows},
                      {"cols", meta_.cols},
                      {"base_channels", meta_.base_channels},
                      {"epochs", meta_.epochs},
                      {"seed", meta_.seed},
                      {"final_loss", meta_.final_loss()},
                      {"loss_curve", meta_.loss_curve}};
  write_file_atomic(path + ".json", j.dump(2) + "\n");
}

SaliencyPredictor SaliencyPredictor::load(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path + ".json"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("bad predictor metadata: ") + e.what());
  }
  AutoencoderMetadata meta;
  meta.rows = j.at("rows").get<std::size_t>();
  meta.cols = j.at("cols").get<std::size_t>();
  meta.base_channels = j.at("base_channels").get<std::size_t>();
  meta.epochs = j.at("epochs").get<std::size_t>();
  meta.seed = j.at("seed").get<std::uint64_t>();
  meta.loss_curve = j.at("loss_curve").get<std::vector<double>>();
  auto net = std::make_unique<Net>(meta.base_channels);
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot read model '" + path + "'");
  auto params = net->params();
  nn::read_params(in, params);
  return SaliencyPredictor(std::move(net), std::move(meta));
}

}  // namespace sgpad
