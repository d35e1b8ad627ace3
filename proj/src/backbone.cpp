#include "sgpad/backbone.hpp"

#include <cmath>

namespace sgpad {

void Backbone::zero_grad() {
  for (auto* p : params()) p->zero_grad();
}

void Backbone::save(std::ostream& out) {
  auto ps = params();
  nn::write_params(out, ps);
}

void Backbone::load(std::istream& in) {
  auto ps = params();
  nn::read_params(in, ps);
}

std::vector<std::vector<double>> Backbone::snapshot() {
  std::vector<std::vector<double>> out;
  for (auto* p : params()) out.push_back(p->value);
  return out;
}

void Backbone::restore(const std::vector<std::vector<double>>& values) {
  auto ps = params();
  require(ps.size() == values.size(), ErrorCode::InvalidArgument, "snapshot shape mismatch");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    require(ps[i]->value.size() == values[i].size(), ErrorCode::InvalidArgument,
            "snapshot shape mismatch");
    ps[i]->value = values[i];
  }
}

ToyBackbone::ToyBackbone(ToyBackboneOptions opts)
    : opts_(std::move(opts)), stem_(opts_.stem_pool), relus_(4), pools_(3) {
  require(opts_.channels.size() == 4, ErrorCode::InvalidArgument,
          "toy backbone needs exactly 4 block widths");
  require(opts_.stem_pool >= 1, ErrorCode::InvalidArgument, "stem pool factor must be >= 1");
  std::size_t in = 1;
  for (std::size_t c : opts_.channels) {
    require(c > 0, ErrorCode::InvalidArgument, "block width must be > 0");
    convs_.emplace_back(in, c);
    in = c;
  }
  head_w_ = nn::Param(2 * in);
  head_b_ = nn::Param(2);
}

void ToyBackbone::init(std::uint64_t seed) {
  nn::Rng rng(seed);
  for (auto& c : convs_) c.init(rng);
  const double bound = 1.0 / std::sqrt(static_cast<double>(opts_.channels.back()));
  for (double& w : head_w_.value) w = rng.uniform(-bound, bound);
  std::fill(head_b_.value.begin(), head_b_.value.end(), 0.0);
}

ForwardResult ToyBackbone::forward(const Image& image) {
  const std::size_t m = input_multiple();
  require(image.rows() % m == 0 && image.cols() % m == 0 && !image.empty(), ErrorCode::Dimension,
          "toy backbone input sides must be multiples of " + std::to_string(m));
  nn::Tensor x(1, image.rows(), image.cols());
  std::copy(image.values().begin(), image.values().end(), x.d.begin());
  x = stem_.forward(x);
  for (std::size_t b = 0; b < 4; ++b) {
    x = relus_[b].forward(convs_[b].forward(x));
    if (b < 3) x = pools_[b].forward(x);
  }
  features_ = x;
  const std::size_t c = x.c;
  const auto hw = static_cast<double>(x.h * x.w);
  gap_.assign(c, 0.0);
  for (std::size_t k = 0; k < c; ++k) {
    double s = 0.0;
    for (double v : x.channel(k)) s += v;
    gap_[k] = s / hw;
  }
  ForwardResult out;
  out.logits.assign(2, 0.0);
  for (std::size_t cls = 0; cls < 2; ++cls) {
    double z = head_b_.value[cls];
    for (std::size_t k = 0; k < c; ++k) z += head_w_.value[cls * c + k] * gap_[k];
    out.logits[cls] = z;
  }
  out.features = features_;
  return out;
}

void ToyBackbone::backward(const std::vector<double>& d_logits, const nn::Tensor* d_features,
                           const std::vector<double>* d_class_weights) {
  const std::size_t c = features_.c;
  const auto hw = static_cast<double>(features_.h * features_.w);
  std::vector<double> d_gap(c, 0.0);
  for (std::size_t cls = 0; cls < 2; ++cls) {
    head_b_.grad[cls] += d_logits[cls];
    for (std::size_t k = 0; k < c; ++k) {
      head_w_.grad[cls * c + k] += d_logits[cls] * gap_[k];
      d_gap[k] += head_w_.value[cls * c + k] * d_logits[cls];
    }
  }
  if (d_class_weights)
    for (std::size_t i = 0; i < head_w_.grad.size(); ++i) head_w_.grad[i] += (*d_class_weights)[i];

  nn::Tensor g(c, features_.h, features_.w);
  for (std::size_t k = 0; k < c; ++k) {
    auto ch = g.channel(k);
    for (double& v : ch) v = d_gap[k] / hw;
  }
  if (d_features)
    for (std::size_t i = 0; i < g.size(); ++i) g.d[i] += d_features->d[i];
  for (std::size_t b = 4; b-- > 0;) {
    if (b < 3) g = pools_[b].backward(g);
    g = convs_[b].backward(relus_[b].backward(g));
  }
}

std::vector<nn::Param*> ToyBackbone::params() {
  std::vector<nn::Param*> ps;
  for (auto& c : convs_) {
    ps.push_back(&c.weight);
    ps.push_back(&c.bias);
  }
  ps.push_back(&head_w_);
  ps.push_back(&head_b_);
  return ps;
}

std::unique_ptr<Backbone> ToyBackbone::clone() const {
  return std::make_unique<ToyBackbone>(*this);
}

std::unique_ptr<Backbone> make_backbone(const std::string& name, const ToyBackboneOptions& opts) {
  if (name == "toy") return std::make_unique<ToyBackbone>(opts);
  if (name == "resnet50" || name == "densenet121" || name == "inception_v3")
    fail(ErrorCode::InvalidArgument,
         "backbone '" + name + "' needs an external deep-learning runtime and is not built in; "
         "use 'toy' or register a Backbone implementation");
  fail(ErrorCode::InvalidArgument, "unknown backbone '" + name + "'");
}

}  // namespace sgpad
