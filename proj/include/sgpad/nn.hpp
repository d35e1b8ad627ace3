#pragma once

// Minimal single-sample backprop engine for small convolutional networks.
// Layers cache what their backward pass needs from the most recent forward
// call, so forward/backward must alternate per sample.

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace sgpad::nn {

struct Tensor {
  std::size_t c = 0, h = 0, w = 0;
  std::vector<double> d;

  Tensor() = default;
  Tensor(std::size_t c_, std::size_t h_, std::size_t w_, double fill = 0.0)
      : c(c_), h(h_), w(w_), d(c_ * h_ * w_, fill) {}

  double& at(std::size_t k, std::size_t i, std::size_t j) { return d[(k * h + i) * w + j]; }
  double at(std::size_t k, std::size_t i, std::size_t j) const { return d[(k * h + i) * w + j]; }
  std::span<double> channel(std::size_t k) { return {d.data() + k * h * w, h * w}; }
  std::span<const double> channel(std::size_t k) const { return {d.data() + k * h * w, h * w}; }
  std::size_t size() const { return d.size(); }
};

// Deterministic across standard libraries: uses only mt19937_64 raw output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return eng_(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 eng_;
};

struct Param {
  std::vector<double> value, grad, m, v;
  explicit Param(std::size_t n = 0) : value(n), grad(n), m(n), v(n) {}
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

struct AdamSettings {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamSettings s) : s_(s) {}
  void step(std::span<Param* const> params);
  const AdamSettings& settings() const { return s_; }

 private:
  AdamSettings s_;
  long t_ = 0;
};

// 3x3 (configurable odd k) convolution, stride 1, zero "same" padding.
class Conv2d {
 public:
  Conv2d(std::size_t in, std::size_t out, std::size_t k = 3);
  void init(Rng& rng);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  std::size_t in_channels() const { return in_; }
  std::size_t out_channels() const { return out_; }
  Param weight, bias;

 private:
  std::size_t in_, out_, k_;
  Tensor x_;
};

class ReLU {
 public:
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy) const;

 private:
  std::vector<bool> mask_;
};

class MaxPool2 {
 public:
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy) const;

 private:
  std::size_t ih_ = 0, iw_ = 0;
  std::vector<std::size_t> argmax_;
};

class AvgPool {
 public:
  explicit AvgPool(std::size_t factor) : f_(factor) {}
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy) const;

 private:
  std::size_t f_;
  std::size_t ih_ = 0, iw_ = 0;
};

Tensor upsample2(const Tensor& x);
Tensor upsample2_backward(const Tensor& gy);
Tensor concat(const Tensor& a, const Tensor& b);
void split(const Tensor& g, std::size_t ca, Tensor& ga, Tensor& gb);

void write_params(std::ostream& out, std::span<Param* const> params);
void read_params(std::istream& in, std::span<Param* const> params);

}  // namespace sgpad::nn
