#include "sgpad/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "sgpad/error.hpp"

namespace sgpad::nn {

void Adam::step(std::span<Param* const> params) {
  ++t_;
  const double bc1 = 1.0 - std::pow(s_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(s_.beta2, static_cast<double>(t_));
  for (Param* p : params) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double g = p->grad[i];
      p->m[i] = s_.beta1 * p->m[i] + (1.0 - s_.beta1) * g;
      p->v[i] = s_.beta2 * p->v[i] + (1.0 - s_.beta2) * g * g;
      const double mhat = p->m[i] / bc1;
      const double vhat = p->v[i] / bc2;
      p->value[i] -= s_.lr * mhat / (std::sqrt(vhat) + s_.eps);
    }
  }
}

Conv2d::Conv2d(std::size_t in, std::size_t out, std::size_t k)
    : weight(out * in * k * k), bias(out), in_(in), out_(out), k_(k) {
  require(k % 2 == 1, ErrorCode::InvalidArgument, "conv kernel size must be odd");
}

void Conv2d::init(Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(in_ * k_ * k_));
  for (double& w : weight.value) w = rng.uniform(-bound, bound);
  std::fill(bias.value.begin(), bias.value.end(), 0.0);
}

Tensor Conv2d::forward(const Tensor& x) {
  require(x.c == in_, ErrorCode::Dimension, "conv input channel mismatch");
  x_ = x;
  const std::size_t h = x.h, w = x.w;
  const long p = static_cast<long>(k_ / 2);
  Tensor y(out_, h, w);
  for (std::size_t oc = 0; oc < out_; ++oc) {
    auto yc = y.channel(oc);
    std::fill(yc.begin(), yc.end(), bias.value[oc]);
    for (std::size_t ic = 0; ic < in_; ++ic) {
      auto xc = x.channel(ic);
      const double* wk = &weight.value[(oc * in_ + ic) * k_ * k_];
      for (std::size_t ky = 0; ky < k_; ++ky) {
        const long dy = static_cast<long>(ky) - p;
        const std::size_t ilo = static_cast<std::size_t>(std::max(0L, -dy));
        const std::size_t ihi = static_cast<std::size_t>(std::min<long>(h, static_cast<long>(h) - dy));
        for (std::size_t kx = 0; kx < k_; ++kx) {
          const long dx = static_cast<long>(kx) - p;
          const double wv = wk[ky * k_ + kx];
          const std::size_t jlo = static_cast<std::size_t>(std::max(0L, -dx));
          const std::size_t jhi = static_cast<std::size_t>(std::min<long>(w, static_cast<long>(w) - dx));
          for (std::size_t i = ilo; i < ihi; ++i) {
            double* yr = &yc[i * w];
            const double* xr = &xc[(i + dy) * w + dx];
            for (std::size_t j = jlo; j < jhi; ++j) yr[j] += wv * xr[j];
          }
        }
      }
    }
  }
  return y;
}

Tensor Conv2d::backward(const Tensor& gy) {
  const std::size_t h = x_.h, w = x_.w;
  const long p = static_cast<long>(k_ / 2);
  Tensor gx(in_, h, w);
  for (std::size_t oc = 0; oc < out_; ++oc) {
    auto gc = gy.channel(oc);
    double gb = 0.0;
    for (double g : gc) gb += g;
    bias.grad[oc] += gb;
    for (std::size_t ic = 0; ic < in_; ++ic) {
      auto xc = x_.channel(ic);
      auto gxc = gx.channel(ic);
      const std::size_t base = (oc * in_ + ic) * k_ * k_;
      for (std::size_t ky = 0; ky < k_; ++ky) {
        const long dy = static_cast<long>(ky) - p;
        const std::size_t ilo = static_cast<std::size_t>(std::max(0L, -dy));
        const std::size_t ihi = static_cast<std::size_t>(std::min<long>(h, static_cast<long>(h) - dy));
        for (std::size_t kx = 0; kx < k_; ++kx) {
          const long dx = static_cast<long>(kx) - p;
          const double wv = weight.value[base + ky * k_ + kx];
          const std::size_t jlo = static_cast<std::size_t>(std::max(0L, -dx));
          const std::size_t jhi = static_cast<std::size_t>(std::min<long>(w, static_cast<long>(w) - dx));
          double gw = 0.0;
          for (std::size_t i = ilo; i < ihi; ++i) {
            const double* gr = &gc[i * w];
            const double* xr = &xc[(i + dy) * w + dx];
            double* gxr = &gxc[(i + dy) * w + dx];
            for (std::size_t j = jlo; j < jhi; ++j) {
              gw += gr[j] * xr[j];
              gxr[j] += wv * gr[j];
            }
          }
          weight.grad[base + ky * k_ + kx] += gw;
        }
      }
    }
  }
  return gx;
}

Tensor ReLU::forward(const Tensor& x) {
  Tensor y = x;
  mask_.assign(x.size(), false);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y.d[i] > 0.0) mask_[i] = true;
    else y.d[i] = 0.0;
  }
  return y;
}

Tensor ReLU::backward(const Tensor& gy) const {
  Tensor gx = gy;
  for (std::size_t i = 0; i < gx.size(); ++i)
    if (!mask_[i]) gx.d[i] = 0.0;
  return gx;
}

Tensor MaxPool2::forward(const Tensor& x) {
  ih_ = x.h;
  iw_ = x.w;
  Tensor y(x.c, x.h / 2, x.w / 2);
  argmax_.assign(y.size(), 0);
  for (std::size_t k = 0; k < x.c; ++k)
    for (std::size_t i = 0; i < y.h; ++i)
      for (std::size_t j = 0; j < y.w; ++j) {
        std::size_t best = (k * x.h + 2 * i) * x.w + 2 * j;
        for (std::size_t a = 0; a < 2; ++a)
          for (std::size_t b = 0; b < 2; ++b) {
            const std::size_t idx = (k * x.h + 2 * i + a) * x.w + 2 * j + b;
            if (x.d[idx] > x.d[best]) best = idx;
          }
        const std::size_t o = (k * y.h + i) * y.w + j;
        y.d[o] = x.d[best];
        argmax_[o] = best;
      }
  return y;
}

Tensor MaxPool2::backward(const Tensor& gy) const {
  Tensor gx(gy.c, ih_, iw_);
  for (std::size_t o = 0; o < gy.size(); ++o) gx.d[argmax_[o]] += gy.d[o];
  return gx;
}

Tensor AvgPool::forward(const Tensor& x) {
  ih_ = x.h;
  iw_ = x.w;
  if (f_ == 1) return x;
  Tensor y(x.c, x.h / f_, x.w / f_);
  const double inv = 1.0 / static_cast<double>(f_ * f_);
  for (std::size_t k = 0; k < x.c; ++k)
    for (std::size_t i = 0; i < y.h * f_; ++i)
      for (std::size_t j = 0; j < y.w * f_; ++j)
        y.at(k, i / f_, j / f_) += x.at(k, i, j) * inv;
  return y;
}

Tensor AvgPool::backward(const Tensor& gy) const {
  if (f_ == 1) return gy;
  Tensor gx(gy.c, ih_, iw_);
  const double inv = 1.0 / static_cast<double>(f_ * f_);
  for (std::size_t k = 0; k < gy.c; ++k)
    for (std::size_t i = 0; i < gy.h * f_; ++i)
      for (std::size_t j = 0; j < gy.w * f_; ++j)
        gx.at(k, i, j) = gy.at(k, i / f_, j / f_) * inv;
  return gx;
}

Tensor upsample2(const Tensor& x) {
  Tensor y(x.c, x.h * 2, x.w * 2);
  for (std::size_t k = 0; k < y.c; ++k)
    for (std::size_t i = 0; i < y.h; ++i)
      for (std::size_t j = 0; j < y.w; ++j) y.at(k, i, j) = x.at(k, i / 2, j / 2);
  return y;
}

Tensor upsample2_backward(const Tensor& gy) {
  Tensor gx(gy.c, gy.h / 2, gy.w / 2);
  for (std::size_t k = 0; k < gy.c; ++k)
    for (std::size_t i = 0; i < gy.h; ++i)
      for (std::size_t j = 0; j < gy.w; ++j) gx.at(k, i / 2, j / 2) += gy.at(k, i, j);
  return gx;
}

Tensor concat(const Tensor& a, const Tensor& b) {
  require(a.h == b.h && a.w == b.w, ErrorCode::Dimension, "concat spatial mismatch");
  Tensor y(a.c + b.c, a.h, a.w);
  std::copy(a.d.begin(), a.d.end(), y.d.begin());
  std::copy(b.d.begin(), b.d.end(), y.d.begin() + static_cast<long>(a.size()));
  return y;
}

void split(const Tensor& g, std::size_t ca, Tensor& ga, Tensor& gb) {
  ga = Tensor(ca, g.h, g.w);
  gb = Tensor(g.c - ca, g.h, g.w);
  std::copy(g.d.begin(), g.d.begin() + static_cast<long>(ga.size()), ga.d.begin());
  std::copy(g.d.begin() + static_cast<long>(ga.size()), g.d.end(), gb.d.begin());
}

namespace {
constexpr std::uint64_t kParamMagic = 0x53475041524d3031ULL;  // "SGPARM01"
}

void write_params(std::ostream& out, std::span<Param* const> params) {
  auto put = [&](const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  };
  const std::uint64_t count = params.size();
  put(&kParamMagic, sizeof kParamMagic);
  put(&count, sizeof count);
  for (const Param* p : params) {
    const std::uint64_t n = p->value.size();
    put(&n, sizeof n);
    put(p->value.data(), n * sizeof(double));
  }
  require(static_cast<bool>(out), ErrorCode::Io, "failed writing parameters");
}

void read_params(std::istream& in, std::span<Param* const> params) {
  auto get = [&](void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    require(static_cast<bool>(in), ErrorCode::Parse, "truncated parameter file");
  };
  std::uint64_t magic = 0, count = 0;
  get(&magic, sizeof magic);
  require(magic == kParamMagic, ErrorCode::Parse, "not a parameter file");
  get(&count, sizeof count);
  require(count == params.size(), ErrorCode::Parse, "parameter tensor count mismatch");
  for (Param* p : params) {
    std::uint64_t n = 0;
    get(&n, sizeof n);
    require(n == p->value.size(), ErrorCode::Parse, "parameter tensor size mismatch");
    get(p->value.data(), n * sizeof(double));
  }
}

}  // namespace sgpad::nn
