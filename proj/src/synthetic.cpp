#include "sgpad/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "sgpad/error.hpp"
#include "sgpad/image_io.hpp"
#include "sgpad/nn.hpp"
#include "sgpad/pipeline.hpp"
#include "sgpad/saliency.hpp"

namespace sgpad {

namespace fs = std::filesystem;

namespace {

Image ridge_image(const SyntheticSpec& spec, bool spoof, nn::Rng& rng) {
  const std::size_t n = spec.size;
  Image img(n, n);
  const double theta = rng.uniform() * std::numbers::pi;
  const double period = 7.0 + 3.0 * rng.uniform();
  const double phase = rng.uniform() * 2.0 * std::numbers::pi;
  const double cx = n * (0.4 + 0.2 * rng.uniform()), cy = n * (0.4 + 0.2 * rng.uniform());
  const double curl = 0.004 * rng.uniform();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const double dx = c - cx, dy = r - cy;
      const double t = std::cos(theta) * dx + std::sin(theta) * dy + curl * (dx * dx + dy * dy);
      double v = 0.5 + 0.35 * std::sin(2.0 * std::numbers::pi * t / period + phase);
      v += spec.noise * (2.0 * rng.uniform() - 1.0);
      img(r, c) = v;
    }
  if (spoof) {
    const std::size_t a = spec.patch_top, b = spec.patch_top + spec.patch_size;
    for (std::size_t r = a; r < b; ++r)
      for (std::size_t c = a; c < b; ++c) {
        const bool on = ((r - a) / 4 + (c - a) / 4) % 2 == 0;
        img(r, c) = 0.5 * img(r, c) + (on ? 0.45 : 0.05);
      }
  }
  for (double& v : img.values()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

}  // namespace

Manifest generate_synthetic_corpus(const SyntheticSpec& spec, const std::string& dir) {
  require(spec.samples >= 2 && spec.samples % 2 == 0, ErrorCode::InvalidArgument,
          "synthetic corpus needs an even sample count >= 2");
  require(spec.size >= 16, ErrorCode::InvalidArgument, "image size must be >= 16");
  require(spec.patch_top + spec.patch_size <= spec.size, ErrorCode::InvalidArgument,
          "artifact square does not fit in the image");
  require(!spec.sensors.empty(), ErrorCode::InvalidArgument, "at least one sensor is required");
  require(spec.test_fraction >= 0.0 && spec.test_fraction < 1.0, ErrorCode::InvalidArgument,
          "test_fraction must lie in [0,1)");
  const auto types = spec.attack_types.empty() ? kDefaultAttackTypes : spec.attack_types;

  const fs::path root(dir);
  fs::create_directories(root / "images");
  fs::create_directories(root / "saliency");

  Grid sal(spec.size, spec.size);
  for (std::size_t r = spec.patch_top; r < spec.patch_top + spec.patch_size; ++r)
    for (std::size_t c = spec.patch_top; c < spec.patch_top + spec.patch_size; ++c) sal(r, c) = 1.0;
  save_saliency_png(SaliencyMap(sal, Granularity::FOI, SaliencySource::Synthetic),
                    (root / "saliency" / "artifact.png").string());

  nn::Rng rng(spec.seed);
  Manifest m;
  const std::size_t half = spec.samples / 2;
  const auto n_test = static_cast<std::size_t>(std::llround(spec.test_fraction * half));
  for (std::size_t i = 0; i < spec.samples; ++i) {
    const bool spoof = i % 2 == 1;
    const std::size_t k = i / 2;
    SampleRecord rec;
    char id[32];
    std::snprintf(id, sizeof id, "%s_%04zu", spoof ? "sp" : "bf", k);
    rec.sample_id = id;
    rec.image_path = "images/" + rec.sample_id + ".png";  // relative to the manifest
    rec.label = spoof ? Label::Spoof : Label::Bonafide;
    if (spoof) rec.attack_type = types[k % types.size()];
    rec.sensor = spec.sensors[k % spec.sensors.size()];
    rec.source_dataset = "synthetic";
    rec.saliency_path = "saliency/artifact.png";
    rec.saliency_source = SaliencySource::Synthetic;
    rec.split = k < n_test ? Split::Test : Split::Unassigned;
    save_gray(ridge_image(spec, spoof, rng), (root / rec.image_path).string());
    m.records.push_back(std::move(rec));
  }
  const std::string path = (root / "manifest.csv").string();
  save_manifest(m, path);
  return load_manifest(path);
}

}  // namespace sgpad
