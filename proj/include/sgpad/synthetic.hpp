#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgpad/manifest.hpp"

namespace sgpad {

// Small synthetic fingerprint-like corpus for smoke tests and demos. Spoof
// images carry a checkerboard artifact inside a fixed square; every sample
// ships a saliency map marking that square.
struct SyntheticSpec {
  std::size_t samples = 64;  // split evenly between bonafide and spoof
  std::size_t size = 224;
  std::size_t patch_top = 80;
  std::size_t patch_size = 64;
  double noise = 0.05;
  double test_fraction = 0.0;
  std::vector<std::string> attack_types;  // empty -> default attack list
  std::vector<std::string> sensors{"sensor_a", "sensor_b"};
  std::uint64_t seed = 0;
};

// Writes images/, saliency/ and manifest.csv under `dir`.
Manifest generate_synthetic_corpus(const SyntheticSpec& spec, const std::string& dir);

}  // namespace sgpad
