#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgpad/grid.hpp"
#include "sgpad/manifest.hpp"

namespace sgpad {

inline const std::vector<std::string> kDefaultAttackTypes = {
    "ecoflex", "gelatine", "latex", "liquid_ecoflex",
    "woodglue", "body_double", "mix", "rpro_fast"};

struct LimitedDataSpec {
  std::size_t bonafide_count = 400;
  std::size_t per_attack_count = 50;
  std::vector<std::string> attack_types = kDefaultAttackTypes;
  std::uint64_t seed = 0;

  void validate() const;
};

// Splits `total` draws across sensors with the given pool sizes: sensors too
// small for an even share are exhausted first, the rest share evenly, and
// the leftover remainder goes to the largest pools (ties broken by seed).
std::vector<std::size_t> allocate_per_sensor(const std::vector<std::size_t>& pool_sizes,
                                             std::size_t total, std::uint64_t seed);

// Class-, attack-type- and sensor-balanced subset of `pool`. Output splits
// are reset to unassigned.
Manifest build_limited_manifest(const Manifest& pool, const LimitedDataSpec& spec);

// Largest centered square crop, then bilinear resize to target x target.
Image preprocess(const Image& image, std::size_t target = 224);

// Marks round(fraction * N) non-test records as val, stratified by label;
// the other non-test records become train. Test records are untouched.
Manifest split_validation(const Manifest& manifest, double fraction, std::uint64_t seed);

}  // namespace sgpad
