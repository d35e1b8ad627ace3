#include "sgpad/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <opencv2/imgproc.hpp>

#include "sgpad/nn.hpp"

namespace sgpad {

void LimitedDataSpec::validate() const {
  require(bonafide_count > 0 && per_attack_count > 0, ErrorCode::InvalidArgument,
          "limited-data counts must be > 0");
  require(!attack_types.empty(), ErrorCode::InvalidArgument, "attack type list is empty");
  std::set<std::string> uniq(attack_types.begin(), attack_types.end());
  require(uniq.size() == attack_types.size(), ErrorCode::InvalidArgument,
          "attack types must be unique");
}

std::vector<std::size_t> allocate_per_sensor(const std::vector<std::size_t>& pool_sizes,
                                             std::size_t total, std::uint64_t seed) {
  const std::size_t available = std::accumulate(pool_sizes.begin(), pool_sizes.end(), std::size_t{0});
  require(available >= total, ErrorCode::Precondition, "sensor pools too small");
  std::vector<std::size_t> counts(pool_sizes.size(), 0);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < pool_sizes.size(); ++i)
    if (pool_sizes[i] > 0) order.push_back(i);
  // Seeded shuffle before the stable sort makes capacity ties seed-dependent.
  nn::Rng rng(seed);
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pool_sizes[a] < pool_sizes[b]; });
  std::size_t remaining = total;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t left = order.size() - pos;
    const std::size_t share = remaining / left;
    const std::size_t s = order[pos];
    if (pool_sizes[s] <= share) {
      counts[s] = pool_sizes[s];
      remaining -= pool_sizes[s];
      continue;
    }
    // Every sensor from here on can take at least share + 1.
    std::size_t extra = remaining - share * left;
    for (std::size_t q = pos; q < order.size(); ++q) counts[order[q]] = share;
    for (std::size_t q = order.size(); q > pos && extra > 0; --q, --extra) ++counts[order[q - 1]];
    remaining = 0;
    break;
  }
  return counts;
}

namespace {

std::vector<SampleRecord> draw_subclass(const std::vector<const SampleRecord*>& candidates,
                                        std::size_t n, const std::string& subclass,
                                        std::uint64_t seed) {
  require(candidates.size() >= n, ErrorCode::Precondition,
          "insufficient pool for subclass '" + subclass + "': need " + std::to_string(n) +
              ", have " + std::to_string(candidates.size()) + " (shortfall " +
              std::to_string(n - candidates.size()) + ")");
  std::map<std::string, std::vector<const SampleRecord*>> by_sensor;
  for (const auto* r : candidates) by_sensor[r->sensor].push_back(r);
  std::vector<std::size_t> sizes;
  for (const auto& [sensor, recs] : by_sensor) sizes.push_back(recs.size());
  const auto counts = allocate_per_sensor(sizes, n, seed);

  std::vector<SampleRecord> out;
  nn::Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::size_t k = 0;
  for (auto& [sensor, recs] : by_sensor) {
    std::vector<const SampleRecord*> pick = recs;
    std::sort(pick.begin(), pick.end(),
              [](const auto* a, const auto* b) { return a->sample_id < b->sample_id; });
    rng.shuffle(pick);
    for (std::size_t i = 0; i < counts[k]; ++i) {
      SampleRecord r = *pick[i];
      r.split = Split::Unassigned;
      out.push_back(std::move(r));
    }
    ++k;
  }
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& salt) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : salt) h = (h ^ c) * 1099511628211ULL;
  return seed ^ h;
}

}  // namespace

Manifest build_limited_manifest(const Manifest& pool, const LimitedDataSpec& spec) {
  spec.validate();
  pool.validate();
  std::vector<const SampleRecord*> bona;
  std::map<std::string, std::vector<const SampleRecord*>> spoof;
  for (const auto& r : pool.records) {
    if (r.label == Label::Bonafide) bona.push_back(&r);
    else spoof[*r.attack_type].push_back(&r);
  }
  Manifest out;
  out.quality_max_level = pool.quality_max_level;
  auto append = [&](std::vector<SampleRecord> v) {
    for (auto& r : v) {
      if (auto it = pool.saliency_granularity.find(r.sample_id); it != pool.saliency_granularity.end())
        out.saliency_granularity[r.sample_id] = it->second;
      out.records.push_back(std::move(r));
    }
  };
  // Check every subclass before drawing so the error names the first gap.
  for (const auto& t : spec.attack_types) {
    const std::size_t have = spoof.count(t) ? spoof[t].size() : 0;
    require(have >= spec.per_attack_count, ErrorCode::Precondition,
            "insufficient pool for subclass '" + t + "': need " +
                std::to_string(spec.per_attack_count) + ", have " + std::to_string(have) +
                " (shortfall " + std::to_string(spec.per_attack_count - have) + ")");
  }
  append(draw_subclass(bona, spec.bonafide_count, "bonafide", mix_seed(spec.seed, "bonafide")));
  for (const auto& t : spec.attack_types)
    append(draw_subclass(spoof[t], spec.per_attack_count, t, mix_seed(spec.seed, t)));
  return out;
}

Image preprocess(const Image& image, std::size_t target) {
  require(!image.empty(), ErrorCode::InvalidArgument, "cannot preprocess an empty image");
  require(target > 0, ErrorCode::InvalidArgument, "target size must be > 0");
  const std::size_t side = std::min(image.rows(), image.cols());
  const std::size_t r0 = (image.rows() - side) / 2;
  const std::size_t c0 = (image.cols() - side) / 2;
  Image crop(side, side);
  for (std::size_t i = 0; i < side; ++i)
    for (std::size_t j = 0; j < side; ++j) crop(i, j) = image(r0 + i, c0 + j);
  if (side == target) return crop;
  cv::Mat src(static_cast<int>(side), static_cast<int>(side), CV_64F, crop.values().data());
  cv::Mat dst;
  cv::resize(src, dst, cv::Size(static_cast<int>(target), static_cast<int>(target)), 0, 0,
             cv::INTER_LINEAR);
  const double* p = dst.ptr<double>(0);
  Image out(target, target, std::vector<double>(p, p + dst.total()));
  for (double& v : out.values()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

Manifest split_validation(const Manifest& manifest, double fraction, std::uint64_t seed) {
  require(fraction > 0.0 && fraction < 1.0, ErrorCode::InvalidArgument,
          "validation fraction must lie in (0,1)");
  Manifest out = manifest;
  std::array<std::vector<std::size_t>, 2> groups;
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    const auto& r = out.records[i];
    if (r.split == Split::Test) continue;
    groups[static_cast<std::size_t>(r.label)].push_back(i);
  }
  const std::size_t n = groups[0].size() + groups[1].size();
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  // Largest-remainder apportionment of k across the two labels.
  std::array<std::size_t, 2> quota{};
  std::array<double, 2> rem{};
  std::size_t given = 0;
  for (std::size_t l = 0; l < 2; ++l) {
    const double exact = n ? static_cast<double>(k) * static_cast<double>(groups[l].size()) /
                                 static_cast<double>(n)
                           : 0.0;
    quota[l] = static_cast<std::size_t>(std::floor(exact));
    rem[l] = exact - static_cast<double>(quota[l]);
    given += quota[l];
  }
  while (given < k) {
    const std::size_t l = rem[1] > rem[0] ? 1 : 0;
    ++quota[l];
    rem[l] = -1.0;
    ++given;
  }
  nn::Rng rng(seed);
  for (std::size_t l = 0; l < 2; ++l) {
    auto idx = groups[l];
    rng.shuffle(idx);
    for (std::size_t q = 0; q < idx.size(); ++q)
      out.records[idx[q]].split = q < quota[l] ? Split::Val : Split::Train;
  }
  return out;
}

}  // namespace sgpad
