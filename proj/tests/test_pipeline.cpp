#include <algorithm>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <random>

#include "doctest.h"
#include "sgpad/image_io.hpp"
#include "sgpad/manifest.hpp"
#include "sgpad/pipeline.hpp"
#include "test_util.hpp"

using namespace sgpad;

namespace {

// Pool with `per_sensor` records for each (subclass, sensor).
Manifest make_pool(std::size_t per_sensor, const std::vector<std::string>& sensors,
                   const std::vector<std::string>& types = kDefaultAttackTypes) {
  Manifest m;
  std::size_t n = 0;
  auto add = [&](Label l, std::optional<std::string> t, const std::string& s) {
    SampleRecord r;
    r.sample_id = "r" + std::to_string(n++);
    r.image_path = r.sample_id + ".png";
    r.label = l;
    r.attack_type = std::move(t);
    r.sensor = s;
    r.source_dataset = "pool";
    m.records.push_back(r);
  };
  for (const auto& s : sensors) {
    for (std::size_t i = 0; i < per_sensor * 8; ++i) add(Label::Bonafide, std::nullopt, s);
    for (const auto& t : types)
      for (std::size_t i = 0; i < per_sensor; ++i) add(Label::Spoof, t, s);
  }
  return m;
}

// One-draw-at-a-time oracle: each draw goes to a least-filled sensor with
// capacity left.
std::vector<std::size_t> round_robin(const std::vector<std::size_t>& caps, std::size_t total) {
  std::vector<std::size_t> c(caps.size(), 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t best = caps.size();
    for (std::size_t i = 0; i < caps.size(); ++i)
      if (c[i] < caps[i] && (best == caps.size() || c[i] < c[best])) best = i;
    ++c[best];
  }
  return c;
}

}  // namespace

TEST_CASE("per-sensor allocation") {
  const auto a = allocate_per_sensor({100, 100, 100}, 50, 1);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::size_t>{16, 17, 17});

  std::set<std::vector<std::size_t>> seen;
  for (std::uint64_t s = 0; s < 20; ++s) seen.insert(allocate_per_sensor({100, 100, 100}, 50, s));
  CHECK(seen.size() > 1);  // remainder placement depends on the seed

  std::mt19937_64 rng(8);
  for (int t = 0; t < 300; ++t) {
    std::vector<std::size_t> caps(1 + rng() % 6);
    for (auto& c : caps) c = rng() % 30;
    const std::size_t sum = std::accumulate(caps.begin(), caps.end(), std::size_t{0});
    const std::size_t total = sum ? rng() % (sum + 1) : 0;
    auto got = allocate_per_sensor(caps, total, rng());
    auto want = round_robin(caps, total);
    CHECK(std::accumulate(got.begin(), got.end(), std::size_t{0}) == total);
    for (std::size_t i = 0; i < caps.size(); ++i) CHECK(got[i] <= caps[i]);
    // same level structure as the round-robin oracle
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);
  }
  CHECK_THROWS_AS(allocate_per_sensor({1, 2}, 4, 0), Error);
}

TEST_CASE("limited manifest with default spec") {
  const Manifest pool = make_pool(30, {"s1", "s2", "s3"});
  const Manifest m = build_limited_manifest(pool, {});
  REQUIRE(m.records.size() == 800);
  std::map<std::string, std::map<std::string, std::size_t>> counts;
  std::size_t bona = 0;
  for (const auto& r : m.records) {
    CHECK(r.split == Split::Unassigned);
    counts[r.label == Label::Bonafide ? "bonafide" : *r.attack_type][r.sensor]++;
    bona += r.label == Label::Bonafide;
  }
  CHECK(bona == 400);
  CHECK(counts.size() == 9);
  for (const auto& [sub, per] : counts) {
    std::size_t lo = 1000, hi = 0, sum = 0;
    for (const auto& [s, c] : per) lo = std::min(lo, c), hi = std::max(hi, c), sum += c;
    CHECK(sum == (sub == "bonafide" ? 400u : 50u));
    CHECK(hi - lo <= 1);
  }
  CHECK(build_limited_manifest(pool, {}).records == m.records);
}

TEST_CASE("limited manifest rejections") {
  auto types = kDefaultAttackTypes;
  types.pop_back();
  const Manifest missing = make_pool(30, {"s1", "s2"}, types);
  try {
    build_limited_manifest(missing, {});
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(kDefaultAttackTypes.back()) != std::string::npos);
  }
  const Manifest small = make_pool(10, {"s1", "s2"});
  CHECK_THROWS_AS(build_limited_manifest(small, {}), Error);
}

TEST_CASE("preprocess crops and resizes") {
  std::mt19937_64 rng(3);
  const Image img = testutil::random_grid(rng, 224, 224);
  CHECK(preprocess(img) == img);
  const Image flat = preprocess(Image(448, 448, 0.3));
  for (double v : flat.values()) CHECK(v == doctest::Approx(0.3).epsilon(1e-9));

  Image wide(200, 300);
  for (std::size_t r = 0; r < 200; ++r)
    for (std::size_t c = 0; c < 300; ++c) wide(r, c) = (c >= 50 && c < 250) ? 0.7 : 0.1;
  const Image out = preprocess(wide, 100);
  CHECK(out.rows() == 100);
  CHECK(out.cols() == 100);
  for (double v : out.values()) CHECK(v == doctest::Approx(0.7).epsilon(1e-9));
  // crop alone, no resize
  const Image same = preprocess(wide, 200);
  for (double v : same.values()) CHECK(v == doctest::Approx(0.7));
}

TEST_CASE("validation split is stratified and deterministic") {
  Manifest m = make_pool(50, {"a"});
  m.records.resize(800);  // 400 bonafide then 400 spoof
  const Manifest s = split_validation(m, 0.2, 5);
  std::size_t val = 0, train = 0, val_b = 0;
  for (const auto& r : s.records) {
    val += r.split == Split::Val;
    train += r.split == Split::Train;
    val_b += r.split == Split::Val && r.label == Label::Bonafide;
  }
  CHECK(val == 160);
  CHECK(train == 640);
  CHECK(val_b == 80);
  CHECK(split_validation(m, 0.2, 5).records == s.records);

  Manifest with_test = m;
  for (std::size_t i = 0; i < 100; ++i) with_test.records[i].split = Split::Test;
  for (std::size_t i = 0; i < 100; ++i)
    CHECK(split_validation(with_test, 0.2, 1).records[i].split == Split::Test);
  CHECK_THROWS_AS(split_validation(m, 1.5, 0), Error);
}

TEST_CASE("manifest CSV round trip with sidecar") {
  testutil::TempDir dir;
  Manifest m;
  SampleRecord a;
  a.sample_id = "a,1";
  a.image_path = "imgs/a.png";
  a.label = Label::Spoof;
  a.attack_type = "latex";
  a.sensor = "s\"q";
  a.source_dataset = "x";
  a.saliency_path = "maps/a.png";
  a.saliency_source = SaliencySource::Minutiae;
  a.split = Split::Train;
  SampleRecord b;
  b.sample_id = "b";
  b.image_path = "imgs/b.png";
  b.sensor = "s";
  b.source_dataset = "x";
  m.records = {a, b};
  m.saliency_granularity["a,1"] = Granularity::AOI;
  m.quality_max_level = 4;
  std::filesystem::create_directories(dir.path() / "imgs");
  std::filesystem::create_directories(dir.path() / "maps");
  save_gray(Image(4, 4), dir.file("imgs/a.png"));
  save_gray(Image(4, 4), dir.file("imgs/b.png"));
  save_gray(Image(4, 4), dir.file("maps/a.png"));

  const auto path = dir.file("m.csv");
  save_manifest(m, path);
  const Manifest back = load_manifest(path);
  REQUIRE(back.records.size() == 2);
  CHECK(back.records[0].sample_id == "a,1");
  CHECK(back.records[0].sensor == "s\"q");
  CHECK(back.records[0].attack_type == "latex");
  CHECK(back.records[0].image_path == dir.file("imgs/a.png"));
  CHECK(back.records[0].saliency_source == SaliencySource::Minutiae);
  CHECK(back.records[1].split == Split::Unassigned);
  CHECK(back.saliency_granularity.at("a,1") == Granularity::AOI);
  CHECK(back.quality_max_level == 4);

  std::filesystem::remove(dir.file("imgs/b.png"));
  try {
    load_manifest(path);
    FAIL("expected missing-file rejection");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("b") != std::string::npos);
  }
  CHECK(load_manifest(path, false).records.size() == 2);
}

TEST_CASE("manifest validation") {
  Manifest m;
  SampleRecord r;
  r.sample_id = "x";
  r.label = Label::Spoof;
  m.records = {r};
  CHECK_THROWS_AS(m.validate(), Error);
  m.records[0].attack_type = "latex";
  m.validate();
  m.records.push_back(m.records[0]);
  CHECK_THROWS_AS(m.validate(), Error);
  CHECK_THROWS_AS(manifest_from_csv("sample_id,image_path\nx,y\n"), Error);
}
