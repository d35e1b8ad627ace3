#include <random>

#include "doctest.h"
#include "sgpad/saliency.hpp"
#include "test_util.hpp"

using namespace sgpad;

namespace {

SaliencyMap foi(Grid g) { return SaliencyMap(std::move(g), Granularity::FOI, SaliencySource::Human); }
SaliencyMap aoi(Grid g) { return SaliencyMap(std::move(g), Granularity::AOI, SaliencySource::Human); }

}  // namespace

TEST_CASE("fusion is the per-pixel mean") {
  SUBCASE("extremes") {
    std::vector<SaliencyMap> maps{foi(Grid(1, 1, 1.0)), foi(Grid(1, 1, 0.0))};
    CHECK(fuse_annotations(maps).values()(0, 0) == 0.5);
  }
  SUBCASE("identical maps") {
    std::mt19937_64 rng(1);
    Grid g = testutil::random_grid(rng, 5, 7);
    std::vector<SaliencyMap> maps{foi(g), foi(g)};
    const auto f = fuse_annotations(maps);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(f.values()[i] == doctest::Approx(g[i]).epsilon(1e-15));
  }
  SUBCASE("three annotators against loop oracle") {
    std::vector<SaliencyMap> maps{foi(Grid(1, 1, 0.2)), foi(Grid(1, 1, 0.6)), foi(Grid(1, 1, 0.7))};
    CHECK(fuse_annotations(maps).values()(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    std::mt19937_64 rng(2);
    std::vector<SaliencyMap> many;
    for (int i = 0; i < 4; ++i) many.push_back(foi(testutil::random_grid(rng, 6, 3)));
    const auto f = fuse_annotations(many);
    for (std::size_t r = 0; r < 6; ++r)
      for (std::size_t c = 0; c < 3; ++c) {
        double acc = 0;
        for (const auto& m : many) acc += m(r, c);
        CHECK(f(r, c) == doctest::Approx(acc / 4).epsilon(1e-12));
      }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(fuse_annotations(std::vector<SaliencyMap>{}), Error);
    std::vector<SaliencyMap> bad{foi(Grid(2, 2)), foi(Grid(2, 3))};
    CHECK_THROWS_AS(fuse_annotations(bad), Error);
  }
}

TEST_CASE("map construction validates invariants") {
  CHECK_THROWS_AS(foi(Grid(1, 1, 1.5)), Error);
  CHECK_THROWS_AS(foi(Grid(1, 1, -0.1)), Error);
  CHECK_THROWS_AS(aoi(Grid(1, 1, 0.5)), Error);
  Grid l(3, 3);
  l(0, 0) = 1;
  l(2, 2) = 1;
  CHECK_THROWS_AS(SaliencyMap(l, Granularity::BOI, SaliencySource::Human), Error);
}

TEST_CASE("to_aoi thresholds strictly") {
  CHECK(to_aoi(foi(Grid(1, 2, std::vector<double>{0.2, 0.6})), 0.5).values() ==
        Grid(1, 2, std::vector<double>{0, 1}));
  CHECK(to_aoi(foi(Grid(4, 4)), 0.3).values() == Grid(4, 4));
  const auto a = to_aoi(foi(Grid(1, 3, std::vector<double>{0.49, 0.50, 0.51})), kAutoencoderAoiThreshold);
  CHECK(a.values() == Grid(1, 3, std::vector<double>{0, 0, 1}));
  CHECK(a.granularity() == Granularity::AOI);
  CHECK_THROWS_AS(to_aoi(foi(Grid(1, 1)), 1.5), Error);
}

TEST_CASE("to_boi fills the bounding rectangle") {
  Grid g(10, 10);
  g(2, 3) = 1;
  g(5, 7) = 1;
  const auto b = to_boi(aoi(g));
  for (std::size_t r = 0; r < 10; ++r)
    for (std::size_t c = 0; c < 10; ++c)
      CHECK(b(r, c) == ((r >= 2 && r <= 5 && c >= 3 && c <= 7) ? 1.0 : 0.0));
  Grid one(9, 9);
  one(4, 4) = 1;
  CHECK(to_boi(aoi(one)).values() == one);
  CHECK(to_boi(aoi(Grid(5, 5))).values() == Grid(5, 5));
  CHECK_THROWS_AS(to_boi(foi(Grid(2, 2, 0.5))), Error);
}

TEST_CASE("minmax normalization") {
  CHECK(minmax_normalize(Grid(1, 2, std::vector<double>{1, 3})) == Grid(1, 2, std::vector<double>{0, 1}));
  CHECK(minmax_normalize(Grid(3, 3, 0.7)) == Grid(3, 3));
  CHECK(minmax_normalize(Grid(1, 3, std::vector<double>{2, 4, 6})) ==
        Grid(1, 3, std::vector<double>{0, 0.5, 1}));
}

TEST_CASE("granularity chain properties on random maps") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t r = 3 + rng() % 12, c = 3 + rng() % 12;
    Grid g = testutil::random_grid(rng, r, c);
    const double t = 0.5 + 0.5 * u(rng);
    const auto a = to_aoi(foi(g), t);
    const auto b = to_boi(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK((a.values()[i] == 0.0 || a.values()[i] == 1.0));
      CHECK((b.values()[i] == 0.0 || b.values()[i] == 1.0));
      CHECK(a.values()[i] <= b.values()[i]);
    }
    CHECK(to_boi(b).values() == b.values());
    CHECK(to_aoi(a, t).values() == a.values());
  }
}

TEST_CASE("derive_granularity and defaults") {
  CHECK(default_aoi_threshold(SaliencySource::Human) == kHumanAoiThreshold);
  CHECK(default_aoi_threshold(SaliencySource::Autoencoder) == kAutoencoderAoiThreshold);
  Grid g(4, 4);
  g(1, 1) = 0.3;
  g(2, 3) = 0.8;
  const auto m = foi(g);
  CHECK(derive_granularity(m, Granularity::FOI, 0.0).values() == g);
  CHECK(derive_granularity(m, Granularity::AOI, 0.5).values()(1, 1) == 0.0);
  const auto b = derive_granularity(m, Granularity::BOI, 0.0);
  CHECK(b.granularity() == Granularity::BOI);
  CHECK(b(1, 3) == 1.0);
  CHECK(b(0, 0) == 0.0);
}

TEST_CASE("string conversions round-trip") {
  for (auto g : {Granularity::FOI, Granularity::AOI, Granularity::BOI})
    CHECK(parse_granularity(to_string(g)) == g);
  for (auto s : {SaliencySource::Human, SaliencySource::Minutiae, SaliencySource::LowQuality,
                 SaliencySource::Autoencoder, SaliencySource::Synthetic})
    CHECK(parse_saliency_source(to_string(s)) == s);
  CHECK_THROWS_AS(parse_granularity("XYZ"), Error);
}

TEST_CASE("png persistence quantizes to 8 bits") {
  testutil::TempDir dir;
  std::mt19937_64 rng(3);
  Grid g = testutil::random_grid(rng, 12, 17);
  save_saliency_png(foi(g), dir.file("m.png"));
  const auto back = load_saliency_png(dir.file("m.png"), Granularity::FOI, SaliencySource::Human);
  REQUIRE(back.rows() == 12);
  REQUIRE(back.cols() == 17);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(back.values()[i] - g[i]) <= 0.5 / 255 + 1e-12);
}
