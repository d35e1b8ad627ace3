#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "sgpad/sgpad.h"
#include "test_util.hpp"

using nlohmann::json;

TEST_CASE("error reporting") {
  sgpad_manifest* m = nullptr;
  CHECK(sgpad_manifest_load("/nonexistent/m.csv", 1, &m) != SGPAD_OK);
  CHECK(m == nullptr);
  CHECK(std::strlen(sgpad_last_error()) > 0);
  CHECK(sgpad_manifest_load(nullptr, 1, &m) == SGPAD_ERR_INVALID_ARGUMENT);
  double g = 0;
  CHECK(sgpad_normalized_gain(0.5, 1.0, &g) == SGPAD_ERR_INVALID_ARGUMENT);
  CHECK(sgpad_normalized_gain(0.961, 0.946, &g) == SGPAD_OK);
  CHECK(std::string(sgpad_last_error()).empty());
  CHECK(g == doctest::Approx(0.2778).epsilon(1e-3));
}

TEST_CASE("corpus, manifest and experiment through the C API") {
  testutil::TempDir dir;
  sgpad_manifest* m = nullptr;
  REQUIRE(sgpad_synthetic_corpus(dir.file("c").c_str(), 32, 32, 0.25, 1, &m) == SGPAD_OK);
  CHECK(sgpad_manifest_size(m) == 32);
  sgpad_manifest* split = nullptr;
  CHECK(sgpad_manifest_split(m, 0.25, 2, &split) == SGPAD_OK);
  CHECK(sgpad_manifest_save(split, dir.file("split.csv").c_str()) == SGPAD_OK);
  sgpad_manifest_free(split);
  sgpad_manifest* lim = nullptr;
  CHECK(sgpad_manifest_build_limited(m, 400, 50, nullptr, 0, 0, &lim) == SGPAD_ERR_PRECONDITION);
  sgpad_manifest_free(m);

  json cfg = {{"scenario", "S3"},        {"manifest_path", "c/manifest.csv"},
              {"guidance", "cyborg"},    {"saliency_source", "synthetic"},
              {"alpha", 0.5},            {"runs", 1},
              {"epochs", 1},             {"input_size", 32},
              {"optimizer", {{"batch_size", 8}}}};
  std::ofstream(dir.file("cfg.json")) << cfg.dump();
  char* out = nullptr;
  REQUIRE(sgpad_run_scenario(dir.file("cfg.json").c_str(), dir.file("run").c_str(), &out) == SGPAD_OK);
  const auto rep = json::parse(out);
  sgpad_string_free(out);
  CHECK(rep["runs"].size() == 1);

  sgpad_scores *v = nullptr, *t = nullptr;
  REQUIRE(sgpad_scores_load(dir.file("run/run_0/val_scores.csv").c_str(), &v) == SGPAD_OK);
  REQUIRE(sgpad_scores_load(dir.file("run/run_0/test_scores.csv").c_str(), &t) == SGPAD_OK);
  double auc = -1;
  CHECK(sgpad_scores_auc(t, &auc) == SGPAD_OK);
  CHECK(auc == rep["runs"][0]["test"]["auc"].get<double>());
  CHECK(sgpad_scores_evaluate(v, t, &out) == SGPAD_OK);
  sgpad_string_free(out);
  sgpad_scores_free(v);
  sgpad_scores_free(t);

  CHECK(sgpad_summarize_run_dir(dir.file("run").c_str(), nullptr, &out) == SGPAD_OK);
  sgpad_string_free(out);
  CHECK(sgpad_report_gain(dir.file("run/aggregate.json").c_str(), dir.file("run/aggregate.json").c_str(),
                          "test.auc", &out) == (auc < 1.0 ? SGPAD_OK : SGPAD_ERR_INVALID_ARGUMENT));
  sgpad_string_free(out);
  out = nullptr;
  CHECK(sgpad_report_gain(dir.file("run/aggregate.json").c_str(), dir.file("run/aggregate.json").c_str(),
                          "no.such", &out) == SGPAD_ERR_NOT_FOUND);

  size_t n = 0;
  CHECK(sgpad_expand_blur(dir.file("c/manifest.csv").c_str(), 1, dir.file("exp").c_str(), &n) == SGPAD_OK);
  CHECK(n == 32 * 9);
}

TEST_CASE("saliency handles") {
  testutil::TempDir dir;
  std::ofstream(dir.file("m.txt")) << "x,y\n10,10\n";
  sgpad_saliency* s = nullptr;
  REQUIRE(sgpad_minutiae_saliency(dir.file("m.txt").c_str(), 20, 30, 10.0, &s) == SGPAD_OK);
  CHECK(sgpad_saliency_rows(s) == 20);
  CHECK(sgpad_saliency_cols(s) == 30);
  std::vector<double> buf(600);
  CHECK(sgpad_saliency_values(s, buf.data(), buf.size()) == SGPAD_OK);
  CHECK(buf[10 * 30 + 10] == 1.0);
  CHECK(sgpad_saliency_values(s, buf.data(), 5) == SGPAD_ERR_DIMENSION);
  sgpad_saliency *a = nullptr, *b = nullptr;
  CHECK(sgpad_saliency_to_aoi(s, 0.0, &a) == SGPAD_OK);
  CHECK(sgpad_saliency_to_boi(a, &b) == SGPAD_OK);
  CHECK(sgpad_saliency_to_boi(s, &b) != SGPAD_OK);
  CHECK(sgpad_saliency_save(a, dir.file("a.png").c_str()) == SGPAD_OK);
  sgpad_saliency* loaded = nullptr;
  CHECK(sgpad_saliency_load(dir.file("a.png").c_str(), "AOI", "minutiae", &loaded) == SGPAD_OK);
  CHECK(sgpad_saliency_load(dir.file("a.png").c_str(), "QQQ", "minutiae", &loaded) == SGPAD_ERR_PARSE);
  sgpad_saliency_free(s);
  sgpad_saliency_free(a);
  sgpad_saliency_free(b);
  sgpad_saliency_free(loaded);
}
