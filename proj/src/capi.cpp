#include "sgpad/sgpad.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>

#include "sgpad/annotation.hpp"
#include "sgpad/assignment.hpp"
#include "sgpad/autoencoder.hpp"
#include "sgpad/blur.hpp"
#include "sgpad/image_io.hpp"
#include "sgpad/manifest.hpp"
#include "sgpad/metrics.hpp"
#include "sgpad/pipeline.hpp"
#include "sgpad/pseudosaliency.hpp"
#include "sgpad/scenario.hpp"
#include "sgpad/server.hpp"
#include "sgpad/synthetic.hpp"

struct sgpad_manifest {
  sgpad::Manifest m;
};
struct sgpad_saliency {
  sgpad::SaliencyMap s;
};
struct sgpad_scores {
  sgpad::ScoredSet s;
};
struct sgpad_server {
  std::shared_ptr<sgpad::AnnotationService> service;
  std::unique_ptr<sgpad::AnnotationServer> server;
};

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

thread_local std::string g_last_error;

template <class F>
sgpad_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return SGPAD_OK;
  } catch (const sgpad::Error& e) {
    g_last_error = e.what();
    return static_cast<sgpad_status>(static_cast<int>(e.code()));
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return SGPAD_ERR_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SGPAD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SGPAD_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  sgpad::require(p != nullptr, sgpad::ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const json& j) {
  if (out) *out = dup(j.dump(2));
}

json stats_json(const std::map<std::string, sgpad::MetricStat>& agg) {
  json j = json::object();
  for (const auto& [k, m] : agg) {
    j[k] = {{"mean", m.mean}};
    if (m.std) j[k]["std"] = *m.std;
  }
  return j;
}

sgpad::SaliencyMap load_record_saliency(const sgpad::Manifest& m, const sgpad::SampleRecord& r) {
  const auto it = m.saliency_granularity.find(r.sample_id);
  const auto g = it == m.saliency_granularity.end() ? sgpad::Granularity::FOI : it->second;
  return sgpad::SaliencyMap(sgpad::load_gray(*r.saliency_path), g, *r.saliency_source);
}

}  // namespace

extern "C" {

const char* sgpad_last_error(void) { return g_last_error.c_str(); }
const char* sgpad_version(void) { return "0.1.0"; }
void sgpad_string_free(char* s) { std::free(s); }

sgpad_status sgpad_manifest_load(const char* path, int check_files, sgpad_manifest** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new sgpad_manifest{sgpad::load_manifest(path, check_files != 0)};
  });
}

sgpad_status sgpad_manifest_save(const sgpad_manifest* m, const char* path) {
  return guard([&] {
    need(m, "manifest");
    need(path, "path");
    sgpad::save_manifest(m->m, path);
  });
}

void sgpad_manifest_free(sgpad_manifest* m) { delete m; }
size_t sgpad_manifest_size(const sgpad_manifest* m) { return m ? m->m.records.size() : 0; }

sgpad_status sgpad_manifest_build_limited(const sgpad_manifest* pool, size_t bonafide_count,
                                          size_t per_attack_count, const char* const* attack_types,
                                          size_t n_attack_types, uint64_t seed,
                                          sgpad_manifest** out) {
  return guard([&] {
    need(pool, "pool");
    need(out, "out");
    sgpad::LimitedDataSpec spec;
    spec.bonafide_count = bonafide_count;
    spec.per_attack_count = per_attack_count;
    spec.seed = seed;
    if (attack_types) spec.attack_types.assign(attack_types, attack_types + n_attack_types);
    *out = new sgpad_manifest{sgpad::build_limited_manifest(pool->m, spec)};
  });
}

sgpad_status sgpad_manifest_split(const sgpad_manifest* m, double val_fraction, uint64_t seed,
                                  sgpad_manifest** out) {
  return guard([&] {
    need(m, "manifest");
    need(out, "out");
    *out = new sgpad_manifest{sgpad::split_validation(m->m, val_fraction, seed)};
  });
}

sgpad_status sgpad_synthetic_corpus(const char* dir, size_t samples, size_t size,
                                    double test_fraction, uint64_t seed, sgpad_manifest** out) {
  return guard([&] {
    need(dir, "dir");
    sgpad::SyntheticSpec spec;
    spec.samples = samples;
    spec.size = size;
    spec.test_fraction = test_fraction;
    spec.seed = seed;
    // scale the artifact square with the image
    spec.patch_top = size * 80 / 224;
    spec.patch_size = std::max<std::size_t>(8, size * 64 / 224);
    auto m = sgpad::generate_synthetic_corpus(spec, dir);
    if (out) *out = new sgpad_manifest{std::move(m)};
  });
}

sgpad_status sgpad_saliency_load(const char* png_path, const char* granularity, const char* source,
                                 sgpad_saliency** out) {
  return guard([&] {
    need(png_path, "png_path");
    need(out, "out");
    const auto g = granularity ? sgpad::parse_granularity(granularity) : sgpad::Granularity::FOI;
    const auto s = source ? sgpad::parse_saliency_source(source) : sgpad::SaliencySource::Human;
    *out = new sgpad_saliency{sgpad::SaliencyMap(sgpad::load_gray(png_path), g, s)};
  });
}

sgpad_status sgpad_saliency_save(const sgpad_saliency* s, const char* png_path) {
  return guard([&] {
    need(s, "saliency");
    need(png_path, "png_path");
    sgpad::save_saliency_png(s->s, png_path);
  });
}

void sgpad_saliency_free(sgpad_saliency* s) { delete s; }
size_t sgpad_saliency_rows(const sgpad_saliency* s) { return s ? s->s.values().rows() : 0; }
size_t sgpad_saliency_cols(const sgpad_saliency* s) { return s ? s->s.values().cols() : 0; }

sgpad_status sgpad_saliency_values(const sgpad_saliency* s, double* buf, size_t len) {
  return guard([&] {
    need(s, "saliency");
    need(buf, "buf");
    const auto& g = s->s.values();
    sgpad::require(len >= g.raw().size(), sgpad::ErrorCode::Dimension, "buffer too small");
    std::copy(g.raw().begin(), g.raw().end(), buf);
  });
}

sgpad_status sgpad_saliency_to_aoi(const sgpad_saliency* foi, double threshold, sgpad_saliency** out) {
  return guard([&] {
    need(foi, "saliency");
    need(out, "out");
    *out = new sgpad_saliency{sgpad::to_aoi(foi->s, threshold)};
  });
}

sgpad_status sgpad_saliency_to_boi(const sgpad_saliency* aoi, sgpad_saliency** out) {
  return guard([&] {
    need(aoi, "saliency");
    need(out, "out");
    *out = new sgpad_saliency{sgpad::to_boi(aoi->s)};
  });
}

sgpad_status sgpad_minutiae_saliency(const char* minutiae_path, size_t rows, size_t cols,
                                     double radius, sgpad_saliency** out) {
  return guard([&] {
    need(minutiae_path, "minutiae_path");
    need(out, "out");
    *out = new sgpad_saliency{
        sgpad::minutiae_saliency(sgpad::load_minutiae(minutiae_path), rows, cols, radius)};
  });
}

sgpad_status sgpad_low_quality_saliency(const char* quality_path, const char* low_contrast_path,
                                        int max_level, sgpad_saliency** out) {
  return guard([&] {
    need(quality_path, "quality_path");
    need(low_contrast_path, "low_contrast_path");
    need(out, "out");
    *out = new sgpad_saliency{sgpad::low_quality_saliency(
        sgpad::load_quality_inputs(quality_path, low_contrast_path, max_level))};
  });
}

sgpad_status sgpad_autoencoder_train(const char* manifest_path, const char* source,
                                     const char* options_json, const char* model_path,
                                     char** metadata_json) {
  return guard([&] {
    need(manifest_path, "manifest_path");
    need(model_path, "model_path");
    const auto src = source ? sgpad::parse_saliency_source(source) : sgpad::SaliencySource::Human;
    sgpad::AutoencoderConfig cfg;
    if (options_json) {
      const json o = json::parse(options_json);
      cfg.rows = o.value("rows", cfg.rows);
      cfg.cols = o.value("cols", cfg.cols);
      cfg.base_channels = o.value("base_channels", cfg.base_channels);
      cfg.epochs = o.value("epochs", cfg.epochs);
      cfg.batch_size = o.value("batch_size", cfg.batch_size);
      cfg.learning_rate = o.value("learning_rate", cfg.learning_rate);
      cfg.seed = o.value("seed", cfg.seed);
    }
    sgpad::require(cfg.rows == cfg.cols, sgpad::ErrorCode::InvalidArgument,
                   "autoencoder input must be square");
    const auto m = sgpad::load_manifest(manifest_path);
    std::vector<std::pair<sgpad::Image, sgpad::SaliencyMap>> pairs;
    for (const auto& r : m.records) {
      if (!r.saliency_path || r.saliency_source != src) continue;
      const auto sal = load_record_saliency(m, r);
      pairs.emplace_back(sgpad::preprocess(sgpad::load_gray(r.image_path), cfg.rows),
                         sgpad::SaliencyMap(sgpad::preprocess(sal.values(), cfg.rows),
                                            sgpad::Granularity::FOI, src));
    }
    const auto model = sgpad::train_saliency_autoencoder(pairs, cfg);
    model.save(model_path);
    if (metadata_json) *metadata_json = dup(sgpad::read_file(std::string(model_path) + ".json"));
  });
}

sgpad_status sgpad_autoencoder_predict(const char* model_path, const char* image_path,
                                       sgpad_saliency** out) {
  return guard([&] {
    need(model_path, "model_path");
    need(image_path, "image_path");
    need(out, "out");
    const auto model = sgpad::SaliencyPredictor::load(model_path);
    const auto img = sgpad::preprocess(sgpad::load_gray(image_path), model.metadata().rows);
    *out = new sgpad_saliency{sgpad::predict_saliency(model, img)};
  });
}

sgpad_status sgpad_ingest_annotations(const char* manifest_path, const char* annotations_dir,
                                      const char* map_dir, size_t min_annotators,
                                      const char* out_manifest_path, char** warnings_json) {
  return guard([&] {
    need(manifest_path, "manifest_path");
    need(annotations_dir, "annotations_dir");
    need(map_dir, "map_dir");
    need(out_manifest_path, "out_manifest_path");
    const auto m = sgpad::load_manifest(manifest_path);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(annotations_dir))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<sgpad::AnnotationExport> exports;
    for (const auto& f : files) {
      try {
        exports.push_back(sgpad::parse_annotation(sgpad::read_file(f.string())));
      } catch (const sgpad::Error& e) {
        sgpad::fail(e.code(), f.filename().string() + ": " + e.what());
      }
    }
    const auto res = sgpad::ingest_annotations(exports, m, map_dir, min_annotators);
    sgpad::save_manifest(res.manifest, out_manifest_path);
    put(warnings_json, json{{"warnings", res.warnings}, {"written_maps", res.written_maps}});
  });
}

sgpad_status sgpad_assignment_build(const char* manifest_path, const char* const* annotators,
                                    size_t n_annotators, size_t target_per_sample, uint64_t seed,
                                    char** plan_json) {
  return guard([&] {
    need(manifest_path, "manifest_path");
    need(annotators, "annotators");
    need(plan_json, "plan_json");
    sgpad::AssignmentParams p;
    p.target_per_sample = target_per_sample;
    p.seed = seed;
    const auto plan = sgpad::build_assignment(sgpad::load_manifest(manifest_path, false),
                                              {annotators, annotators + n_annotators}, p);
    put(plan_json, sgpad::to_json(plan));
  });
}

sgpad_status sgpad_expand_blur(const char* manifest_path, int control, const char* out_dir,
                               size_t* n_written) {
  return guard([&] {
    need(manifest_path, "manifest_path");
    need(out_dir, "out_dir");
    const auto m = sgpad::load_manifest(manifest_path);
    std::vector<sgpad::ExpandedImage> images;
    if (control) {
      std::vector<sgpad::ControlSample> cs;
      for (const auto& r : m.records) cs.push_back({r.sample_id, sgpad::load_gray(r.image_path)});
      images = sgpad::expand_control(cs, {});
    } else {
      std::vector<sgpad::GuidedSample> gs;
      for (const auto& r : m.records) {
        sgpad::GuidedSample g{r.sample_id, sgpad::load_gray(r.image_path), std::nullopt};
        if (r.saliency_path) g.saliency = load_record_saliency(m, r);
        gs.push_back(std::move(g));
      }
      images = sgpad::expand_saliency_guided(gs, {});
    }
    const auto paths = sgpad::write_expansion(images, out_dir);
    if (n_written) *n_written = paths.size();
  });
}

sgpad_status sgpad_run_scenario(const char* config_path, const char* run_dir, char** report_json) {
  return guard([&] {
    need(config_path, "config_path");
    need(run_dir, "run_dir");
    const auto r = sgpad::run_scenario(sgpad::load_scenario_config(config_path), run_dir);
    put(report_json, sgpad::to_json(r));
  });
}

sgpad_status sgpad_alpha_sweep(const char* config_path, const double* alphas, size_t n_alphas,
                               const char* out_dir, char** report_json) {
  return guard([&] {
    need(config_path, "config_path");
    need(alphas, "alphas");
    need(out_dir, "out_dir");
    const auto reports = sgpad::alpha_sweep(sgpad::load_scenario_config(config_path),
                                            {alphas, alphas + n_alphas}, out_dir);
    json j = json::array();
    for (const auto& r : reports)
      j.push_back({{"alpha", r.config.alpha.value_or(0.0)},
                   {"run_dir", r.run_dir},
                   {"aggregate", stats_json(r.aggregate)}});
    put(report_json, j);
  });
}

sgpad_status sgpad_summarize_run_dir(const char* run_dir, const char* competitors_path,
                                     char** summary_json) {
  return guard([&] {
    need(run_dir, "run_dir");
    std::optional<std::vector<double>> comp;
    if (competitors_path) comp = sgpad::load_competitors(competitors_path);
    const auto s = sgpad::summarize_run_dir(run_dir, comp);
    json runs = json::array();
    for (const auto& e : s.runs) runs.push_back(sgpad::to_json(e));
    json j = {{"runs", runs}, {"aggregate", stats_json(s.aggregate)}};
    if (s.placement) j["placement"] = {{"best", s.placement->lo}, {"worst", s.placement->hi}};
    put(summary_json, j);
  });
}

sgpad_status sgpad_report_gain(const char* guided_aggregate, const char* baseline_aggregate,
                               const char* metric, char** gain_json) {
  return guard([&] {
    need(guided_aggregate, "guided_aggregate");
    need(baseline_aggregate, "baseline_aggregate");
    need(metric, "metric");
    auto mean_of = [&](const char* path) {
      const json j = json::parse(sgpad::read_file(path));
      const json& agg = j.contains("aggregate") ? j.at("aggregate") : j;
      sgpad::require(agg.contains(metric), sgpad::ErrorCode::NotFound,
                     std::string("metric '") + metric + "' not found in " + path);
      const json& v = agg.at(metric);
      return v.is_object() ? v.at("mean").get<double>() : v.get<double>();
    };
    const auto g = sgpad::normalized_gain(mean_of(guided_aggregate), mean_of(baseline_aggregate), metric);
    put(gain_json, sgpad::to_json(g));
  });
}

sgpad_status sgpad_normalized_gain(double guided, double baseline, double* gain) {
  return guard([&] {
    need(gain, "gain");
    *gain = sgpad::normalized_gain(guided, baseline).normalized_gain;
  });
}

sgpad_status sgpad_scores_load(const char* csv_path, sgpad_scores** out) {
  return guard([&] {
    need(csv_path, "csv_path");
    need(out, "out");
    *out = new sgpad_scores{sgpad::load_scores(csv_path)};
  });
}

void sgpad_scores_free(sgpad_scores* s) { delete s; }
size_t sgpad_scores_size(const sgpad_scores* s) { return s ? s->s.size() : 0; }

sgpad_status sgpad_scores_auc(const sgpad_scores* s, double* auc) {
  return guard([&] {
    need(s, "scores");
    need(auc, "auc");
    *auc = sgpad::roc_auc(s->s);
  });
}

sgpad_status sgpad_scores_evaluate(const sgpad_scores* validation, const sgpad_scores* test,
                                   char** report_json) {
  return guard([&] {
    need(validation, "validation");
    need(test, "test");
    put(report_json, sgpad::to_json(sgpad::evaluate(validation->s, test->s)));
  });
}

sgpad_status sgpad_server_create(const char* manifest_path, const char* plan_path,
                                 const char* storage_dir, sgpad_server** out) {
  return guard([&] {
    need(manifest_path, "manifest_path");
    need(plan_path, "plan_path");
    need(storage_dir, "storage_dir");
    need(out, "out");
    auto svc = std::make_shared<sgpad::AnnotationService>(
        sgpad::load_manifest(manifest_path),
        sgpad::assignment_from_json(json::parse(sgpad::read_file(plan_path))), storage_dir);
    auto* s = new sgpad_server{svc, std::make_unique<sgpad::AnnotationServer>(svc)};
    *out = s;
  });
}

void sgpad_server_free(sgpad_server* s) { delete s; }

sgpad_status sgpad_server_listen(sgpad_server* s, const char* host, int port) {
  return guard([&] {
    need(s, "server");
    s->server->listen(host ? host : "127.0.0.1", port);
  });
}

sgpad_status sgpad_server_start(sgpad_server* s, const char* host, int* port) {
  return guard([&] {
    need(s, "server");
    const int p = s->server->start(host ? host : "127.0.0.1");
    if (port) *port = p;
  });
}

sgpad_status sgpad_server_stop(sgpad_server* s) {
  return guard([&] {
    need(s, "server");
    s->server->stop();
  });
}

}  // extern "C"
