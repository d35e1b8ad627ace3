// Command-line front end; talks to the library only through sgpad.h.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sgpad/sgpad.h"

namespace {

int check(sgpad_status st) {
  if (st != SGPAD_OK) std::cerr << "error (" << static_cast<int>(st) << "): " << sgpad_last_error() << "\n";
  return static_cast<int>(st);
}

// `text` is read after the call that fills it has returned.
int emit(sgpad_status st, char** text) {
  if (st == SGPAD_OK && *text) std::cout << *text << "\n";
  sgpad_string_free(*text);
  return check(st);
}

int save_map(sgpad_status st, sgpad_saliency* map, const std::string& out) {
  if (st != SGPAD_OK) return check(st);
  st = sgpad_saliency_save(map, out.c_str());
  sgpad_saliency_free(map);
  return check(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"saliency-guided fingerprint presentation attack detection"};
  app.require_subcommand(1);
  int rc = 0;

  // train
  std::string config, run_dir;
  auto* train = app.add_subcommand("train", "run one scenario configuration");
  train->add_option("--config", config, "scenario config JSON")->required()->check(CLI::ExistingFile);
  train->add_option("--run-dir", run_dir, "output directory")->required();
  train->callback([&] {
    char* out = nullptr;
    rc = emit(sgpad_run_scenario(config.c_str(), run_dir.c_str(), &out), &out);
  });

  // sweep
  std::vector<double> alphas{0.1, 0.3, 0.5, 0.7, 0.9};
  auto* sweep = app.add_subcommand("sweep", "alpha sweep over a cyborg configuration");
  sweep->add_option("--config", config)->required()->check(CLI::ExistingFile);
  sweep->add_option("--out-dir", run_dir)->required();
  sweep->add_option("--alphas", alphas, "alpha values")->delimiter(',');
  sweep->callback([&] {
    char* out = nullptr;
    rc = emit(sgpad_alpha_sweep(config.c_str(), alphas.data(), alphas.size(), run_dir.c_str(), &out), &out);
  });

  // report
  std::string competitors, guided, baseline, metric = "test.auc";
  auto* report = app.add_subcommand("report", "evaluate a run directory or compare two");
  report->add_option("--run-dir", run_dir);
  report->add_option("--competitors", competitors, "JSON list of competitor accuracies");
  auto* gain = report->add_subcommand("gain", "normalized gain between two aggregate.json files");
  gain->add_option("--guided", guided)->required()->check(CLI::ExistingFile);
  gain->add_option("--baseline", baseline)->required()->check(CLI::ExistingFile);
  gain->add_option("--metric", metric);
  gain->callback([&] {
    char* out = nullptr;
    rc = emit(sgpad_report_gain(guided.c_str(), baseline.c_str(), metric.c_str(), &out), &out);
  });
  report->callback([&] {
    if (gain->parsed()) return;
    if (run_dir.empty()) throw CLI::RequiredError("--run-dir");
    char* out = nullptr;
    rc = emit(sgpad_summarize_run_dir(run_dir.c_str(), competitors.empty() ? nullptr : competitors.c_str(),
                                      &out),
              &out);
  });

  // eval
  std::string val_scores, test_scores;
  auto* eval = app.add_subcommand("eval", "metrics from score files");
  eval->add_option("--val", val_scores)->required()->check(CLI::ExistingFile);
  eval->add_option("--test", test_scores)->required()->check(CLI::ExistingFile);
  eval->callback([&] {
    sgpad_scores *v = nullptr, *t = nullptr;
    rc = check(sgpad_scores_load(val_scores.c_str(), &v));
    if (!rc) rc = check(sgpad_scores_load(test_scores.c_str(), &t));
    if (!rc) {
      char* out = nullptr;
      rc = emit(sgpad_scores_evaluate(v, t, &out), &out);
    }
    sgpad_scores_free(v);
    sgpad_scores_free(t);
  });

  // manifest
  std::string manifest, out_path;
  std::uint64_t seed = 0;
  std::size_t bonafide = 400, per_attack = 50;
  double fraction = 0.2;
  std::vector<std::string> attack_types;
  auto* man = app.add_subcommand("manifest", "manifest construction");
  man->require_subcommand(1);
  auto* build = man->add_subcommand("build", "sensor-balanced limited-data manifest");
  build->add_option("--pool", manifest)->required()->check(CLI::ExistingFile);
  build->add_option("--out", out_path)->required();
  build->add_option("--bonafide", bonafide);
  build->add_option("--per-attack", per_attack);
  build->add_option("--attack-types", attack_types)->delimiter(',');
  build->add_option("--seed", seed);
  build->callback([&] {
    sgpad_manifest *pool = nullptr, *res = nullptr;
    rc = check(sgpad_manifest_load(manifest.c_str(), 0, &pool));
    std::vector<const char*> types;
    for (const auto& t : attack_types) types.push_back(t.c_str());
    if (!rc)
      rc = check(sgpad_manifest_build_limited(pool, bonafide, per_attack, types.empty() ? nullptr : types.data(),
                                              types.size(), seed, &res));
    if (!rc) rc = check(sgpad_manifest_save(res, out_path.c_str()));
    if (!rc) std::cout << sgpad_manifest_size(res) << " records written to " << out_path << "\n";
    sgpad_manifest_free(pool);
    sgpad_manifest_free(res);
  });
  auto* split = man->add_subcommand("split", "stratified validation split");
  split->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  split->add_option("--out", out_path)->required();
  split->add_option("--fraction", fraction);
  split->add_option("--seed", seed);
  split->callback([&] {
    sgpad_manifest *m = nullptr, *res = nullptr;
    rc = check(sgpad_manifest_load(manifest.c_str(), 0, &m));
    if (!rc) rc = check(sgpad_manifest_split(m, fraction, seed, &res));
    if (!rc) rc = check(sgpad_manifest_save(res, out_path.c_str()));
    sgpad_manifest_free(m);
    sgpad_manifest_free(res);
  });

  // ingest
  std::string ann_dir, map_dir;
  std::size_t min_annotators = 2;
  auto* ingest = app.add_subcommand("ingest", "fuse annotation exports into human saliency maps");
  ingest->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  ingest->add_option("--annotations", ann_dir)->required()->check(CLI::ExistingDirectory);
  ingest->add_option("--map-dir", map_dir)->required();
  ingest->add_option("--out", out_path)->required();
  ingest->add_option("--min-annotators", min_annotators);
  ingest->callback([&] {
    char* out = nullptr;
    rc = emit(sgpad_ingest_annotations(manifest.c_str(), ann_dir.c_str(), map_dir.c_str(), min_annotators,
                                       out_path.c_str(), &out),
              &out);
  });

  // pseudo
  std::string input, contrast;
  std::size_t rows = 0, cols = 0;
  double radius = 10.0;
  int max_level = 4;
  auto* pseudo = app.add_subcommand("pseudo", "pseudosaliency from minutiae or quality maps");
  pseudo->require_subcommand(1);
  auto* minu = pseudo->add_subcommand("minutiae", "stamp minutiae into a saliency map");
  minu->add_option("--minutiae", input)->required()->check(CLI::ExistingFile);
  minu->add_option("--rows", rows)->required();
  minu->add_option("--cols", cols)->required();
  minu->add_option("--radius", radius);
  minu->add_option("--out", out_path)->required();
  minu->callback([&] {
    sgpad_saliency* s = nullptr;
    rc = save_map(sgpad_minutiae_saliency(input.c_str(), rows, cols, radius, &s), s, out_path);
  });
  auto* lowq = pseudo->add_subcommand("low-quality", "saliency from block quality levels");
  lowq->add_option("--quality", input)->required()->check(CLI::ExistingFile);
  lowq->add_option("--low-contrast", contrast)->required()->check(CLI::ExistingFile);
  lowq->add_option("--max-level", max_level);
  lowq->add_option("--out", out_path)->required();
  lowq->callback([&] {
    sgpad_saliency* s = nullptr;
    rc = save_map(sgpad_low_quality_saliency(input.c_str(), contrast.c_str(), max_level, &s), s, out_path);
  });

  // autoencoder
  std::string model, source = "human", options;
  auto* ae = app.add_subcommand("autoencoder", "saliency autoencoder");
  ae->require_subcommand(1);
  auto* ae_train = ae->add_subcommand("train", "fit on manifest samples with saliency");
  ae_train->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  ae_train->add_option("--source", source);
  ae_train->add_option("--options", options, "JSON object of training options");
  ae_train->add_option("--model", model)->required();
  ae_train->callback([&] {
    char* out = nullptr;
    rc = emit(sgpad_autoencoder_train(manifest.c_str(), source.c_str(), options.empty() ? nullptr : options.c_str(),
                                      model.c_str(), &out),
              &out);
  });
  auto* ae_pred = ae->add_subcommand("predict", "predict a saliency map for one image");
  ae_pred->add_option("--model", model)->required()->check(CLI::ExistingFile);
  ae_pred->add_option("--image", input)->required()->check(CLI::ExistingFile);
  ae_pred->add_option("--out", out_path)->required();
  ae_pred->callback([&] {
    sgpad_saliency* s = nullptr;
    rc = save_map(sgpad_autoencoder_predict(model.c_str(), input.c_str(), &s), s, out_path);
  });

  // expand
  bool control = false;
  auto* expand = app.add_subcommand("expand", "blur-based training set expansion");
  expand->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  expand->add_option("--out-dir", out_path)->required();
  expand->add_flag("--control", control, "blur whole images and keep originals");
  expand->callback([&] {
    std::size_t n = 0;
    rc = check(sgpad_expand_blur(manifest.c_str(), control ? 1 : 0, out_path.c_str(), &n));
    if (!rc) std::cout << n << " images written to " << out_path << "\n";
  });

  // synth
  std::size_t samples = 256, size = 224;
  double test_fraction = 0.25;
  auto* synth = app.add_subcommand("synth", "generate a synthetic two-class corpus");
  synth->add_option("--out-dir", out_path)->required();
  synth->add_option("--samples", samples);
  synth->add_option("--size", size);
  synth->add_option("--test-fraction", test_fraction);
  synth->add_option("--seed", seed);
  synth->callback([&] {
    sgpad_manifest* m = nullptr;
    rc = check(sgpad_synthetic_corpus(out_path.c_str(), samples, size, test_fraction, seed, &m));
    if (!rc) std::cout << sgpad_manifest_size(m) << " samples written to " << out_path << "\n";
    sgpad_manifest_free(m);
  });

  // assign / serve
  std::vector<std::string> annotators;
  std::size_t target = 2;
  auto* assign = app.add_subcommand("assign", "build the annotator assignment plan");
  assign->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  assign->add_option("--annotators", annotators)->required()->delimiter(',');
  assign->add_option("--target", target);
  assign->add_option("--seed", seed);
  assign->callback([&] {
    std::vector<const char*> ids;
    for (const auto& a : annotators) ids.push_back(a.c_str());
    char* out = nullptr;
    rc = emit(sgpad_assignment_build(manifest.c_str(), ids.data(), ids.size(), target, seed, &out), &out);
  });

  std::string plan, storage = ".", host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "annotation backend");
  serve->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  serve->add_option("--plan", plan)->required()->check(CLI::ExistingFile);
  serve->add_option("--storage", storage);
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->callback([&] {
    sgpad_server* s = nullptr;
    rc = check(sgpad_server_create(manifest.c_str(), plan.c_str(), storage.c_str(), &s));
    if (!rc) {
      std::cerr << "listening on " << host << ":" << port << "\n";
      rc = check(sgpad_server_listen(s, host.c_str(), port));
    }
    sgpad_server_free(s);
  });

  CLI11_PARSE(app, argc, argv);
  return rc;
}
