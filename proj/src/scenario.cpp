#include "sgpad/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "sgpad/image_io.hpp"
#include "sgpad/losses.hpp"
#include "sgpad/manifest.hpp"
#include "sgpad/pipeline.hpp"

namespace sgpad {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Scenario s) {
  static constexpr std::string_view names[] = {"S1", "S2", "S3", "S4", "S5"};
  return names[static_cast<int>(s)];
}

std::string_view to_string(Guidance g) {
  switch (g) {
    case Guidance::None: return "none";
    case Guidance::Cyborg: return "cyborg";
    case Guidance::Blur: return "blur";
  }
  return "none";
}

namespace {

Scenario parse_scenario(const std::string& s) {
  if (s == "S1") return Scenario::S1;
  if (s == "S2") return Scenario::S2;
  if (s == "S3") return Scenario::S3;
  if (s == "S4") return Scenario::S4;
  if (s == "S5") return Scenario::S5;
  fail(ErrorCode::Parse, "unknown scenario '" + s + "'");
}

Guidance parse_guidance(const std::string& s) {
  if (s == "none") return Guidance::None;
  if (s == "cyborg") return Guidance::Cyborg;
  if (s == "blur") return Guidance::Blur;
  fail(ErrorCode::Parse, "unknown guidance '" + s + "'");
}

}  // namespace

void ScenarioConfig::validate() const {
  require(!manifest_path.empty(), ErrorCode::InvalidArgument, "manifest_path is required");
  require(runs >= 1, ErrorCode::InvalidArgument, "runs must be >= 1");
  require(epochs >= 1, ErrorCode::InvalidArgument, "epochs must be >= 1");
  require(optimizer.name == "adam", ErrorCode::InvalidArgument,
          "only the adam optimizer is supported");
  require(optimizer.learning_rate > 0.0, ErrorCode::InvalidArgument, "learning rate must be > 0");
  require(optimizer.batch_size >= 1, ErrorCode::InvalidArgument, "batch size must be >= 1");
  require(input_size > 0, ErrorCode::InvalidArgument, "input_size must be > 0");
  require(validation_fraction > 0.0 && validation_fraction < 1.0, ErrorCode::InvalidArgument,
          "validation_fraction must lie in (0,1)");
  if (guidance == Guidance::Cyborg) {
    require(alpha.has_value(), ErrorCode::InvalidArgument, "cyborg guidance requires alpha");
    require(saliency_source.has_value(), ErrorCode::InvalidArgument,
            "cyborg guidance requires saliency_source");
    LossConfig{*alpha}.validate();
  }
  if (guidance == Guidance::Blur) {
    require(saliency_source.has_value() || blur_control, ErrorCode::InvalidArgument,
            "blur guidance requires saliency_source or the control flag");
    blur.validate();
  }
  if (scenario == Scenario::S1 || scenario == Scenario::S2)
    require(guidance == Guidance::None, ErrorCode::InvalidArgument,
            "scenarios S1/S2 are unguided baselines (guidance must be none)");
  if (aoi_threshold)
    require(*aoi_threshold >= 0.0 && *aoi_threshold <= 1.0, ErrorCode::InvalidArgument,
            "aoi_threshold must lie in [0,1]");
  if (guidance != Guidance::None && saliency_source == SaliencySource::Autoencoder)
    require(exclude_manifest.has_value(), ErrorCode::InvalidArgument,
            "autoencoder-guided runs need exclude_manifest listing the autoencoder's training samples");
}

ScenarioConfig scenario_config_from_json(const json& j) {
  ScenarioConfig c;
  try {
    c.scenario = parse_scenario(j.at("scenario").get<std::string>());
    c.manifest_path = j.at("manifest_path").get<std::string>();
    c.backbone = j.value("backbone", c.backbone);
    if (j.contains("backbone_options")) {
      const auto& b = j["backbone_options"];
      c.backbone_options.stem_pool = b.value("stem_pool", c.backbone_options.stem_pool);
      c.backbone_options.channels = b.value("channels", c.backbone_options.channels);
    }
    c.guidance = parse_guidance(j.value("guidance", std::string("none")));
    if (j.contains("saliency_source") && !j["saliency_source"].is_null())
      c.saliency_source = parse_saliency_source(j["saliency_source"].get<std::string>());
    if (j.contains("granularity") && !j["granularity"].is_null())
      c.granularity = parse_granularity(j["granularity"].get<std::string>());
    if (j.contains("alpha") && !j["alpha"].is_null()) c.alpha = j["alpha"].get<double>();
    c.runs = j.value("runs", c.runs);
    c.seed_base = j.value("seed_base", c.seed_base);
    if (j.contains("optimizer")) {
      const auto& o = j["optimizer"];
      c.optimizer.name = o.value("name", c.optimizer.name);
      c.optimizer.learning_rate = o.value("learning_rate", c.optimizer.learning_rate);
      c.optimizer.batch_size = o.value("batch_size", c.optimizer.batch_size);
    }
    c.epochs = j.value("epochs", c.epochs);
    c.input_size = j.value("input_size", c.input_size);
    c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
    if (j.contains("aoi_threshold") && !j["aoi_threshold"].is_null())
      c.aoi_threshold = j["aoi_threshold"].get<double>();
    if (j.contains("blur")) {
      const auto& b = j["blur"];
      c.blur.radii = b.value("radii", c.blur.radii);
      c.blur.mask_smoothing_radius = b.value("mask_smoothing_radius", c.blur.mask_smoothing_radius);
      c.blur_control = b.value("control", false);
    }
    if (j.contains("exclude_manifest") && !j["exclude_manifest"].is_null())
      c.exclude_manifest = j["exclude_manifest"].get<std::string>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("bad scenario config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const ScenarioConfig& c) {
  json j = {{"scenario", to_string(c.scenario)},
            {"manifest_path", c.manifest_path},
            {"backbone", c.backbone},
            {"backbone_options",
             {{"stem_pool", c.backbone_options.stem_pool},
              {"channels", c.backbone_options.channels}}},
            {"guidance", to_string(c.guidance)},
            {"saliency_source", c.saliency_source ? json(to_string(*c.saliency_source)) : json()},
            {"granularity", c.granularity ? json(to_string(*c.granularity)) : json()},
            {"alpha", c.alpha ? json(*c.alpha) : json()},
            {"runs", c.runs},
            {"seed_base", c.seed_base},
            {"optimizer",
             {{"name", c.optimizer.name},
              {"learning_rate", c.optimizer.learning_rate},
              {"batch_size", c.optimizer.batch_size}}},
            {"epochs", c.epochs},
            {"input_size", c.input_size},
            {"validation_fraction", c.validation_fraction},
            {"aoi_threshold", c.aoi_threshold ? json(*c.aoi_threshold) : json()},
            {"blur",
             {{"radii", c.blur.radii},
              {"mask_smoothing_radius", c.blur.mask_smoothing_radius},
              {"control", c.blur_control}}},
            {"exclude_manifest", c.exclude_manifest ? json(*c.exclude_manifest) : json()}};
  return j;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Parse, std::string("bad scenario config JSON: ") + e.what());
  }
  // Relative manifest paths are resolved against the config's directory.
  ScenarioConfig c = scenario_config_from_json(j);
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && fs::path(p).is_relative()) p = (base / p).lexically_normal().string();
  };
  resolve(c.manifest_path);
  if (c.exclude_manifest) resolve(*c.exclude_manifest);
  return c;
}

namespace {

struct Sample {
  std::string id;
  Label label = Label::Bonafide;
  std::optional<std::string> attack_type;
  Image image;
  std::optional<SaliencyMap> saliency;
  Grid target;  // alignment target at feature resolution, built lazily
};

struct Dataset {
  std::vector<Sample> train, val, test;
};

double spoof_score(const std::vector<double>& logits) {
  return 1.0 / (1.0 + std::exp(logits[0] - logits[1]));
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Dataset load_dataset(const ScenarioConfig& cfg) {
  Manifest m = load_manifest(cfg.manifest_path);
  if (cfg.exclude_manifest) {
    const Manifest ex = load_manifest(*cfg.exclude_manifest, false);
    std::set<std::string> drop;
    for (const auto& r : ex.records) drop.insert(r.sample_id);
    std::erase_if(m.records, [&](const SampleRecord& r) {
      return r.split != Split::Test && r.split != Split::Val && drop.count(r.sample_id) > 0;
    });
  }
  const bool has_val = std::any_of(m.records.begin(), m.records.end(),
                                   [](const auto& r) { return r.split == Split::Val; });
  if (!has_val) m = split_validation(m, cfg.validation_fraction, cfg.seed_base);

  const Granularity gran = cfg.granularity.value_or(Granularity::FOI);
  Dataset ds;
  for (const auto& r : m.records) {
    Sample s;
    s.id = r.sample_id;
    s.label = r.label;
    s.attack_type = r.attack_type;
    s.image = preprocess(load_gray(r.image_path), cfg.input_size);
    if (cfg.saliency_source && r.saliency_path && r.saliency_source == cfg.saliency_source) {
      const SaliencyMap raw(preprocess(load_gray(*r.saliency_path), cfg.input_size),
                            Granularity::FOI, *r.saliency_source);
      const double thr = cfg.aoi_threshold.value_or(default_aoi_threshold(*r.saliency_source));
      s.saliency = derive_granularity(raw, gran, thr);
    }
    switch (r.split) {
      case Split::Val: ds.val.push_back(std::move(s)); break;
      case Split::Test: ds.test.push_back(std::move(s)); break;
      default: ds.train.push_back(std::move(s)); break;
    }
  }
  require(!ds.train.empty(), ErrorCode::Precondition, "no training samples after splitting");
  require(!ds.val.empty(), ErrorCode::Precondition, "no validation samples after splitting");
  return ds;
}

// Replaces the training set with the blur-expanded images, materialized
// under `dir` and read back from disk.
void expand_training_set(Dataset& ds, const ScenarioConfig& cfg, const std::string& dir) {
  std::vector<ExpandedImage> out;
  if (cfg.blur_control) {
    std::vector<ControlSample> cs;
    for (const auto& s : ds.train) cs.push_back({s.id, s.image});
    out = expand_control(cs, cfg.blur);
  } else {
    std::vector<GuidedSample> gs;
    for (const auto& s : ds.train) gs.push_back({s.id, s.image, s.saliency});
    out = expand_saliency_guided(gs, cfg.blur);
  }
  const auto paths = write_expansion(out, dir);
  std::map<std::string, const Sample*> by_id;
  for (const auto& s : ds.train) by_id[s.id] = &s;
  std::vector<Sample> expanded;
  expanded.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Sample& src = *by_id.at(out[i].sample_id);
    Sample s;
    s.id = src.id + (out[i].radius == 0 ? "__orig" : "__blur" + std::to_string(out[i].radius));
    s.label = src.label;
    s.attack_type = src.attack_type;
    s.image = load_gray(paths[i]);
    expanded.push_back(std::move(s));
  }
  ds.train = std::move(expanded);
}

struct EpochStats {
  LossBreakdown loss;
  std::size_t covered = 0;
};

class Trainer {
 public:
  Trainer(const ScenarioConfig& cfg, Backbone& net, double alpha, bool use_alignment)
      : cfg_(cfg), net_(net), alpha_(alpha), align_(use_alignment) {}

  const Grid& target_for(Sample& s, const nn::Tensor& f) {
    if (s.target.rows() != f.h || s.target.cols() != f.w)
      s.target = alignment_target(*s.saliency, f.h, f.w);
    return s.target;
  }

  EpochStats evaluate(std::vector<Sample>& set) {
    std::vector<double> cls, aln;
    for (auto& s : set) {
      ForwardResult fr = net_.forward(s.image);
      cls.push_back(cross_entropy(fr.logits, static_cast<std::size_t>(s.label)));
      if (s.saliency) {
        CamInputs ci{fr.features, net_.class_weights(), 2, static_cast<std::size_t>(s.label)};
        aln.push_back(alignment_term_to_target(compute_cam(ci), target_for(s, fr.features)));
      }
    }
    EpochStats st{batch_loss_partial(cls, align_ ? std::span<const double>(aln) : std::span<const double>{},
                                     alpha_),
                  aln.size()};
    if (!align_ && !aln.empty()) {
      double a = 0.0;
      for (double v : aln) a += v;
      st.loss.alignment_term = a / static_cast<double>(aln.size());
    }
    if (!std::isfinite(st.loss.total)) fail(ErrorCode::Numeric, "non-finite validation loss");
    return st;
  }

  // One pass over `train` in seeded order. Returns per-step breakdowns.
  std::vector<LossBreakdown> train_epoch(std::vector<Sample>& train, nn::Adam& adam, nn::Rng& rng) {
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    auto params = net_.params();
    std::vector<LossBreakdown> steps;
    const std::size_t bs = cfg_.optimizer.batch_size;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      std::size_t covered = 0;
      if (align_)
        for (std::size_t b = start; b < end; ++b) covered += train[order[b]].saliency.has_value();
      net_.zero_grad();
      const double cls_scale = alpha_ / static_cast<double>(end - start);
      const double aln_scale = covered ? (1.0 - alpha_) / static_cast<double>(covered) : 0.0;
      std::vector<double> cls, aln;
      for (std::size_t b = start; b < end; ++b) {
        Sample& s = train[order[b]];
        ForwardResult fr = net_.forward(s.image);
        const auto label = static_cast<std::size_t>(s.label);
        std::vector<double> d_logits;
        cls.push_back(cross_entropy(fr.logits, label, &d_logits));
        for (double& g : d_logits) g *= cls_scale;
        if (align_ && s.saliency) {
          CamInputs ci{fr.features, net_.class_weights(), 2, label};
          Grid d_cam;
          aln.push_back(alignment_term_to_target(compute_cam(ci), target_for(s, fr.features), &d_cam));
          if (aln_scale != 0.0) {
            for (double& g : d_cam.values()) g *= aln_scale;
            nn::Tensor d_feat;
            std::vector<double> d_w;
            cam_backward(ci, d_cam, d_feat, d_w);
            net_.backward(d_logits, &d_feat, &d_w);
            continue;
          }
        }
        net_.backward(d_logits, nullptr, nullptr);
      }
      const LossBreakdown lb = batch_loss_partial(cls, aln, alpha_);
      if (!std::isfinite(lb.total)) fail(ErrorCode::Numeric, "non-finite training loss");
      adam.step(params);
      steps.push_back(lb);
    }
    return steps;
  }

  ScoredSet score(const std::vector<Sample>& set) {
    ScoredSet out;
    for (const auto& s : set) {
      ForwardResult fr = net_.forward(s.image);
      out.push_back({s.id, spoof_score(fr.logits), s.label, s.attack_type});
    }
    return out;
  }

 private:
  const ScenarioConfig& cfg_;
  Backbone& net_;
  double alpha_;
  bool align_;
};

std::string log_row(std::size_t epoch, std::size_t step, const LossBreakdown& l) {
  return std::to_string(epoch) + "," + std::to_string(step) + "," + fmt(l.total) + "," +
         fmt(l.classification_term) + "," + fmt(l.alignment_term) + "," + fmt(l.alpha) + "\n";
}

RunResult train_one(const ScenarioConfig& cfg, Dataset ds, std::size_t r, const fs::path& dir) {
  RunResult res;
  res.run = r;
  res.seed = cfg.seed_base + r;
  res.train_set_size = ds.train.size();
  fs::create_directories(dir);

  const bool cyborg = cfg.guidance == Guidance::Cyborg;
  const double alpha = cyborg ? *cfg.alpha : 1.0;
  auto net = make_backbone(cfg.backbone, cfg.backbone_options);
  net->init(res.seed);
  nn::Adam adam({.lr = cfg.optimizer.learning_rate});
  nn::Rng rng(res.seed ^ 0x5deece66dULL);
  Trainer trainer(cfg, *net, alpha, cyborg);

  std::string train_log = "epoch,step,total,cls,align,alpha\n";
  std::string val_log = train_log;
  std::size_t step = 0;

  auto record_val = [&](std::size_t epoch) {
    const EpochStats st = trainer.evaluate(ds.val);
    res.val_loss_history.push_back(st.loss.total);
    res.val_alignment_history.push_back(st.covered ? st.loss.alignment_term
                                                   : std::numeric_limits<double>::quiet_NaN());
    val_log += log_row(epoch, step, st.loss);
    return st.loss.total;
  };

  double best = record_val(0);
  auto best_params = net->snapshot();
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (const auto& lb : trainer.train_epoch(ds.train, adam, rng))
      train_log += log_row(epoch, ++step, lb);
    const double v = record_val(epoch);
    if (v < best) {
      best = v;
      res.best_epoch = epoch;
      best_params = net->snapshot();
    }
  }
  net->restore(best_params);

  res.checkpoint = (dir / "checkpoint").string();
  {
    std::ofstream out(res.checkpoint, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write checkpoint");
    net->save(out);
  }
  write_file_atomic((dir / "train_log.csv").string(), train_log);
  write_file_atomic((dir / "val_log.csv").string(), val_log);

  res.val_scores = trainer.score(ds.val);
  res.test_scores = trainer.score(ds.test);
  save_scores(res.val_scores, (dir / "val_scores.csv").string());
  save_scores(res.test_scores, (dir / "test_scores.csv").string());

  auto has_both = [](const ScoredSet& s) {
    bool b = false, sp = false;
    for (const auto& e : s) (e.label == Label::Spoof ? sp : b) = true;
    return b && sp;
  };
  if (has_both(res.val_scores)) {
    res.val = evaluate(res.val_scores, res.val_scores);
    if (has_both(res.test_scores)) res.test = evaluate(res.val_scores, res.test_scores);
  }
  return res;
}

void add_metrics(std::map<std::string, std::vector<double>>& acc, const std::string& prefix,
                 const EvalReport& e) {
  acc[prefix + "auc"].push_back(e.auc);
  acc[prefix + "accuracy"].push_back(e.accuracy);
  acc[prefix + "bonafide_accuracy"].push_back(e.bonafide_accuracy);
  acc[prefix + "spoof_accuracy"].push_back(e.spoof_accuracy);
  acc[prefix + "d_prime"].push_back(e.d_prime);
  acc[prefix + "fnr_at_fpr01"].push_back(e.fnr_at_fpr01);
  acc[prefix + "eer_threshold"].push_back(e.eer_threshold);
  for (const auto& [t, v] : e.per_attack_accuracy) acc[prefix + "per_attack." + t].push_back(v);
}

std::map<std::string, MetricStat> reduce(const std::map<std::string, std::vector<double>>& acc,
                                         std::size_t n) {
  std::map<std::string, MetricStat> out;
  for (const auto& [k, v] : acc) {
    if (v.size() != n) continue;  // metric missing from some run
    MetricStat m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(n);
    if (n > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - m.mean) * (x - m.mean);
      m.std = std::sqrt(ss / static_cast<double>(n - 1));
    }
    out[k] = m;
  }
  return out;
}

json stat_json(const MetricStat& m) {
  json j = {{"mean", m.mean}};
  if (m.std) j["std"] = *m.std;
  return j;
}

json nan_safe(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json());
  return a;
}

}  // namespace

std::map<std::string, MetricStat> aggregate_runs(const std::vector<RunResult>& runs) {
  std::map<std::string, std::vector<double>> acc;
  for (const auto& r : runs) {
    if (r.val) add_metrics(acc, "val.", *r.val);
    if (r.test) add_metrics(acc, "test.", *r.test);
    acc["best_val_loss"].push_back(r.val_loss_history.empty() ? 0.0
                                                              : r.val_loss_history[r.best_epoch]);
  }
  return reduce(acc, runs.size());
}

json to_json(const RunReport& r) {
  json runs = json::array();
  for (const auto& x : r.runs) {
    json j = {{"run", x.run},
              {"seed", x.seed},
              {"status", x.status},
              {"initialization", x.initialization},
              {"train_set_size", x.train_set_size}};
    if (!x.message.empty()) j["message"] = x.message;
    if (x.status == "completed") {
      j["checkpoint"] = x.checkpoint;
      j["best_epoch"] = x.best_epoch;
      j["val_loss_history"] = nan_safe(x.val_loss_history);
      j["val_alignment_history"] = nan_safe(x.val_alignment_history);
      if (x.val) j["val"] = to_json(*x.val);
      if (x.test) j["test"] = to_json(*x.test);
    }
    runs.push_back(j);
  }
  json agg = json::object();
  for (const auto& [k, m] : r.aggregate) agg[k] = stat_json(m);
  json prov = {{"scenario", to_string(r.config.scenario)},
               {"guidance", to_string(r.config.guidance)},
               {"alpha", r.config.alpha ? json(*r.config.alpha) : json()},
               {"backbone", r.config.backbone},
               {"positive_class", "spoof"},
               {"score", "softmax probability of spoof"}};
  return {{"provenance", prov}, {"config", to_json(r.config)}, {"runs", runs}, {"aggregate", agg}};
}

RunReport run_scenario(const ScenarioConfig& config, const std::string& run_dir) {
  config.validate();
  fs::create_directories(run_dir);
  write_file_atomic((fs::path(run_dir) / "config.json").string(), to_json(config).dump(2) + "\n");

  Dataset ds = load_dataset(config);
  const bool needs_saliency =
      config.guidance == Guidance::Cyborg || (config.guidance == Guidance::Blur && !config.blur_control);
  if (needs_saliency) {
    const auto covered = std::count_if(ds.train.begin(), ds.train.end(),
                                       [](const Sample& s) { return s.saliency.has_value(); });
    require(covered > 0, ErrorCode::Precondition,
            "no training sample carries " + std::string(to_string(*config.saliency_source)) +
                " saliency");
    if (config.guidance == Guidance::Blur)
      for (const auto& s : ds.train)
        require(s.saliency.has_value(), ErrorCode::Precondition,
                "sample '" + s.id + "' has no saliency map for blur guidance");
  }
  if (config.guidance == Guidance::Blur)
    expand_training_set(ds, config, (fs::path(run_dir) / "expanded").string());

  RunReport report;
  report.config = config;
  report.run_dir = run_dir;
  for (std::size_t r = 0; r < config.runs; ++r) {
    const fs::path dir = fs::path(run_dir) / ("run_" + std::to_string(r));
    try {
      report.runs.push_back(train_one(config, ds, r, dir));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Numeric) throw;
      RunResult aborted;
      aborted.run = r;
      aborted.seed = config.seed_base + r;
      aborted.status = "aborted";
      aborted.message = e.what();
      aborted.train_set_size = ds.train.size();
      report.runs.push_back(std::move(aborted));
    }
  }
  const bool all_ok = std::all_of(report.runs.begin(), report.runs.end(),
                                  [](const RunResult& x) { return x.status == "completed"; });
  if (all_ok) report.aggregate = aggregate_runs(report.runs);
  write_file_atomic((fs::path(run_dir) / "aggregate.json").string(), to_json(report).dump(2) + "\n");
  return report;
}

std::vector<RunReport> alpha_sweep(const ScenarioConfig& base, const std::vector<double>& alphas,
                                   const std::string& out_dir) {
  require(base.guidance == Guidance::Cyborg, ErrorCode::InvalidArgument,
          "alpha sweep requires cyborg guidance");
  require(!alphas.empty(), ErrorCode::InvalidArgument, "alpha list is empty");
  std::vector<RunReport> out;
  for (double a : alphas) {
    ScenarioConfig c = base;
    c.alpha = a;
    char name[32];
    std::snprintf(name, sizeof name, "alpha_%g", a);
    out.push_back(run_scenario(c, (fs::path(out_dir) / name).string()));
  }
  return out;
}

RunDirSummary summarize_run_dir(const std::string& run_dir,
                                const std::optional<std::vector<double>>& competitors) {
  RunDirSummary out;
  std::map<std::string, std::vector<double>> acc;
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(run_dir))
    if (e.is_directory() && e.path().filename().string().rfind("run_", 0) == 0)
      dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  require(!dirs.empty(), ErrorCode::NotFound, "no run_<r> directories under " + run_dir);
  for (const auto& d : dirs) {
    const ScoredSet val = load_scores((d / "val_scores.csv").string());
    const ScoredSet test = load_scores((d / "test_scores.csv").string());
    const EvalReport e = evaluate(val, test);
    add_metrics(acc, "test.", e);
    out.runs.push_back(e);
  }
  out.aggregate = reduce(acc, dirs.size());
  if (competitors) {
    const auto& a = out.aggregate.at("test.accuracy");
    out.placement = placement(a.mean, a.std.value_or(0.0), *competitors);
  }
  return out;
}

}  // namespace sgpad
