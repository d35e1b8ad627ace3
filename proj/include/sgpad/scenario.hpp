#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgpad/backbone.hpp"
#include "sgpad/blur.hpp"
#include "sgpad/metrics.hpp"
#include "sgpad/saliency.hpp"

namespace sgpad {

enum class Scenario { S1, S2, S3, S4, S5 };
enum class Guidance { None, Cyborg, Blur };

struct OptimizerSettings {
  std::string name = "adam";
  double learning_rate = 1e-4;
  std::size_t batch_size = 32;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::S2;
  std::string manifest_path;
  std::string backbone = "toy";
  ToyBackboneOptions backbone_options;
  Guidance guidance = Guidance::None;
  std::optional<SaliencySource> saliency_source;
  std::optional<Granularity> granularity;
  std::optional<double> alpha;
  std::size_t runs = 3;
  std::uint64_t seed_base = 0;
  OptimizerSettings optimizer;
  std::size_t epochs = 50;
  std::size_t input_size = 224;
  double validation_fraction = 0.2;
  std::optional<double> aoi_threshold;  // default per saliency source
  BlurConfig blur;
  bool blur_control = false;
  // Samples listed in this manifest are dropped from training (used to keep
  // autoencoder training samples out of autoencoder-guided runs).
  std::optional<std::string> exclude_manifest;

  void validate() const;
};

ScenarioConfig scenario_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& c);
ScenarioConfig load_scenario_config(const std::string& path);

struct MetricStat {
  double mean = 0.0;
  std::optional<double> std;  // sample (n-1) std; absent for a single run
};

struct RunResult {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::string status = "completed";  // or "aborted"
  std::string message;
  std::string checkpoint;
  std::string initialization = "random";
  std::size_t best_epoch = 0;
  std::size_t train_set_size = 0;
  std::vector<double> val_loss_history;       // index = epoch, 0 = before training
  std::vector<double> val_alignment_history;  // NaN when no val sample has saliency
  std::optional<EvalReport> val;
  std::optional<EvalReport> test;
  ScoredSet val_scores;
  ScoredSet test_scores;
};

struct RunReport {
  ScenarioConfig config;
  std::vector<RunResult> runs;
  std::map<std::string, MetricStat> aggregate;  // keys like "test.auc"
  std::string run_dir;
};

// Trains `config.runs` models (seed = seed_base + r), keeps the epoch with
// minimum validation total loss, scores val/test and writes the run
// directory. Aggregates are emitted only when every run completed.
RunReport run_scenario(const ScenarioConfig& config, const std::string& run_dir);

// One RunReport per alpha (sub-directories `alpha_<a>`), identical seeds.
std::vector<RunReport> alpha_sweep(const ScenarioConfig& base, const std::vector<double>& alphas,
                                   const std::string& out_dir);

std::map<std::string, MetricStat> aggregate_runs(const std::vector<RunResult>& runs);

nlohmann::json to_json(const RunReport& r);

// Rebuilds per-run evaluations from the score files in a run directory.
struct RunDirSummary {
  std::vector<EvalReport> runs;
  std::map<std::string, MetricStat> aggregate;
  std::optional<Placement> placement;
};
RunDirSummary summarize_run_dir(const std::string& run_dir,
                                const std::optional<std::vector<double>>& competitors = {});

std::string_view to_string(Scenario s);
std::string_view to_string(Guidance g);

}  // namespace sgpad
