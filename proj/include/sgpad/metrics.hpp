#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgpad/manifest.hpp"

namespace sgpad {

// Higher score = more spoof-like; spoof is the positive class throughout.
struct ScoredEntry {
  std::string sample_id;
  double score = 0.0;
  Label label = Label::Bonafide;
  std::optional<std::string> attack_type;
  friend bool operator==(const ScoredEntry&, const ScoredEntry&) = default;
};

using ScoredSet = std::vector<ScoredEntry>;

double roc_auc(const ScoredSet& s);

struct ErrorRates {
  double fpr = 0.0;  // bonafide scored > t
  double fnr = 0.0;  // spoof scored <= t
};

ErrorRates error_rates(const ScoredSet& s, double threshold);

struct EerResult {
  double threshold = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
};

// Scans score midpoints plus +/-inf, minimizing |FPR - FNR|; ties go to the
// smaller threshold.
EerResult eer_threshold(const ScoredSet& validation);

struct Accuracies {
  double accuracy = 0.0;
  std::optional<double> bonafide_accuracy;
  std::optional<double> spoof_accuracy;
  std::map<std::string, double> per_attack_accuracy;  // only attack types present
};

// Bonafide correct iff score <= t, spoof correct iff score > t.
Accuracies thresholded_accuracies(const ScoredSet& test, double threshold);

double d_prime(const ScoredSet& s);

double fnr_at_fpr(const ScoredSet& s, double target_fpr = 0.01);

struct GainReport {
  std::string metric_name;
  double m_baseline = 0.0;
  double m_guided = 0.0;
  double normalized_gain = 0.0;
};

GainReport normalized_gain(double m_guided, double m_baseline, std::string metric_name = "");

struct Placement {
  std::size_t lo = 1;
  std::size_t hi = 1;
  friend bool operator==(const Placement&, const Placement&) = default;
};

// competitors must be sorted descending. rank(x) = 1 + #{c > x}.
Placement placement(double accuracy_mean, double accuracy_std,
                    const std::vector<double>& competitors);

struct EvalReport {
  double auc = 0.0;
  double eer_threshold = 0.0;
  double accuracy = 0.0;
  double bonafide_accuracy = 0.0;
  double spoof_accuracy = 0.0;
  std::map<std::string, double> per_attack_accuracy;
  double d_prime = 0.0;
  double fnr_at_fpr01 = 0.0;
  std::optional<Placement> placement;
};

// Threshold from `validation` at EER, everything else on `test`. When d'
// is undefined (both classes constant, different means) it is reported as
// infinity.
EvalReport evaluate(const ScoredSet& validation, const ScoredSet& test);

nlohmann::json to_json(const EvalReport& r);
EvalReport eval_report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GainReport& g);

std::vector<ErrorRates> det_points(const ScoredSet& s);

// CSV `sample_id,score,label,attack_type`; scores printed round-trippably.
std::string scores_to_csv(const ScoredSet& s);
ScoredSet scores_from_csv(const std::string& text);
void save_scores(const ScoredSet& s, const std::string& path);
ScoredSet load_scores(const std::string& path);

// Competitor file: {"provenance": "...", "accuracies": [descending...]} or a
// bare JSON array.
std::vector<double> load_competitors(const std::string& path);

}  // namespace sgpad
