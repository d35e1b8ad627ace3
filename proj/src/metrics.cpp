#include "sgpad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "sgpad/image_io.hpp"

namespace sgpad {

namespace {

struct Counts {
  std::size_t bona = 0, spoof = 0;
};

Counts count_labels(const ScoredSet& s) {
  Counts c;
  for (const auto& e : s) (e.label == Label::Spoof ? c.spoof : c.bona)++;
  return c;
}

Counts require_both(const ScoredSet& s, const char* what) {
  const Counts c = count_labels(s);
  require(c.bona > 0 && c.spoof > 0, ErrorCode::Precondition,
          std::string(what) + " needs both bonafide and spoof samples");
  return c;
}

std::vector<double> sorted_distinct_scores(const ScoredSet& s) {
  std::vector<double> v;
  v.reserve(s.size());
  for (const auto& e : s) v.push_back(e.score);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

double roc_auc(const ScoredSet& s) {
  const Counts c = require_both(s, "roc_auc");
  std::vector<std::pair<double, Label>> v;
  v.reserve(s.size());
  for (const auto& e : s) v.emplace_back(e.score, e.label);
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  // Rank sweep over tie groups with integer counting: each spoof beats every
  // bonafide in lower groups and ties (half credit) those in its own group.
  std::uint64_t twice_u = 0;
  std::uint64_t bona_below = 0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    std::uint64_t gb = 0, gs = 0;
    while (j < v.size() && v[j].first == v[i].first) {
      (v[j].second == Label::Spoof ? gs : gb)++;
      ++j;
    }
    twice_u += 2 * gs * bona_below + gs * gb;
    bona_below += gb;
    i = j;
  }
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(c.spoof) * static_cast<double>(c.bona));
}

ErrorRates error_rates(const ScoredSet& s, double t) {
  const Counts c = count_labels(s);
  std::size_t fp = 0, fn = 0;
  for (const auto& e : s) {
    if (e.label == Label::Bonafide && e.score > t) ++fp;
    if (e.label == Label::Spoof && e.score <= t) ++fn;
  }
  return {c.bona ? static_cast<double>(fp) / static_cast<double>(c.bona) : 0.0,
          c.spoof ? static_cast<double>(fn) / static_cast<double>(c.spoof) : 0.0};
}

EerResult eer_threshold(const ScoredSet& validation) {
  require_both(validation, "eer_threshold");
  const auto scores = sorted_distinct_scores(validation);
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cand;
  cand.push_back(-inf);
  for (std::size_t i = 0; i + 1 < scores.size(); ++i)
    cand.push_back(scores[i] + (scores[i + 1] - scores[i]) / 2.0);
  cand.push_back(inf);
  EerResult best{};
  double best_gap = inf;
  for (double t : cand) {  // ascending, so strict < keeps the smaller t on ties
    const ErrorRates r = error_rates(validation, t);
    const double gap = std::fabs(r.fpr - r.fnr);
    if (gap < best_gap) {
      best_gap = gap;
      best = {t, r.fpr, r.fnr};
    }
  }
  return best;
}

Accuracies thresholded_accuracies(const ScoredSet& test, double t) {
  Accuracies a;
  std::size_t correct = 0, nb = 0, cb = 0, ns = 0, cs = 0;
  std::map<std::string, std::pair<std::size_t, std::size_t>> per;
  for (const auto& e : test) {
    const bool ok = e.label == Label::Spoof ? e.score > t : e.score <= t;
    correct += ok;
    if (e.label == Label::Spoof) {
      ++ns;
      cs += ok;
      if (e.attack_type) {
        auto& [n, c] = per[*e.attack_type];
        ++n;
        c += ok;
      }
    } else {
      ++nb;
      cb += ok;
    }
  }
  if (!test.empty()) a.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  if (nb) a.bonafide_accuracy = static_cast<double>(cb) / static_cast<double>(nb);
  if (ns) a.spoof_accuracy = static_cast<double>(cs) / static_cast<double>(ns);
  for (const auto& [type, nc] : per)
    a.per_attack_accuracy[type] = static_cast<double>(nc.second) / static_cast<double>(nc.first);
  return a;
}

double d_prime(const ScoredSet& s) {
  const Counts c = count_labels(s);
  require(c.bona >= 2 && c.spoof >= 2, ErrorCode::Precondition,
          "d_prime needs at least 2 samples per class");
  double mb = 0, ms = 0;
  for (const auto& e : s) (e.label == Label::Spoof ? ms : mb) += e.score;
  mb /= static_cast<double>(c.bona);
  ms /= static_cast<double>(c.spoof);
  double vb = 0, vs = 0;
  for (const auto& e : s) {
    if (e.label == Label::Spoof) vs += (e.score - ms) * (e.score - ms);
    else vb += (e.score - mb) * (e.score - mb);
  }
  vb /= static_cast<double>(c.bona);
  vs /= static_cast<double>(c.spoof);
  const double diff = std::fabs(ms - mb);
  const double denom = std::sqrt((vs + vb) / 2.0);
  if (denom == 0.0) {
    if (diff == 0.0) return 0.0;
    fail(ErrorCode::Numeric, "d_prime undefined: both classes constant with different means");
  }
  return diff / denom;
}

double fnr_at_fpr(const ScoredSet& s, double target_fpr) {
  require_both(s, "fnr_at_fpr");
  require(target_fpr >= 0.0 && target_fpr <= 1.0, ErrorCode::InvalidArgument,
          "target FPR must lie in [0,1]");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cand{-inf};
  for (double v : sorted_distinct_scores(s)) cand.push_back(v);
  cand.push_back(inf);
  for (double t : cand) {
    const ErrorRates r = error_rates(s, t);
    if (r.fpr <= target_fpr) return r.fnr;
  }
  return 1.0;
}

GainReport normalized_gain(double m_guided, double m_baseline, std::string metric_name) {
  require(m_baseline >= 0.0 && m_baseline < 1.0, ErrorCode::InvalidArgument,
          "normalized gain undefined unless 0 <= baseline < 1");
  require(m_guided >= 0.0 && m_guided <= 1.0, ErrorCode::InvalidArgument,
          "guided metric must lie in [0,1]");
  return {std::move(metric_name), m_baseline, m_guided,
          (m_guided - m_baseline) / (1.0 - m_baseline)};
}

Placement placement(double accuracy_mean, double accuracy_std,
                    const std::vector<double>& competitors) {
  require(!competitors.empty(), ErrorCode::InvalidArgument, "competitor list is empty");
  require(std::is_sorted(competitors.begin(), competitors.end(), std::greater<>()),
          ErrorCode::InvalidArgument, "competitor accuracies must be sorted descending");
  require(accuracy_std >= 0.0, ErrorCode::InvalidArgument, "accuracy std must be >= 0");
  auto rank = [&](double x) {
    return 1 + static_cast<std::size_t>(std::count_if(
                   competitors.begin(), competitors.end(), [x](double c) { return c > x; }));
  };
  return {rank(accuracy_mean + accuracy_std), rank(accuracy_mean - accuracy_std)};
}

EvalReport evaluate(const ScoredSet& validation, const ScoredSet& test) {
  require_both(test, "evaluate");
  EvalReport r;
  r.eer_threshold = eer_threshold(validation).threshold;
  r.auc = roc_auc(test);
  const Accuracies a = thresholded_accuracies(test, r.eer_threshold);
  r.accuracy = a.accuracy;
  r.bonafide_accuracy = a.bonafide_accuracy.value_or(0.0);
  r.spoof_accuracy = a.spoof_accuracy.value_or(0.0);
  r.per_attack_accuracy = a.per_attack_accuracy;
  try {
    r.d_prime = d_prime(test);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Numeric) r.d_prime = std::numeric_limits<double>::infinity();
    else throw;
  }
  r.fnr_at_fpr01 = fnr_at_fpr(test, 0.01);
  return r;
}

namespace {

nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

double num_from(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

}  // namespace

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j = {{"auc", r.auc},
                      {"eer_threshold", num(r.eer_threshold)},
                      {"accuracy", r.accuracy},
                      {"bonafide_accuracy", r.bonafide_accuracy},
                      {"spoof_accuracy", r.spoof_accuracy},
                      {"per_attack_accuracy", r.per_attack_accuracy},
                      {"d_prime", num(r.d_prime)},
                      {"fnr_at_fpr01", r.fnr_at_fpr01},
                      {"positive_class", "spoof"},
                      {"score_orientation", "higher_is_spoof"}};
  if (r.placement) j["placement"] = {{"lo", r.placement->lo}, {"hi", r.placement->hi}};
  return j;
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.auc = j.at("auc").get<double>();
    r.eer_threshold = num_from(j.at("eer_threshold"));
    r.accuracy = j.at("accuracy").get<double>();
    r.bonafide_accuracy = j.at("bonafide_accuracy").get<double>();
    r.spoof_accuracy = j.at("spoof_accuracy").get<double>();
    r.per_attack_accuracy = j.at("per_attack_accuracy").get<std::map<std::string, double>>();
    r.d_prime = num_from(j.at("d_prime"));
    r.fnr_at_fpr01 = j.at("fnr_at_fpr01").get<double>();
    if (j.contains("placement"))
      r.placement = Placement{j["placement"].at("lo").get<std::size_t>(),
                              j["placement"].at("hi").get<std::size_t>()};
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("bad eval report: ") + e.what());
  }
}

nlohmann::json to_json(const GainReport& g) {
  return {{"metric_name", g.metric_name},
          {"m_baseline", g.m_baseline},
          {"m_guided", g.m_guided},
          {"normalized_gain", g.normalized_gain}};
}

std::vector<ErrorRates> det_points(const ScoredSet& s) {
  require_both(s, "det_points");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<ErrorRates> pts{error_rates(s, -inf)};
  for (double t : sorted_distinct_scores(s)) pts.push_back(error_rates(s, t));
  return pts;
}

std::string scores_to_csv(const ScoredSet& s) {
  std::ostringstream os;
  os << "sample_id,score,label,attack_type\n";
  char buf[64];
  for (const auto& e : s) {
    std::snprintf(buf, sizeof buf, "%.17g", e.score);
    os << csv_escape(e.sample_id) << ',' << buf << ',' << to_string(e.label) << ','
       << csv_escape(e.attack_type.value_or("")) << '\n';
  }
  return os.str();
}

ScoredSet scores_from_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  require(!rows.empty(), ErrorCode::Parse, "score file is empty");
  require(rows[0] == std::vector<std::string>{"sample_id", "score", "label", "attack_type"},
          ErrorCode::Parse, "unexpected score file header");
  ScoredSet s;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    require(f.size() == 4, ErrorCode::Parse, "score line " + std::to_string(i + 1) + " needs 4 fields");
    ScoredEntry e;
    e.sample_id = f[0];
    try {
      e.score = std::stod(f[1]);
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, "score line " + std::to_string(i + 1) + ": bad score '" + f[1] + "'");
    }
    e.label = parse_label(f[2]);
    if (!f[3].empty()) e.attack_type = f[3];
    s.push_back(std::move(e));
  }
  return s;
}

void save_scores(const ScoredSet& s, const std::string& path) {
  write_file_atomic(path, scores_to_csv(s));
}

ScoredSet load_scores(const std::string& path) { return scores_from_csv(read_file(path)); }

std::vector<double> load_competitors(const std::string& path) {
  try {
    const auto j = nlohmann::json::parse(read_file(path));
    std::vector<double> v = j.is_array() ? j.get<std::vector<double>>()
                                         : j.at("accuracies").get<std::vector<double>>();
    return v;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("bad competitor file: ") + e.what());
  }
}

}  // namespace sgpad
