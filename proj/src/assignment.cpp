#include "sgpad/assignment.hpp"

#include <algorithm>
#include <set>

#include "sgpad/error.hpp"
#include "sgpad/nn.hpp"
#include "sgpad/pipeline.hpp"

namespace sgpad {

using nlohmann::json;

std::map<std::string, std::size_t> AssignmentPlan::sample_counts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& [a, ids] : by_annotator)
    for (const auto& id : ids) ++out[id];
  return out;
}

bool AssignmentPlan::assigned(const std::string& annotator, const std::string& sample_id) const {
  const auto it = by_annotator.find(annotator);
  if (it == by_annotator.end()) return false;
  return std::find(it->second.begin(), it->second.end(), sample_id) != it->second.end();
}

AssignmentPlan build_assignment(const Manifest& manifest, const std::vector<std::string>& annotators,
                                const AssignmentParams& params) {
  require(!annotators.empty(), ErrorCode::InvalidArgument, "no annotators given");
  require(params.target_per_sample >= 1, ErrorCode::InvalidArgument,
          "target annotators per sample must be >= 1");
  std::set<std::string> seen;
  for (const auto& a : annotators) {
    require(!a.empty(), ErrorCode::InvalidArgument, "empty annotator id");
    require(seen.insert(a).second, ErrorCode::InvalidArgument, "duplicate annotator id '" + a + "'");
  }
  const auto types = params.attack_types.empty() ? kDefaultAttackTypes : params.attack_types;

  // subclass name -> (quota, pool)
  std::vector<std::pair<std::string, std::size_t>> quotas{{"bonafide", params.bonafide_quota}};
  for (const auto& t : types) quotas.emplace_back(t, params.per_attack_quota);
  std::map<std::string, std::vector<std::string>> pools;
  for (const auto& r : manifest.records)
    pools[r.label == Label::Bonafide ? std::string("bonafide") : r.attack_type.value_or("")].push_back(
        r.sample_id);

  for (const auto& [name, q] : quotas) {
    const std::size_t have = pools[name].size();
    require(have >= q, ErrorCode::Precondition,
            "subclass '" + name + "' has " + std::to_string(have) + " samples; quota needs " +
                std::to_string(q));
    const std::size_t capacity = have * params.target_per_sample;
    const std::size_t need = q * annotators.size();
    require(capacity >= need, ErrorCode::Precondition,
            "subclass '" + name + "' cannot cover " + std::to_string(annotators.size()) +
                " annotators: " + std::to_string(need) + " assignments needed, capacity " +
                std::to_string(capacity));
  }

  nn::Rng rng(params.seed);
  std::map<std::string, std::vector<std::size_t>> rank;  // seeded tie-break order
  for (auto& [name, ids] : pools) {
    std::sort(ids.begin(), ids.end());
    std::vector<std::size_t> order(ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    rank[name] = std::move(order);
  }

  AssignmentPlan plan;
  plan.target_per_sample = params.target_per_sample;
  std::map<std::string, std::size_t> count;
  for (const auto& a : annotators) {
    auto& list = plan.by_annotator[a];
    for (const auto& [name, q] : quotas) {
      const auto& ids = pools[name];
      const auto& rk = rank[name];
      std::vector<std::size_t> idx(ids.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        const std::size_t cx = count[ids[x]], cy = count[ids[y]];
        return cx != cy ? cx < cy : rk[x] < rk[y];
      });
      for (std::size_t k = 0; k < q; ++k) {
        const std::string& id = ids[idx[k]];
        require(count[id] < params.target_per_sample, ErrorCode::Precondition,
                "subclass '" + name + "' exhausted before all annotators were served");
        ++count[id];
        list.push_back(id);
      }
    }
    // rotate the tie-break so consecutive annotators see different orders
    for (auto& [name, rk] : rank) rng.shuffle(rk);
  }
  return plan;
}

json to_json(const AssignmentPlan& p) {
  json a = json::object();
  for (const auto& [k, v] : p.by_annotator) a[k] = v;
  return {{"target_per_sample", p.target_per_sample}, {"assignments", a}};
}

AssignmentPlan assignment_from_json(const json& j) {
  AssignmentPlan p;
  try {
    p.target_per_sample = j.value("target_per_sample", std::size_t{2});
    for (const auto& [k, v] : j.at("assignments").items())
      p.by_annotator[k] = v.get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("bad assignment plan: ") + e.what());
  }
  return p;
}

}  // namespace sgpad
