#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgpad/manifest.hpp"

namespace sgpad {

struct AssignmentParams {
  std::size_t target_per_sample = 2;
  std::size_t bonafide_quota = 16;
  std::size_t per_attack_quota = 2;
  std::vector<std::string> attack_types;  // empty -> default attack list
  std::uint64_t seed = 0;
};

struct AssignmentPlan {
  std::map<std::string, std::vector<std::string>> by_annotator;
  std::size_t target_per_sample = 2;

  std::map<std::string, std::size_t> sample_counts() const;
  bool assigned(const std::string& annotator, const std::string& sample_id) const;
};

// Annotators are served in order; each takes, per subclass, the samples with
// the lowest current coverage (seeded tie-break), so samples reach the
// target before any exceeds it.
AssignmentPlan build_assignment(const Manifest& manifest, const std::vector<std::string>& annotators,
                                const AssignmentParams& params = {});

nlohmann::json to_json(const AssignmentPlan& p);
AssignmentPlan assignment_from_json(const nlohmann::json& j);

}  // namespace sgpad
