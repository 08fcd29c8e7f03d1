#pragma once

#include <string>

#include <json.hpp>

#include "april/archive.hpp"
#include "april/behavior.hpp"
#include "april/envs.hpp"
#include "april/loops.hpp"
#include "april/policy.hpp"

namespace april {

using json = nlohmann::json;

/// Version stamped into every JSON document and CSV row written by the workbench.
inline constexpr int schema_version = 1;

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const json& j);

json to_json(const ParametricPolicy& policy);
ParametricPolicy policy_from_json(const json& j);

json to_json(const ClusterBook& book);
ClusterBook cluster_book_from_json(const json& j);

json to_json(const RankingArchive& archive);
RankingArchive archive_from_json(const json& j);

json to_json(const EnvironmentConfig& config);
json to_json(const LoopConfig& config);
/// Applies the keys present in `j` on top of `base`. Unknown keys are rejected.
LoopConfig loop_config_from_json(const json& j, LoopConfig base);
/// Defaults for the environment named by `j["environment"]` (mountain car when absent), then overrides.
LoopConfig loop_config_from_json(const json& j);

json to_json(const IterationRecord& record);
IterationRecord iteration_record_from_json(const json& j);

/// Complete APRIL loop state between iterations; restoring it and proposing again reproduces the
/// comparison that was pending when it was written.
json to_json(const AprilState& state);
AprilState april_state_from_json(const json& j);

/// Throws SchemaError unless `j` is an object carrying the supported schema_version.
void check_schema(const json& j, const std::string& what);

}  // namespace april
