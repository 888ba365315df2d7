#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "camp/dirichlet.hpp"
#include "camp/engine.hpp"
#include "camp/gibbs.hpp"
#include "camp/synth.hpp"

namespace camp {

using Json = nlohmann::ordered_json;

Json to_json(const MixtureBase& base);
MixtureBase mixture_from_json(const Json& json);

Json to_json(const KernelEstimate& theta);
Json to_json(const Kernel& kernel);

/// {"user_id": cluster_id, ...} in user order.
Json to_json(const ClusterAssignment& assignment,
             std::span<const std::string> users);
ClusterAssignment assignment_from_json(const Json& json,
                                       std::span<const std::string> users,
                                       std::span<const TransitionCounts> counts);

/// Checkpoint of a fitted model; counts are rebuilt from `traces` on load.
Json to_json(const CampModel& model);
CampModel model_from_json(const Json& json, const TraceSet& traces);

/// Ground-truth bundle written next to a synthetic trace CSV.
Json truth_to_json(const SyntheticData& data);

}  // namespace camp
