#include "camp/serialization.hpp"

#include <string>

#include "camp/errors.hpp"

namespace camp {

namespace {

template <class M>
Json matrix_json(const M& m, std::size_t rows, std::size_t cols) {
  Json out = Json::array();
  for (std::size_t i = 0; i < rows; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < cols; ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Matrix<double> matrix_from_json(const Json& json, std::size_t size, const char* what) {
  if (!json.is_array() || json.size() != size) {
    throw DataError(std::string(what) + " must be a " + std::to_string(size) + "x" +
                    std::to_string(size) + " array");
  }
  Matrix<double> out(size, size, 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    const auto& row = json[i];
    if (!row.is_array() || row.size() != size) {
      throw DataError(std::string(what) + " row " + std::to_string(i) + " has the wrong length");
    }
    for (std::size_t j = 0; j < size; ++j) out(i, j) = row[j].get<double>();
  }
  return out;
}

const Json& field(const Json& json, const char* key) {
  const auto it = json.find(key);
  if (it == json.end()) throw DataError(std::string("model file is missing '") + key + "'");
  return *it;
}

}  // namespace

Json to_json(const MixtureBase& base) {
  Json components = Json::array();
  for (const auto& c : base.components()) {
    components.push_back({{"weight", c.weight}, {"pseudo", matrix_json(c.pseudo, base.size(), base.size())}});
  }
  return {{"size", base.size()}, {"components", std::move(components)}};
}

MixtureBase mixture_from_json(const Json& json) {
  try {
    const auto size = field(json, "size").get<std::size_t>();
    std::vector<MixtureComponent> components;
    for (const auto& c : field(json, "components")) {
      MixtureComponent component{field(c, "weight").get<double>(), PseudoCounts(size)};
      const auto m = matrix_from_json(field(c, "pseudo"), size, "pseudo-counts");
      for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) component.pseudo.set(i, j, m(i, j));
      }
      components.push_back(std::move(component));
    }
    return MixtureBase(size, std::move(components));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed base measure: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("malformed base measure: ") + e.what());
  }
}

Json to_json(const KernelEstimate& theta) {
  return matrix_json(theta, theta.size(), theta.size());
}

Json to_json(const Kernel& kernel) { return matrix_json(kernel, kernel.rows(), kernel.cols()); }

Json to_json(const ClusterAssignment& assignment, std::span<const std::string> users) {
  Json out = Json::object();
  for (std::size_t u = 0; u < users.size(); ++u) out[users[u]] = assignment.cluster_of(u);
  return out;
}

ClusterAssignment assignment_from_json(const Json& json, std::span<const std::string> users,
                                       std::span<const TransitionCounts> counts) {
  std::vector<ClusterId> labels;
  labels.reserve(users.size());
  for (const auto& user : users) {
    const auto it = json.find(user);
    if (it == json.end()) throw DataError("partition has no cluster for user '" + user + "'");
    labels.push_back(it->get<ClusterId>());
  }
  return ClusterAssignment(std::move(labels), counts);
}

Json to_json(const CampModel& model) {
  Json rounds = Json::array();
  for (const auto& round : model.rounds) {
    Json samples = Json::array();
    for (const auto& sample : round) samples.push_back(to_json(sample, model.users));
    rounds.push_back(std::move(samples));
  }
  Json theta = Json::object();
  for (std::size_t u = 0; u < model.num_users(); ++u) theta[model.users[u]] = to_json(model.theta[u]);
  return {{"alphabet_size", model.alphabet_size},
          {"users", model.users},
          {"alpha", model.alpha},
          {"alpha_history", model.alpha_history},
          {"base", to_json(model.base)},
          {"rounds", std::move(rounds)},
          {"theta", std::move(theta)}};
}

CampModel model_from_json(const Json& json, const TraceSet& traces) {
  try {
    CampModel model;
    model.alphabet_size = field(json, "alphabet_size").get<std::size_t>();
    if (model.alphabet_size != traces.num_locations()) {
      throw DataError("model has " + std::to_string(model.alphabet_size) +
                      " locations but the traces have " + std::to_string(traces.num_locations()));
    }
    model.users = field(json, "users").get<std::vector<std::string>>();
    for (const auto& user : model.users) {
      model.counts.push_back(count_transitions(traces.trajectories[traces.user_index(user)],
                                               model.alphabet_size));
    }
    model.alpha = field(json, "alpha").get<double>();
    model.alpha_history = field(json, "alpha_history").get<std::vector<double>>();
    model.base = mixture_from_json(field(json, "base"));
    for (const auto& round : field(json, "rounds")) {
      std::vector<ClusterAssignment> samples;
      for (const auto& sample : round) {
        samples.push_back(assignment_from_json(sample, model.users, model.counts));
      }
      model.rounds.push_back(std::move(samples));
    }
    if (model.rounds.empty()) throw DataError("model file has no sampled rounds");
    const auto& theta = field(json, "theta");
    for (const auto& user : model.users) {
      model.theta.emplace_back(matrix_from_json(field(theta, user.c_str()), model.alphabet_size, "theta"));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

Json truth_to_json(const SyntheticData& data) {
  Json users = Json::array();
  for (std::size_t u = 0; u < data.traces.num_users(); ++u) {
    users.push_back({{"user_id", data.traces.trajectories[u].user_id},
                     {"label", data.labels[u]},
                     {"kernel", to_json(data.drawn[u])},
                     {"effective_kernel", to_json(data.effective[u])}});
  }
  Json atoms = Json::array();
  for (std::size_t c = 0; c < data.atoms.size(); ++c) {
    atoms.push_back({{"weight", data.atom_weights[c]}, {"kernel", to_json(data.atoms[c])}});
  }
  return {{"locations", data.traces.alphabet.labels()}, {"atoms", std::move(atoms)}, {"users", std::move(users)}};
}

}  // namespace camp
