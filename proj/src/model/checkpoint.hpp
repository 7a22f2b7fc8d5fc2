#pragma once

#include <map>
#include <optional>
#include <string>

#include "data/container.hpp"
#include "model/network.hpp"

namespace signseg {

// Per-dimension standardization statistics, estimated on the train split.
struct NormStats {
  VecF hamer_mean, hamer_std, angle_mean, angle_std;
};

// Everything needed to reload a model (and optionally resume training):
// configs as JSON metadata, named parameter tensors, optional optimizer
// state under "opt.*", optional normalization statistics.
struct Checkpoint {
  ModelConfig model;
  ModulesConfig modules;
  std::optional<NormStats> norm;
  std::map<std::string, MatF> tensors;
  nlohmann::json train_meta = nlohmann::json::object();
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Copies network parameter values into c.tensors (by parameter name).
void store_params(Checkpoint& c, Network<float>& net);
// Shape-checked restore of every network parameter from c.tensors.
void load_params(const Checkpoint& c, Network<float>& net);

// Builds a network matching the checkpoint configs and loads its params.
Network<float> make_network(const Checkpoint& c);

// Standardizes both streams in place (no-op stats leave data unchanged).
void apply_normalization(const NormStats& stats, MatF& hamer, MatF& angles);

NormStats compute_normalization(const std::vector<Sample>& train);

}  // namespace signseg
