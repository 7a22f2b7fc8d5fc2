#pragma once

#include <filesystem>
#include <string>

#include "data/synth.hpp"
#include "metrics/metrics.hpp"
#include "train/config.hpp"

namespace signseg {

struct PathsConfig {
  std::string manifest;
  std::string out_dir;
};

// The single config document: {"synth": {...}, "model": {...},
// "train": {...}, "metrics": {...}, "paths": {...}}. Every key is
// optional and defaults to the module defaults; unknown keys are
// rejected with their dotted path.
struct FullConfig {
  SynthConfig synth;
  ModelConfig model;
  TrainConfig train;
  MetricConfig metrics;
  PathsConfig paths;

  nlohmann::json to_json() const;
  static FullConfig from_json(const nlohmann::json& j);
};

FullConfig load_full_config(const std::filesystem::path& path);
FullConfig parse_full_config(const std::string& text);

}  // namespace signseg
