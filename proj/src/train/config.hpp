#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "model/config.hpp"

namespace signseg {

enum class ClassWeightMode { kUniform, kInverseFrequency };

struct TrainConfig {
  double learning_rate = 3e-4;
  int scheduler_patience = 5;       // epochs without dev improvement
  double scheduler_factor = 0.5;
  double clip_norm = 0.1;           // global gradient norm bound
  int early_stop_patience = 12;
  int batch_size = 8;               // windows per optimizer step
  int max_epochs = 30;
  std::uint64_t seed = 1234;
  double lambda_ce = 1.0;
  double lambda_ctc = 1.0;
  ClassWeightMode class_weights = ClassWeightMode::kUniform;
  ModulesConfig modules;
  std::int64_t window = 512;
  std::int64_t stride = 384;
  bool normalize = false;
  int workers = 0;                  // 0 = pick from hardware
  double stop_at_dev_f1 = 0.0;      // stop once dev F1 reaches this (0 = off)

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j, const std::string& path);
};

}  // namespace signseg
