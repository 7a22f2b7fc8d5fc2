#pragma once

#include "train/trainer.hpp"

namespace signseg {

// One row of the feature/module grid: which streams and modules were
// active, the training log, and the resulting scores.
struct AblationRow {
  std::string name;
  ModulesConfig modules;
  double best_dev_f1 = 0.0;
  int best_epoch = 0;
  EvalReport dev;
  EvalReport test;
  std::vector<EpochRecord> log;
};

struct AblationReport {
  std::vector<AblationRow> rows;

  nlohmann::json to_json() const;
};

// Trains the five-row grid — angles only, hand shape only, both, both
// with adapters, both with adapters and mixer — each fully seeded from
// the base config, and evaluates each best checkpoint on dev and test.
AblationReport run_ablation(const ModelConfig& model_config,
                            const TrainConfig& base_config,
                            const MetricConfig& metric_config,
                            const std::vector<Sample>& train,
                            const std::vector<Sample>& dev,
                            const std::vector<Sample>& test);

// Windowed prediction + evaluation of a checkpoint over labeled samples.
EvalReport evaluate_checkpoint(const Checkpoint& checkpoint,
                               const std::vector<Sample>& samples,
                               std::int64_t window, std::int64_t stride,
                               const MetricConfig& metric_config);

}  // namespace signseg
