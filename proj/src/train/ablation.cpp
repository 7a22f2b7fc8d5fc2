#include "train/ablation.hpp"

#include "train/predict.hpp"

namespace signseg {

using nlohmann::json;

json AblationReport::to_json() const {
  json rows_j = json::array();
  for (const AblationRow& r : rows) {
    rows_j.push_back({{"name", r.name},
                      {"modules", r.modules.to_json()},
                      {"best_dev_f1", r.best_dev_f1},
                      {"best_epoch", r.best_epoch},
                      {"dev", r.dev.to_json()},
                      {"test", r.test.to_json()},
                      {"epoch_log", epoch_log_to_json(r.log)}});
  }
  return {{"rows", rows_j}};
}

EvalReport evaluate_checkpoint(const Checkpoint& checkpoint,
                               const std::vector<Sample>& samples,
                               std::int64_t window, std::int64_t stride,
                               const MetricConfig& metric_config) {
  Network<float> net = make_network(checkpoint);
  std::vector<EvalPair> pairs;
  for (const Sample& s : samples) {
    if (!s.labels) {
      throw ValidationError("evaluate: sample '" + s.features.sample_id +
                            "' has no labels");
    }
    EvalPair p;
    p.sample_id = s.features.sample_id;
    p.pred = predict_tags(net, checkpoint.norm, s, window, stride);
    p.gt = *s.labels;
    pairs.push_back(std::move(p));
  }
  return evaluate(pairs, metric_config);
}

AblationReport run_ablation(const ModelConfig& model_config,
                            const TrainConfig& base_config,
                            const MetricConfig& metric_config,
                            const std::vector<Sample>& train,
                            const std::vector<Sample>& dev,
                            const std::vector<Sample>& test) {
  struct RowSpec {
    const char* name;
    bool angles, hamer, adapters, mixer;
  };
  // The grid: features first, then the learned modules one at a time.
  const RowSpec grid[5] = {
      {"angles", true, false, false, false},
      {"hamer", false, true, false, false},
      {"angles+hamer", true, true, false, false},
      {"angles+hamer+adapters", true, true, true, false},
      {"angles+hamer+adapters+mixer", true, true, true, true},
  };

  AblationReport report;
  for (const RowSpec& spec : grid) {
    TrainConfig cfg = base_config;
    cfg.modules.use_angles = spec.angles;
    cfg.modules.use_hamer = spec.hamer;
    cfg.modules.use_adapters = spec.adapters;
    cfg.modules.use_mixer = spec.mixer;
    cfg.modules.mixer_mode = MixerMode::kMlp;

    Trainer trainer(model_config, cfg, metric_config, train, dev);
    TrainResult result = trainer.run();

    AblationRow row;
    row.name = spec.name;
    row.modules = cfg.modules;
    row.best_dev_f1 = result.best_dev_f1;
    row.best_epoch = result.best_epoch;
    row.log = std::move(result.log);
    row.dev = evaluate_checkpoint(result.best, dev, cfg.window, cfg.stride,
                                  metric_config);
    row.test = evaluate_checkpoint(result.best, test, cfg.window, cfg.stride,
                                   metric_config);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace signseg
