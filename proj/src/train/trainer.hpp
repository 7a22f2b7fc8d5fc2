#pragma once

#include <memory>
#include <vector>

#include "metrics/metrics.hpp"
#include "model/checkpoint.hpp"
#include "train/config.hpp"

namespace signseg {

struct EpochRecord {
  int epoch = 0;
  double ce = 0.0;
  double ctc = 0.0;
  double total = 0.0;
  int ctc_infeasible_windows = 0;
  EvalReport dev;
  double lr = 0.0;
  double wall_s = 0.0;

  nlohmann::json to_json() const;
};

struct TrainResult {
  Checkpoint best;  // best-dev parameters, never the last epoch's
  std::vector<EpochRecord> log;
  double best_dev_f1 = 0.0;
  int best_epoch = 0;
};

// Owns the parameters (single writer). Batches are split across worker
// clones; gradients reduce in worker order and batch losses in window
// order, so a fixed seed reproduces runs bit for bit at any worker count.
class Trainer {
 public:
  Trainer(const ModelConfig& model_config, const TrainConfig& config,
          MetricConfig metric_config, std::vector<Sample> train,
          std::vector<Sample> dev);

  // Runs until max_epochs, early stopping, or the dev F1 target.
  TrainResult run();

  // One epoch: shuffled batches, clipped Adam steps, dev evaluation,
  // scheduler and early-stop bookkeeping.
  EpochRecord run_epoch();

  bool should_stop() const;
  int epoch() const { return epoch_; }
  double learning_rate() const { return lr_; }
  double best_dev_f1() const { return best_f1_; }
  int best_epoch() const { return best_epoch_; }
  double last_clipped_grad_norm() const { return last_grad_norm_; }

  Checkpoint best_checkpoint();

  // Full optimizer state for exact resumption.
  void save_state(const std::filesystem::path& path);
  void load_state(const std::filesystem::path& path);

  Network<float>& network() { return *net_; }
  const std::optional<NormStats>& norm() const { return norm_; }

 private:
  struct TrainWindow {
    MatF hamer, angles;
    std::vector<std::uint8_t> frame_mask;
    std::vector<std::uint8_t> mask_ds;
    std::vector<BioTag> targets_ds;
    std::vector<BioTag> ctc_target;
    std::uint64_t uid = 0;  // stable id for dropout seeding
  };

  struct BatchStats {
    double ce = 0.0, ctc = 0.0, total = 0.0;
    int infeasible = 0;
  };

  BatchStats process_batch(const std::vector<std::size_t>& ids);
  void sync_workers();
  EvalReport evaluate_dev();

  ModelConfig model_config_;
  TrainConfig config_;
  MetricConfig metric_config_;
  std::vector<Sample> dev_;
  std::optional<NormStats> norm_;
  std::array<double, 3> class_weights_ = {1.0, 1.0, 1.0};

  std::vector<TrainWindow> windows_;
  std::unique_ptr<Network<float>> net_;
  std::vector<std::unique_ptr<Network<float>>> workers_;
  int worker_count_ = 1;

  std::vector<MatF> adam_m_, adam_v_;
  std::int64_t global_step_ = 0;
  int epoch_ = 0;
  double lr_ = 0.0;
  double best_f1_ = -1.0;
  int best_epoch_ = 0;
  int epochs_since_best_ = 0;
  int plateau_counter_ = 0;
  bool stop_ = false;
  double last_grad_norm_ = 0.0;
  std::map<std::string, MatF> best_params_;
};

nlohmann::json epoch_log_to_json(const std::vector<EpochRecord>& log);
void write_epoch_log(const std::filesystem::path& path,
                     const std::vector<EpochRecord>& log);

}  // namespace signseg
