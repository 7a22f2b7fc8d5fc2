#include "train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "data/windows.hpp"
#include "model/labels.hpp"
#include "objective/losses.hpp"
#include "train/predict.hpp"
#include "util/rng.hpp"

namespace signseg {

using nlohmann::json;

json EpochRecord::to_json() const {
  return {{"epoch", epoch},
          {"train_loss",
           {{"ce", ce},
            {"ctc", ctc},
            {"total", total},
            {"ctc_infeasible_windows", ctc_infeasible_windows}}},
          {"dev",
           {{"frame_f1", dev.frame_f1},
            {"iou", dev.iou},
            {"segment_ratio", dev.segment_ratio},
            {"mf1b", dev.mf1b},
            {"mf1s", dev.mf1s}}},
          {"lr", lr},
          {"wall_time_s", wall_s}};
}

json epoch_log_to_json(const std::vector<EpochRecord>& log) {
  json out = json::array();
  for (const EpochRecord& r : log) out.push_back(r.to_json());
  return out;
}

void write_epoch_log(const std::filesystem::path& path,
                     const std::vector<EpochRecord>& log) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open log for writing: " + path.string());
  for (const EpochRecord& r : log) out << r.to_json().dump() << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

Trainer::Trainer(const ModelConfig& model_config, const TrainConfig& config,
                 MetricConfig metric_config, std::vector<Sample> train,
                 std::vector<Sample> dev)
    : model_config_(model_config),
      config_(config),
      metric_config_(std::move(metric_config)),
      dev_(std::move(dev)) {
  model_config_.validate();
  config_.validate();
  metric_config_.validate();
  if (train.empty()) throw ValidationError("train: empty train split");
  if (dev_.empty()) throw ValidationError("train: empty dev split");
  for (const Sample& s : train) {
    if (!s.labels) {
      throw ValidationError("train: sample '" + s.features.sample_id +
                            "' has no labels");
    }
  }
  for (const Sample& s : dev_) {
    if (!s.labels) {
      throw ValidationError("train: dev sample '" + s.features.sample_id +
                            "' has no labels");
    }
  }
  lr_ = config_.learning_rate;

  if (config_.normalize) {
    norm_ = compute_normalization(train);
  }

  // Slice every training sample into fixed windows with per-window
  // half-rate targets; these never change across epochs.
  std::uint64_t uid = 0;
  for (Sample& s : train) {
    if (norm_) {
      apply_normalization(*norm_, s.features.hamer, s.features.angles);
    }
    for (WindowedSample& w : make_windows(s, config_.window, config_.stride)) {
      TrainWindow tw;
      tw.hamer = std::move(w.hamer);
      tw.angles = std::move(w.angles);
      tw.frame_mask = std::move(w.frame_mask);
      const TagSequence ds =
          downsample_labels(*w.labels, tw.frame_mask, &tw.mask_ds);
      tw.targets_ds = ds.tags;
      tw.ctc_target = collapse_for_ctc(ds);
      tw.uid = uid++;
      windows_.push_back(std::move(tw));
    }
  }

  if (config_.class_weights == ClassWeightMode::kInverseFrequency) {
    std::array<std::int64_t, 3> counts = {0, 0, 0};
    std::int64_t total = 0;
    for (const TrainWindow& w : windows_) {
      for (std::size_t i = 0; i < w.targets_ds.size(); ++i) {
        if (!w.mask_ds[i]) continue;
        counts[static_cast<std::size_t>(w.targets_ds[i])]++;
        ++total;
      }
    }
    for (int k = 0; k < 3; ++k) {
      class_weights_[static_cast<std::size_t>(k)] =
          counts[static_cast<std::size_t>(k)] > 0
              ? static_cast<double>(total) /
                    (3.0 * static_cast<double>(counts[static_cast<std::size_t>(k)]))
              : 1.0;
    }
  }

  net_ = std::make_unique<Network<float>>(model_config_, config_.modules,
                                          config_.seed);
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  worker_count_ = config_.workers > 0 ? config_.workers
                                      : std::clamp(hw, 1, 8);
  for (int w = 0; w < worker_count_; ++w) {
    workers_.push_back(std::make_unique<Network<float>>(
        model_config_, config_.modules, config_.seed));
  }

  for (nn::Param<float>* p : net_->parameters()) {
    adam_m_.push_back(MatF::Zero(p->value.rows(), p->value.cols()));
    adam_v_.push_back(MatF::Zero(p->value.rows(), p->value.cols()));
  }
}

void Trainer::sync_workers() {
  for (auto& w : workers_) w->copy_values_from(*net_);
}

Trainer::BatchStats Trainer::process_batch(const std::vector<std::size_t>& ids) {
  const int nw = std::min<int>(worker_count_, static_cast<int>(ids.size()));
  struct Slot {
    double ce = 0.0, ctc = 0.0, total = 0.0;
    bool infeasible = false;
  };
  std::vector<Slot> slots(ids.size());

  auto work = [&](int w) {
    Network<float>& net = *workers_[static_cast<std::size_t>(w)];
    net.zero_grads();
    for (std::size_t k = static_cast<std::size_t>(w); k < ids.size();
         k += static_cast<std::size_t>(nw)) {
      const TrainWindow& win = windows_[ids[k]];
      const std::uint64_t drop_seed =
          mix_seed(config_.seed, "dropout", static_cast<std::uint64_t>(epoch_),
                   static_cast<std::uint64_t>(global_step_), win.uid);
      auto out = net.forward(win.hamer, win.angles, win.frame_mask,
                             /*training=*/true, drop_seed);
      MatT<float> dlogits;
      const LossBreakdown<float> loss = combined_loss(
          out.logits, win.targets_ds, win.ctc_target, class_weights_,
          win.mask_ds, config_.lambda_ce, config_.lambda_ctc, &dlogits);
      net.backward(dlogits);
      slots[k] = {static_cast<double>(loss.ce), static_cast<double>(loss.ctc),
                  static_cast<double>(loss.total), loss.ctc_infeasible};
    }
  };

  if (nw == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < nw; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }

  // Deterministic reductions: grads in worker order, losses in window order.
  const float inv_batch = 1.0f / static_cast<float>(ids.size());
  auto master = net_->parameters();
  std::vector<std::vector<nn::Param<float>*>> worker_params;
  for (int w = 0; w < nw; ++w) {
    worker_params.push_back(workers_[static_cast<std::size_t>(w)]->parameters());
  }
  for (std::size_t p = 0; p < master.size(); ++p) {
    master[p]->grad = worker_params[0][p]->grad;
    for (int w = 1; w < nw; ++w) {
      master[p]->grad += worker_params[static_cast<std::size_t>(w)][p]->grad;
    }
    master[p]->grad *= inv_batch;
  }

  BatchStats stats;
  for (const Slot& s : slots) {
    stats.ce += s.ce;
    stats.ctc += s.ctc;
    stats.total += s.total;
    stats.infeasible += s.infeasible ? 1 : 0;
  }
  stats.ce /= static_cast<double>(ids.size());
  stats.ctc /= static_cast<double>(ids.size());
  stats.total /= static_cast<double>(ids.size());
  return stats;
}

EvalReport Trainer::evaluate_dev() {
  std::vector<EvalPair> pairs(dev_.size());
  const int nw = std::min<int>(worker_count_, static_cast<int>(dev_.size()));
  auto work = [&](int w) {
    Network<float>& net = *workers_[static_cast<std::size_t>(w)];
    for (std::size_t k = static_cast<std::size_t>(w); k < dev_.size();
         k += static_cast<std::size_t>(std::max(nw, 1))) {
      const Sample& s = dev_[k];
      pairs[k].sample_id = s.features.sample_id;
      pairs[k].pred =
          predict_tags(net, norm_, s, config_.window, config_.stride);
      pairs[k].gt = *s.labels;
    }
  };
  if (nw <= 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < nw; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  return evaluate(pairs, metric_config_);
}

EpochRecord Trainer::run_epoch() {
  const auto start = std::chrono::steady_clock::now();
  epoch_ += 1;

  std::vector<std::size_t> order(windows_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 shuffle_rng = make_engine(config_.seed, "shuffle",
                                            static_cast<std::uint64_t>(epoch_));
  std::shuffle(order.begin(), order.end(), shuffle_rng);

  sync_workers();

  EpochRecord record;
  record.epoch = epoch_;
  int batches = 0;
  auto params = net_->parameters();

  for (std::size_t pos = 0; pos < order.size();
       pos += static_cast<std::size_t>(config_.batch_size)) {
    const std::size_t end =
        std::min(order.size(), pos + static_cast<std::size_t>(config_.batch_size));
    const std::vector<std::size_t> ids(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                       order.begin() + static_cast<std::ptrdiff_t>(end));
    const BatchStats stats = process_batch(ids);
    if (!std::isfinite(stats.total)) {
      throw Error("train: non-finite loss in epoch " + std::to_string(epoch_) +
                  ", batch " + std::to_string(batches) +
                  " (first window id " + std::to_string(ids.front()) + ")");
    }
    record.ce += stats.ce;
    record.ctc += stats.ctc;
    record.total += stats.total;
    record.ctc_infeasible_windows += stats.infeasible;
    ++batches;

    // Global norm clip over trainable parameters, then Adam.
    double sq = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
      if (!params[p]->trainable) continue;
      sq += static_cast<double>(params[p]->grad.squaredNorm());
    }
    const double norm = std::sqrt(sq);
    if (norm > config_.clip_norm) {
      const float scale = static_cast<float>(config_.clip_norm / norm);
      for (std::size_t p = 0; p < params.size(); ++p) {
        if (params[p]->trainable) params[p]->grad *= scale;
      }
      last_grad_norm_ = config_.clip_norm;
    } else {
      last_grad_norm_ = norm;
    }

    global_step_ += 1;
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(global_step_));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(global_step_));
    const float step_size = static_cast<float>(lr_ / bc1);
    const float inv_sqrt_bc2 = static_cast<float>(1.0 / std::sqrt(bc2));
    for (std::size_t p = 0; p < params.size(); ++p) {
      if (!params[p]->trainable) continue;
      MatF& m = adam_m_[p];
      MatF& v = adam_v_[p];
      const MatF& g = params[p]->grad;
      m = static_cast<float>(kBeta1) * m + static_cast<float>(1.0 - kBeta1) * g;
      v = (static_cast<float>(kBeta2) * v.array() +
           static_cast<float>(1.0 - kBeta2) * g.array().square())
              .matrix();
      params[p]->value.array() -=
          step_size * m.array() /
          (v.array().sqrt() * inv_sqrt_bc2 + static_cast<float>(kEps));
    }
    sync_workers();
  }

  if (batches > 0) {
    record.ce /= batches;
    record.ctc /= batches;
    record.total /= batches;
  }

  record.dev = evaluate_dev();
  record.lr = lr_;

  const double f1 = record.dev.frame_f1;
  if (f1 > best_f1_) {
    best_f1_ = f1;
    best_epoch_ = epoch_;
    epochs_since_best_ = 0;
    plateau_counter_ = 0;
    best_params_.clear();
    for (nn::Param<float>* p : net_->parameters()) best_params_[p->name] = p->value;
  } else {
    epochs_since_best_ += 1;
    plateau_counter_ += 1;
    if (plateau_counter_ >= config_.scheduler_patience) {
      lr_ *= config_.scheduler_factor;
      plateau_counter_ = 0;
    }
  }
  if (epochs_since_best_ >= config_.early_stop_patience) stop_ = true;
  if (config_.stop_at_dev_f1 > 0.0 && best_f1_ >= config_.stop_at_dev_f1) {
    stop_ = true;
  }

  record.wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return record;
}

bool Trainer::should_stop() const {
  return stop_ || epoch_ >= config_.max_epochs;
}

TrainResult Trainer::run() {
  TrainResult result;
  while (!should_stop()) {
    result.log.push_back(run_epoch());
  }
  result.best = best_checkpoint();
  result.best_dev_f1 = best_f1_;
  result.best_epoch = best_epoch_;
  return result;
}

Checkpoint Trainer::best_checkpoint() {
  Checkpoint c;
  c.model = model_config_;
  c.modules = config_.modules;
  c.norm = norm_;
  if (best_params_.empty()) {
    for (nn::Param<float>* p : net_->parameters()) c.tensors[p->name] = p->value;
  } else {
    c.tensors = best_params_;
  }
  c.train_meta = {{"epoch", best_epoch_},
                  {"best_dev_f1", best_f1_},
                  {"seed", config_.seed}};
  return c;
}

void Trainer::save_state(const std::filesystem::path& path) {
  Checkpoint c;
  c.model = model_config_;
  c.modules = config_.modules;
  c.norm = norm_;
  auto params = net_->parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    c.tensors[params[p]->name] = params[p]->value;
    c.tensors["opt.m." + params[p]->name] = adam_m_[p];
    c.tensors["opt.v." + params[p]->name] = adam_v_[p];
  }
  for (const auto& [name, value] : best_params_) {
    c.tensors["best." + name] = value;
  }
  c.train_meta = {{"epoch", epoch_},
                  {"global_step", global_step_},
                  {"lr", lr_},
                  {"best_dev_f1", best_f1_},
                  {"best_epoch", best_epoch_},
                  {"epochs_since_best", epochs_since_best_},
                  {"plateau_counter", plateau_counter_},
                  {"stopped", stop_},
                  {"has_best", !best_params_.empty()},
                  {"seed", config_.seed}};
  save_checkpoint(path, c);
}

void Trainer::load_state(const std::filesystem::path& path) {
  const Checkpoint c = load_checkpoint(path);
  auto params = net_->parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto get = [&](const std::string& name) -> const MatF& {
      auto it = c.tensors.find(name);
      if (it == c.tensors.end()) {
        throw ValidationError("train state: missing tensor '" + name + "'");
      }
      return it->second;
    };
    params[p]->value = get(params[p]->name);
    adam_m_[p] = get("opt.m." + params[p]->name);
    adam_v_[p] = get("opt.v." + params[p]->name);
  }
  epoch_ = c.train_meta.at("epoch").get<int>();
  global_step_ = c.train_meta.at("global_step").get<std::int64_t>();
  lr_ = c.train_meta.at("lr").get<double>();
  best_f1_ = c.train_meta.at("best_dev_f1").get<double>();
  best_epoch_ = c.train_meta.at("best_epoch").get<int>();
  epochs_since_best_ = c.train_meta.at("epochs_since_best").get<int>();
  plateau_counter_ = c.train_meta.at("plateau_counter").get<int>();
  stop_ = c.train_meta.at("stopped").get<bool>();
  best_params_.clear();
  if (c.train_meta.value("has_best", false)) {
    for (const auto& [name, value] : c.tensors) {
      if (name.rfind("best.", 0) == 0) best_params_[name.substr(5)] = value;
    }
  }
  sync_workers();
}

}  // namespace signseg
