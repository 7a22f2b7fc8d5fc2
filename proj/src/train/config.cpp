#include "train/config.hpp"

#include "util/error.hpp"
#include "util/strict_json.hpp"

namespace signseg {

using nlohmann::json;

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be > 0");
  if (scheduler_patience < 1) throw ConfigError("train: scheduler_patience must be >= 1");
  if (!(scheduler_factor > 0.0 && scheduler_factor < 1.0)) {
    throw ConfigError("train: scheduler_factor must be in (0, 1)");
  }
  if (!(clip_norm > 0.0)) throw ConfigError("train: clip_norm must be > 0");
  if (early_stop_patience < 1) throw ConfigError("train: early_stop_patience must be >= 1");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (max_epochs < 1) throw ConfigError("train: max_epochs must be >= 1");
  if (lambda_ce < 0.0 || lambda_ctc < 0.0) {
    throw ConfigError("train: loss weights must be >= 0");
  }
  if (window < 2) throw ConfigError("train: window must be >= 2");
  if (stride < 1 || stride > window) {
    throw ConfigError("train: stride must be in [1, window]");
  }
  if (workers < 0) throw ConfigError("train: workers must be >= 0");
  modules.validate();
}

json TrainConfig::to_json() const {
  json j = {{"learning_rate", learning_rate},
            {"scheduler_patience", scheduler_patience},
            {"scheduler_factor", scheduler_factor},
            {"clip_norm", clip_norm},
            {"early_stop_patience", early_stop_patience},
            {"batch_size", batch_size},
            {"max_epochs", max_epochs},
            {"seed", seed},
            {"lambda_ce", lambda_ce},
            {"lambda_ctc", lambda_ctc},
            {"class_weights", class_weights == ClassWeightMode::kUniform
                                  ? "uniform"
                                  : "inverse_frequency"},
            {"window", window},
            {"stride", stride},
            {"normalize", normalize},
            {"workers", workers},
            {"stop_at_dev_f1", stop_at_dev_f1}};
  const json mods = modules.to_json();
  for (auto it = mods.begin(); it != mods.end(); ++it) j[it.key()] = it.value();
  return j;
}

TrainConfig TrainConfig::from_json(const json& j, const std::string& path) {
  jsonutil::check_allowed_keys(
      j, path,
      {"learning_rate", "scheduler_patience", "scheduler_factor", "clip_norm",
       "early_stop_patience", "batch_size", "max_epochs", "seed", "lambda_ce",
       "lambda_ctc", "class_weights", "window", "stride", "normalize",
       "workers", "stop_at_dev_f1", "feature_set", "use_adapters", "use_mixer",
       "mixer_mode"});
  TrainConfig c;
  c.learning_rate = jsonutil::get_number(j, path, "learning_rate", c.learning_rate);
  c.scheduler_patience = static_cast<int>(jsonutil::get_int(j, path, "scheduler_patience", c.scheduler_patience));
  c.scheduler_factor = jsonutil::get_number(j, path, "scheduler_factor", c.scheduler_factor);
  c.clip_norm = jsonutil::get_number(j, path, "clip_norm", c.clip_norm);
  c.early_stop_patience = static_cast<int>(jsonutil::get_int(j, path, "early_stop_patience", c.early_stop_patience));
  c.batch_size = static_cast<int>(jsonutil::get_int(j, path, "batch_size", c.batch_size));
  c.max_epochs = static_cast<int>(jsonutil::get_int(j, path, "max_epochs", c.max_epochs));
  c.seed = static_cast<std::uint64_t>(jsonutil::get_int(j, path, "seed", static_cast<std::int64_t>(c.seed)));
  c.lambda_ce = jsonutil::get_number(j, path, "lambda_ce", c.lambda_ce);
  c.lambda_ctc = jsonutil::get_number(j, path, "lambda_ctc", c.lambda_ctc);
  const std::string cw = jsonutil::get_string(j, path, "class_weights", "uniform");
  if (cw == "uniform") {
    c.class_weights = ClassWeightMode::kUniform;
  } else if (cw == "inverse_frequency") {
    c.class_weights = ClassWeightMode::kInverseFrequency;
  } else {
    throw ConfigError("config: " + path + ".class_weights must be 'uniform' or "
                      "'inverse_frequency'");
  }
  c.window = jsonutil::get_int(j, path, "window", c.window);
  c.stride = jsonutil::get_int(j, path, "stride", c.stride);
  c.normalize = jsonutil::get_bool(j, path, "normalize", c.normalize);
  c.workers = static_cast<int>(jsonutil::get_int(j, path, "workers", c.workers));
  c.stop_at_dev_f1 = jsonutil::get_number(j, path, "stop_at_dev_f1", c.stop_at_dev_f1);
  c.modules = ModulesConfig::from_json(
      [&] {
        json mods = json::object();
        for (const char* k : {"feature_set", "use_adapters", "use_mixer", "mixer_mode"}) {
          if (j.contains(k)) mods[k] = j.at(k);
        }
        return mods;
      }(),
      path);
  c.validate();
  return c;
}

}  // namespace signseg
