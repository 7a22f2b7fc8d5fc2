#include "model/config.hpp"

#include "util/error.hpp"
#include "util/strict_json.hpp"

namespace signseg {

using nlohmann::json;

namespace {

std::string downsample_name(DownsampleMode m) {
  return m == DownsampleMode::kAverage ? "average" : "stride";
}
DownsampleMode downsample_from(const std::string& s, const std::string& path) {
  if (s == "average") return DownsampleMode::kAverage;
  if (s == "stride") return DownsampleMode::kStride;
  throw ConfigError("config: " + path +
                    ".downsample must be 'average' or 'stride', got '" + s + "'");
}

std::string pe_name(PositionalEncodingKind k) {
  return k == PositionalEncodingKind::kSinusoidal ? "sinusoidal" : "learned";
}
PositionalEncodingKind pe_from(const std::string& s, const std::string& path) {
  if (s == "sinusoidal") return PositionalEncodingKind::kSinusoidal;
  if (s == "learned") return PositionalEncodingKind::kLearned;
  throw ConfigError("config: " + path +
                    ".positional_encoding must be 'sinusoidal' or 'learned', got '" +
                    s + "'");
}

std::string mixer_mode_name(MixerMode m) {
  return m == MixerMode::kMlp ? "mlp" : "cross_attention";
}
MixerMode mixer_mode_from(const std::string& s, const std::string& path) {
  if (s == "mlp") return MixerMode::kMlp;
  if (s == "cross_attention") return MixerMode::kCrossAttention;
  throw ConfigError("config: " + path +
                    ".mixer_mode must be 'mlp' or 'cross_attention', got '" + s +
                    "'");
}

}  // namespace

void ModelConfig::validate() const {
  if (adapter_hidden < 1 || adapter_out < 1 || mixer_out < 1 ||
      encoder_layers < 1 || attention_heads < 1 || feedforward_width < 1) {
    throw ConfigError("model: widths and layer counts must be >= 1");
  }
  if (mixer_out % attention_heads != 0) {
    throw ConfigError("model: mixer_out (" + std::to_string(mixer_out) +
                      ") must be divisible by attention_heads (" +
                      std::to_string(attention_heads) + ")");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw ConfigError("model: dropout must be in [0, 1)");
  }
  if (downsample_factor != 2) {
    throw ConfigError("model: downsample_factor is fixed at 2");
  }
  if (max_window < 2) throw ConfigError("model: max_window must be >= 2");
}

json ModelConfig::to_json() const {
  return {{"adapter_hidden", adapter_hidden},
          {"adapter_out", adapter_out},
          {"mixer_out", mixer_out},
          {"encoder_layers", encoder_layers},
          {"attention_heads", attention_heads},
          {"feedforward_width", feedforward_width},
          {"dropout", dropout},
          {"downsample_factor", downsample_factor},
          {"downsample", downsample_name(downsample)},
          {"positional_encoding", pe_name(positional_encoding)},
          {"max_window", max_window}};
}

ModelConfig ModelConfig::from_json(const json& j, const std::string& path) {
  jsonutil::check_allowed_keys(
      j, path,
      {"adapter_hidden", "adapter_out", "mixer_out", "encoder_layers",
       "attention_heads", "feedforward_width", "dropout", "downsample_factor",
       "downsample", "positional_encoding", "max_window"});
  ModelConfig c;
  c.adapter_hidden = static_cast<int>(jsonutil::get_int(j, path, "adapter_hidden", c.adapter_hidden));
  c.adapter_out = static_cast<int>(jsonutil::get_int(j, path, "adapter_out", c.adapter_out));
  c.mixer_out = static_cast<int>(jsonutil::get_int(j, path, "mixer_out", c.mixer_out));
  c.encoder_layers = static_cast<int>(jsonutil::get_int(j, path, "encoder_layers", c.encoder_layers));
  c.attention_heads = static_cast<int>(jsonutil::get_int(j, path, "attention_heads", c.attention_heads));
  c.feedforward_width = static_cast<int>(jsonutil::get_int(j, path, "feedforward_width", c.feedforward_width));
  c.dropout = jsonutil::get_number(j, path, "dropout", c.dropout);
  c.downsample_factor = static_cast<int>(jsonutil::get_int(j, path, "downsample_factor", c.downsample_factor));
  c.downsample = downsample_from(
      jsonutil::get_string(j, path, "downsample", downsample_name(c.downsample)), path);
  c.positional_encoding = pe_from(
      jsonutil::get_string(j, path, "positional_encoding", pe_name(c.positional_encoding)), path);
  c.max_window = jsonutil::get_int(j, path, "max_window", c.max_window);
  c.validate();
  return c;
}

void ModulesConfig::validate() const {
  if (!use_angles && !use_hamer) {
    throw ConfigError("modules: feature set must not be empty");
  }
}

json ModulesConfig::to_json() const {
  json features = json::array();
  if (use_angles) features.push_back("angles");
  if (use_hamer) features.push_back("hamer");
  return {{"feature_set", features},
          {"use_adapters", use_adapters},
          {"use_mixer", use_mixer},
          {"mixer_mode", mixer_mode_name(mixer_mode)}};
}

ModulesConfig ModulesConfig::from_json(const json& j, const std::string& path) {
  jsonutil::check_allowed_keys(
      j, path, {"feature_set", "use_adapters", "use_mixer", "mixer_mode"});
  ModulesConfig c;
  if (const json* fs = jsonutil::find(j, "feature_set")) {
    if (!fs->is_array()) {
      throw ConfigError("config: " + path + ".feature_set must be an array");
    }
    c.use_angles = false;
    c.use_hamer = false;
    for (const auto& item : *fs) {
      const std::string name = item.get<std::string>();
      if (name == "angles") {
        c.use_angles = true;
      } else if (name == "hamer") {
        c.use_hamer = true;
      } else {
        throw ConfigError("config: " + path + ".feature_set contains unknown stream '" +
                          name + "'");
      }
    }
  }
  c.use_adapters = jsonutil::get_bool(j, path, "use_adapters", c.use_adapters);
  c.use_mixer = jsonutil::get_bool(j, path, "use_mixer", c.use_mixer);
  c.mixer_mode = mixer_mode_from(
      jsonutil::get_string(j, path, "mixer_mode", mixer_mode_name(c.mixer_mode)), path);
  c.validate();
  return c;
}

std::string ModulesConfig::describe() const {
  std::string s;
  if (use_angles) s += "angles";
  if (use_hamer) s += (s.empty() ? "hamer" : "+hamer");
  if (use_adapters) s += "+adapters";
  if (use_mixer) s += (mixer_mode == MixerMode::kMlp ? "+mixer" : "+xattn-mixer");
  return s;
}

}  // namespace signseg
