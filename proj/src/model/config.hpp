#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace signseg {

enum class DownsampleMode { kAverage, kStride };
enum class PositionalEncodingKind { kSinusoidal, kLearned };
enum class MixerMode { kMlp, kCrossAttention };

struct ModelConfig {
  int adapter_hidden = 512;
  int adapter_out = 512;
  int mixer_out = 512;
  int encoder_layers = 4;
  int attention_heads = 8;
  int feedforward_width = 1024;
  double dropout = 0.1;
  int downsample_factor = 2;  // fixed; configs requesting anything else fail
  DownsampleMode downsample = DownsampleMode::kAverage;
  PositionalEncodingKind positional_encoding = PositionalEncodingKind::kSinusoidal;
  std::int64_t max_window = 512;

  void validate() const;
  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j, const std::string& path);
};

// Which feature streams feed the network and which modules are learned.
// With adapters (or the mixer) off, a frozen random projection keeps the
// downstream shapes identical so ablations change exactly one thing.
struct ModulesConfig {
  bool use_angles = true;
  bool use_hamer = true;
  bool use_adapters = true;
  bool use_mixer = true;
  MixerMode mixer_mode = MixerMode::kMlp;

  int stream_count() const { return (use_angles ? 1 : 0) + (use_hamer ? 1 : 0); }
  void validate() const;
  nlohmann::json to_json() const;
  static ModulesConfig from_json(const nlohmann::json& j, const std::string& path);
  std::string describe() const;
};

}  // namespace signseg
