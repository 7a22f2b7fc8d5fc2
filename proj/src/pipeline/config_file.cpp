#include "pipeline/config_file.hpp"

#include "util/strict_json.hpp"

namespace signseg {

using nlohmann::json;

namespace {

json synth_to_json(const SynthConfig& c) {
  return {{"num_samples", c.num_samples},
          {"frames_min", c.frames_min},
          {"frames_max", c.frames_max},
          {"sign_frames_min", c.sign_frames_min},
          {"sign_frames_max", c.sign_frames_max},
          {"pause_frames_min", c.pause_frames_min},
          {"pause_frames_max", c.pause_frames_max},
          {"num_prototypes", c.num_prototypes},
          {"noise_sigma", c.noise_sigma},
          {"separation", c.separation},
          {"frame_rate_hz", c.frame_rate_hz},
          {"even_alignment", c.even_alignment}};
}

SynthConfig synth_from_json(const json& j, const std::string& path) {
  jsonutil::check_allowed_keys(
      j, path,
      {"num_samples", "frames_min", "frames_max", "sign_frames_min",
       "sign_frames_max", "pause_frames_min", "pause_frames_max",
       "num_prototypes", "noise_sigma", "separation", "frame_rate_hz",
       "even_alignment"});
  SynthConfig c;
  c.num_samples = static_cast<int>(jsonutil::get_int(j, path, "num_samples", c.num_samples));
  c.frames_min = jsonutil::get_int(j, path, "frames_min", c.frames_min);
  c.frames_max = jsonutil::get_int(j, path, "frames_max", c.frames_max);
  c.sign_frames_min = jsonutil::get_int(j, path, "sign_frames_min", c.sign_frames_min);
  c.sign_frames_max = jsonutil::get_int(j, path, "sign_frames_max", c.sign_frames_max);
  c.pause_frames_min = jsonutil::get_int(j, path, "pause_frames_min", c.pause_frames_min);
  c.pause_frames_max = jsonutil::get_int(j, path, "pause_frames_max", c.pause_frames_max);
  c.num_prototypes = static_cast<int>(jsonutil::get_int(j, path, "num_prototypes", c.num_prototypes));
  c.noise_sigma = jsonutil::get_number(j, path, "noise_sigma", c.noise_sigma);
  c.separation = jsonutil::get_number(j, path, "separation", c.separation);
  c.frame_rate_hz = jsonutil::get_number(j, path, "frame_rate_hz", c.frame_rate_hz);
  c.even_alignment = jsonutil::get_bool(j, path, "even_alignment", c.even_alignment);
  c.validate();
  return c;
}

}  // namespace

json FullConfig::to_json() const {
  return {{"synth", synth_to_json(synth)},
          {"model", model.to_json()},
          {"train", train.to_json()},
          {"metrics", metrics.to_json()},
          {"paths",
           {{"manifest", paths.manifest}, {"out_dir", paths.out_dir}}}};
}

FullConfig FullConfig::from_json(const json& j) {
  jsonutil::check_allowed_keys(j, "config",
                               {"synth", "model", "train", "metrics", "paths"});
  FullConfig c;
  if (const json* v = jsonutil::find(j, "synth")) {
    c.synth = synth_from_json(*v, "synth");
  }
  if (const json* v = jsonutil::find(j, "model")) {
    c.model = ModelConfig::from_json(*v, "model");
  }
  if (const json* v = jsonutil::find(j, "train")) {
    c.train = TrainConfig::from_json(*v, "train");
  }
  if (const json* v = jsonutil::find(j, "metrics")) {
    c.metrics = MetricConfig::from_json(*v, "metrics");
  }
  if (const json* v = jsonutil::find(j, "paths")) {
    jsonutil::check_allowed_keys(*v, "paths", {"manifest", "out_dir"});
    c.paths.manifest = jsonutil::get_string(*v, "paths", "manifest", "");
    c.paths.out_dir = jsonutil::get_string(*v, "paths", "out_dir", "");
  }
  return c;
}

FullConfig load_full_config(const std::filesystem::path& path) {
  return FullConfig::from_json(jsonutil::load_json_file(path.string()));
}

FullConfig parse_full_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed config JSON: ") + e.what());
  }
  return FullConfig::from_json(j);
}

}  // namespace signseg
