#include "signseg.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "data/sample.hpp"
#include "metrics/metrics.hpp"
#include "pipeline/pipeline.hpp"

namespace {

thread_local std::string g_last_error;

sgs_status fail(sgs_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Exceptions to status codes, matching the CLI exit-code contract.
template <class Fn>
sgs_status guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SGS_OK;
  } catch (const signseg::ValidationError& e) {
    return fail(SGS_VALIDATION_ERROR, e.what());
  } catch (const signseg::IoError& e) {
    return fail(SGS_RUNTIME_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(SGS_RUNTIME_ERROR, e.what());
  }
}

signseg::FullConfig config_from(const char* config_json) {
  return signseg::parse_full_config(config_json && *config_json ? config_json
                                                                : "{}");
}

}  // namespace

struct sgs_sample {
  signseg::Sample sample;
};

extern "C" {

const char* sgs_version(void) { return "0.1.0"; }

const char* sgs_last_error(void) { return g_last_error.c_str(); }

sgs_status sgs_synth(const char* config_json, const char* out_dir,
                     uint64_t seed) {
  if (!out_dir) return fail(SGS_USAGE_ERROR, "sgs_synth: out_dir is null");
  return guard([&] {
    signseg::cmd_synth(config_from(config_json), out_dir, seed);
  });
}

sgs_status sgs_train(const char* config_json, const char* manifest_path,
                     const char* out_dir, int run_ablation) {
  if (!manifest_path || !out_dir) {
    return fail(SGS_USAGE_ERROR, "sgs_train: manifest_path/out_dir is null");
  }
  return guard([&] {
    signseg::cmd_train(config_from(config_json), manifest_path, out_dir,
                       run_ablation != 0);
  });
}

sgs_status sgs_eval(const char* config_json, const char* checkpoint_path,
                    const char* manifest_path, const char* split,
                    int oracle_predictions, const char* out_report_path) {
  if (!manifest_path || !split || !out_report_path) {
    return fail(SGS_USAGE_ERROR, "sgs_eval: required argument is null");
  }
  if (!oracle_predictions && !checkpoint_path) {
    return fail(SGS_USAGE_ERROR, "sgs_eval: checkpoint_path is null");
  }
  return guard([&] {
    signseg::cmd_eval(config_from(config_json),
                      checkpoint_path ? checkpoint_path : "", manifest_path,
                      split, oracle_predictions != 0, out_report_path);
  });
}

sgs_status sgs_predict(const char* config_json, const char* checkpoint_path,
                       const char* const* sample_paths, size_t num_samples,
                       const char* out_dir) {
  if (!checkpoint_path || !sample_paths || !out_dir) {
    return fail(SGS_USAGE_ERROR, "sgs_predict: required argument is null");
  }
  return guard([&] {
    std::vector<std::filesystem::path> paths;
    for (size_t i = 0; i < num_samples; ++i) {
      if (!sample_paths[i]) throw signseg::ValidationError("null sample path");
      paths.emplace_back(sample_paths[i]);
    }
    signseg::cmd_predict(config_from(config_json), checkpoint_path, paths,
                         out_dir);
  });
}

sgs_status sgs_report(const char* eval_report_path, const char* predictions_dir,
                      const char* manifest_path, const char* split,
                      const char* out_dir) {
  if (!out_dir) return fail(SGS_USAGE_ERROR, "sgs_report: out_dir is null");
  return guard([&] {
    signseg::cmd_report(eval_report_path ? eval_report_path : "",
                        predictions_dir ? predictions_dir : "",
                        manifest_path ? manifest_path : "",
                        split ? split : "", out_dir);
  });
}

sgs_status sgs_sample_open(const char* path, sgs_sample** out_sample) {
  if (!path || !out_sample) {
    return fail(SGS_USAGE_ERROR, "sgs_sample_open: null argument");
  }
  return guard([&] {
    auto handle = std::make_unique<sgs_sample>();
    handle->sample = signseg::load_sample(path);
    *out_sample = handle.release();
  });
}

void sgs_sample_close(sgs_sample* sample) { delete sample; }

int64_t sgs_sample_frames(const sgs_sample* sample) {
  return sample ? sample->sample.frames() : -1;
}

const char* sgs_sample_id(const sgs_sample* sample) {
  return sample ? sample->sample.features.sample_id.c_str() : "";
}

double sgs_sample_frame_rate(const sgs_sample* sample) {
  return sample ? sample->sample.features.frame_rate_hz : 0.0;
}

int sgs_sample_has_labels(const sgs_sample* sample) {
  return sample && sample->sample.labels ? 1 : 0;
}

sgs_status sgs_sample_labels(const sgs_sample* sample, uint8_t* out_tags,
                             size_t capacity) {
  if (!sample || !out_tags) {
    return fail(SGS_USAGE_ERROR, "sgs_sample_labels: null argument");
  }
  return guard([&] {
    if (!sample->sample.labels) {
      throw signseg::ValidationError("sample has no labels");
    }
    const auto& tags = sample->sample.labels->tags;
    if (capacity < tags.size()) {
      throw signseg::ValidationError("label buffer too small");
    }
    for (std::size_t i = 0; i < tags.size(); ++i) {
      out_tags[i] = static_cast<uint8_t>(tags[i]);
    }
  });
}

namespace {

signseg::TagSequence tags_from_codes(const uint8_t* tags, size_t num_tags) {
  signseg::TagSequence t;
  t.tags.reserve(num_tags);
  for (size_t i = 0; i < num_tags; ++i) {
    if (!signseg::is_valid_tag_code(tags[i])) {
      throw signseg::ValidationError("tags[" + std::to_string(i) +
                                     "] has invalid code " +
                                     std::to_string(tags[i]));
    }
    t.tags.push_back(static_cast<signseg::BioTag>(tags[i]));
  }
  return t;
}

}  // namespace

sgs_status sgs_segments_from_tags(const uint8_t* tags, size_t num_tags,
                                  int promote_orphans, int64_t* out_starts,
                                  int64_t* out_ends, size_t capacity,
                                  size_t* out_count) {
  if ((!tags && num_tags > 0) || !out_count) {
    return fail(SGS_USAGE_ERROR, "sgs_segments_from_tags: null argument");
  }
  return guard([&] {
    const auto segments = signseg::segments_from_tags(
        tags_from_codes(tags, num_tags),
        promote_orphans ? signseg::OrphanPolicy::kPromote
                        : signseg::OrphanPolicy::kDiscard);
    *out_count = segments.size();
    if (!out_starts || !out_ends) return;  // count query
    if (capacity < segments.size()) {
      throw signseg::ValidationError("segment buffer too small");
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
      out_starts[i] = segments[i].start;
      out_ends[i] = segments[i].end;
    }
  });
}

sgs_status sgs_tags_from_segments(const int64_t* starts, const int64_t* ends,
                                  size_t num_segments, int64_t frames,
                                  uint8_t* out_tags) {
  if (((!starts || !ends) && num_segments > 0) || (!out_tags && frames > 0)) {
    return fail(SGS_USAGE_ERROR, "sgs_tags_from_segments: null argument");
  }
  return guard([&] {
    std::vector<signseg::Segment> segments;
    for (size_t i = 0; i < num_segments; ++i) {
      segments.push_back({starts[i], ends[i]});
    }
    const signseg::TagSequence tags =
        signseg::tags_from_segments(segments, frames);
    for (std::int64_t i = 0; i < frames; ++i) {
      out_tags[i] = static_cast<uint8_t>(tags.tags[static_cast<std::size_t>(i)]);
    }
  });
}

sgs_status sgs_evaluate_tags(const uint8_t* pred, const uint8_t* gt,
                             size_t num_tags, const char* metric_config_json,
                             char** out_report_json) {
  if ((!pred || !gt) && num_tags > 0) {
    return fail(SGS_USAGE_ERROR, "sgs_evaluate_tags: null tags");
  }
  if (!out_report_json) {
    return fail(SGS_USAGE_ERROR, "sgs_evaluate_tags: null output");
  }
  return guard([&] {
    signseg::MetricConfig config;
    if (metric_config_json && *metric_config_json) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(metric_config_json);
      } catch (const nlohmann::json::parse_error& e) {
        throw signseg::ValidationError(std::string("malformed metric config: ") +
                                       e.what());
      }
      config = signseg::MetricConfig::from_json(j, "metrics");
    }
    std::vector<signseg::EvalPair> pairs;
    pairs.push_back({"sample", tags_from_codes(pred, num_tags),
                     tags_from_codes(gt, num_tags)});
    const std::string text = signseg::evaluate(pairs, config).to_json().dump(2);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out_report_json = buf;
  });
}

void sgs_string_free(char* s) { std::free(s); }

}  // extern "C"
