#include "data/sample.hpp"

#include <cmath>

#include "data/container.hpp"

namespace signseg {

namespace {

int pose_index(int hand, int joint, int row, int col) {
  return ((hand * HandParams::kJoints + joint) * 3 + row) * 3 + col;
}

int orient_index(int hand, int row, int col) {
  return (hand * 3 + row) * 3 + col;
}

void check_finite(const MatF& m, const char* field) {
  if (!m.allFinite()) {
    throw ValidationError(std::string("sample: non-finite value in '") +
                          field + "'");
  }
}

}  // namespace

HandParams HandParams::from_arrays(std::span<const float> hand_pose,
                                   std::span<const float> global_orient) {
  if (hand_pose.size() != kPoseCount) {
    throw ValidationError("hand_pose must have " + std::to_string(kPoseCount) +
                          " entries (2x15x3x3), got " +
                          std::to_string(hand_pose.size()));
  }
  if (global_orient.size() != kOrientCount) {
    throw ValidationError("global_orient must have " +
                          std::to_string(kOrientCount) +
                          " entries (2x3x3), got " +
                          std::to_string(global_orient.size()));
  }
  HandParams p;
  std::copy(hand_pose.begin(), hand_pose.end(), p.pose_.begin());
  std::copy(global_orient.begin(), global_orient.end(), p.orient_.begin());
  return p;
}

float& HandParams::pose_at(int hand, int joint, int row, int col) {
  return pose_[static_cast<std::size_t>(pose_index(hand, joint, row, col))];
}
float HandParams::pose_at(int hand, int joint, int row, int col) const {
  return pose_[static_cast<std::size_t>(pose_index(hand, joint, row, col))];
}
float& HandParams::orient_at(int hand, int row, int col) {
  return orient_[static_cast<std::size_t>(orient_index(hand, row, col))];
}
float HandParams::orient_at(int hand, int row, int col) const {
  return orient_[static_cast<std::size_t>(orient_index(hand, row, col))];
}

VecF flatten_hamer(const HandParams& p) {
  VecF out(kHamerDim);
  int k = 0;
  for (float v : p.pose_flat()) out[k++] = v;
  for (float v : p.orient_flat()) out[k++] = v;
  return out;
}

void validate_sample(const Sample& s) {
  const FeatureBundle& f = s.features;
  if (f.hamer.cols() != kHamerDim) {
    throw ValidationError("sample '" + f.sample_id + "': hamer has " +
                          std::to_string(f.hamer.cols()) +
                          " columns, expected " + std::to_string(kHamerDim));
  }
  if (f.angles.cols() != kAngleDim) {
    throw ValidationError("sample '" + f.sample_id + "': angles has " +
                          std::to_string(f.angles.cols()) +
                          " columns, expected " + std::to_string(kAngleDim));
  }
  if (f.hamer.rows() != f.angles.rows()) {
    throw ValidationError(
        "sample '" + f.sample_id + "': hamer has " +
        std::to_string(f.hamer.rows()) + " rows but angles has " +
        std::to_string(f.angles.rows()));
  }
  if (!(f.frame_rate_hz > 0.0)) {
    throw ValidationError("sample '" + f.sample_id +
                          "': frame_rate_hz must be positive");
  }
  check_finite(f.hamer, "hamer");
  check_finite(f.angles, "angles");

  const std::int64_t frames = f.frames();
  if (s.labels) {
    if (s.labels->size() != frames) {
      throw ValidationError("sample '" + f.sample_id + "': labels length " +
                            std::to_string(s.labels->size()) +
                            " does not match " + std::to_string(frames) +
                            " frames");
    }
  }
  if (s.glosses) {
    validate_gloss_annotation(*s.glosses, frames);
    if (s.labels) {
      const TagSequence from_glosses =
          tags_from_segments(s.glosses->segments, frames, f.frame_rate_hz);
      if (from_glosses.tags != s.labels->tags) {
        throw ValidationError("sample '" + f.sample_id +
                              "': gloss segments are inconsistent with labels");
      }
    }
  }
}

Sample load_sample(const std::filesystem::path& path) {
  const Container c = read_container(path, kSampleMagic);

  Sample s;
  s.features.sample_id = c.meta.value("sample_id", std::string{});
  s.features.frame_rate_hz = c.meta.value("frame_rate_hz", 50.0);
  const std::int64_t frames = c.meta.value("frames", std::int64_t{-1});

  s.features.hamer = c.get_f32("hamer", frames, kHamerDim);
  s.features.angles = c.get_f32("angles", frames, kAngleDim);

  if (c.has("labels")) {
    const std::vector<std::uint8_t> codes = c.get_u8("labels", frames);
    TagSequence labels;
    labels.frame_rate_hz = s.features.frame_rate_hz;
    labels.tags.reserve(codes.size());
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (!is_valid_tag_code(codes[i])) {
        throw ValidationError("sample '" + s.features.sample_id +
                              "': labels[" + std::to_string(i) +
                              "] has invalid tag code " +
                              std::to_string(codes[i]));
      }
      labels.tags.push_back(static_cast<BioTag>(codes[i]));
    }
    s.labels = std::move(labels);
  }

  if (c.meta.contains("glosses")) {
    GlossAnnotation g;
    for (const auto& item : c.meta.at("glosses")) {
      g.segments.push_back({item.at("start").get<std::int64_t>(),
                            item.at("end").get<std::int64_t>()});
      g.gloss_ids.push_back(item.at("gloss_id").get<std::string>());
    }
    s.glosses = std::move(g);
  }

  validate_sample(s);
  return s;
}

void save_sample(const std::filesystem::path& path, const Sample& s) {
  validate_sample(s);

  Container c;
  c.meta["sample_id"] = s.features.sample_id;
  c.meta["frames"] = s.features.frames();
  c.meta["frame_rate_hz"] = s.features.frame_rate_hz;
  if (s.glosses) {
    nlohmann::json glosses = nlohmann::json::array();
    for (std::size_t i = 0; i < s.glosses->segments.size(); ++i) {
      glosses.push_back({{"start", s.glosses->segments[i].start},
                         {"end", s.glosses->segments[i].end},
                         {"gloss_id", s.glosses->gloss_ids[i]}});
    }
    c.meta["glosses"] = std::move(glosses);
  }

  c.add_f32("hamer", s.features.hamer);
  c.add_f32("angles", s.features.angles);
  if (s.labels) {
    std::vector<std::uint8_t> codes;
    codes.reserve(s.labels->tags.size());
    for (BioTag t : s.labels->tags) codes.push_back(static_cast<std::uint8_t>(t));
    c.add_u8("labels", codes);
  }

  write_container(path, kSampleMagic, c);
}

}  // namespace signseg
