#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "core/bio.hpp"
#include "util/mat.hpp"

namespace signseg {

inline constexpr int kHamerDim = 288;   // 270 hand pose + 18 global orientation
inline constexpr int kAngleDim = 104;

// Raw per-frame hand parameters: rotation matrices for 15 joints of each
// of the two hands, plus a per-hand global orientation matrix.
class HandParams {
 public:
  static constexpr int kHands = 2;
  static constexpr int kJoints = 15;
  static constexpr int kPoseCount = kHands * kJoints * 3 * 3;   // 270
  static constexpr int kOrientCount = kHands * 3 * 3;           // 18

  HandParams() { pose_.fill(0.0f); orient_.fill(0.0f); }

  // Validates extents; the only way to build one from unshaped data.
  static HandParams from_arrays(std::span<const float> hand_pose,
                                std::span<const float> global_orient);

  float& pose_at(int hand, int joint, int row, int col);
  float pose_at(int hand, int joint, int row, int col) const;
  float& orient_at(int hand, int row, int col);
  float orient_at(int hand, int row, int col) const;

  std::span<const float> pose_flat() const { return pose_; }
  std::span<const float> orient_flat() const { return orient_; }

 private:
  std::array<float, kPoseCount> pose_;
  std::array<float, kOrientCount> orient_;
};

// Row-major flattening: hand pose by (hand, joint, row, col) to entries
// 0..269, then global orientation by (hand, row, col) to 270..287.
VecF flatten_hamer(const HandParams& p);

struct FeatureBundle {
  std::string sample_id;
  MatF hamer;    // T x 288
  MatF angles;   // T x 104
  double frame_rate_hz = 50.0;

  std::int64_t frames() const { return hamer.rows(); }
};

struct Sample {
  FeatureBundle features;
  std::optional<TagSequence> labels;
  std::optional<GlossAnnotation> glosses;

  std::int64_t frames() const { return features.frames(); }
};

// Checks widths, matching row counts, finiteness, label length and codes,
// gloss/label consistency. Throws ValidationError naming the field.
void validate_sample(const Sample& s);

Sample load_sample(const std::filesystem::path& path);
void save_sample(const std::filesystem::path& path, const Sample& s);

}  // namespace signseg
