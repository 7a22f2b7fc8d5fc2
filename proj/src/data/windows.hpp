#pragma once

#include <vector>

#include "data/sample.hpp"

namespace signseg {

// A fixed-length slice of a sample. Slices always have `window` rows;
// when the source runs out (only possible for the single window of a
// short sample) the tail is zero-padded and masked off.
struct WindowedSample {
  std::int64_t offset = 0;  // first source frame
  std::int64_t valid = 0;   // unpadded frame count
  bool padded = false;

  MatF hamer;                            // window x 288
  MatF angles;                           // window x 104
  std::vector<std::uint8_t> frame_mask;  // 1 = real frame, 0 = padding
  std::optional<TagSequence> labels;     // padded positions hold O
  std::vector<Segment> gloss_segments;   // clipped, window-local coords

  std::int64_t window() const { return hamer.rows(); }
};

// Covers every frame; interior windows step by `stride`, the last window
// is right-aligned to the sequence end. An odd `window` is bumped to the
// next even value so a window always downsamples cleanly by 2.
std::vector<WindowedSample> make_windows(const Sample& sample,
                                         std::int64_t window,
                                         std::int64_t stride);

// Window start offsets only (shared by make_windows and stitching).
std::vector<std::int64_t> window_offsets(std::int64_t frames,
                                         std::int64_t window,
                                         std::int64_t stride);

}  // namespace signseg
