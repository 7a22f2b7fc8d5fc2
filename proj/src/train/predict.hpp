#pragma once

#include <optional>

#include "data/windows.hpp"
#include "model/checkpoint.hpp"

namespace signseg {

// Sliding-window inference at the original frame rate: per-window argmax
// on the half-rate grid, per-window expansion back to full rate, then
// overlaps resolved by keeping the window whose center is nearest each
// frame (ties to the earlier window).
TagSequence predict_tags(Network<float>& net,
                         const std::optional<NormStats>& norm,
                         const Sample& sample, std::int64_t window,
                         std::int64_t stride);

// Argmax decode of a logits block restricted to `valid` frames.
TagSequence decode_window_tags(const MatT<float>& logits, std::int64_t valid,
                               double frame_rate_hz);

}  // namespace signseg
