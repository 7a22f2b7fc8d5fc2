#pragma once

#include <vector>

#include "core/bio.hpp"

namespace signseg {

// Half-rate labels: each frame pair collapses with priority B > I > O so
// no sign onset is lost. Odd tails keep their single tag.
TagSequence downsample_labels(const TagSequence& tags);

// Variant that ignores padded frames inside a pair; also emits the
// half-rate mask (a half-rate frame is real if either source frame is).
TagSequence downsample_labels(const TagSequence& tags,
                              const std::vector<std::uint8_t>& frame_mask,
                              std::vector<std::uint8_t>* mask_out);

std::vector<std::uint8_t> downsample_mask(
    const std::vector<std::uint8_t>& frame_mask);

// Expands half-rate predictions back to `frames` tags. Every tag repeats
// for its two source frames except B, which expands to [B, I]: a sign
// begins exactly once.
TagSequence upsample_predictions(const TagSequence& half_rate,
                                 std::int64_t frames);

}  // namespace signseg
