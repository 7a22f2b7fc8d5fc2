#include "model/labels.hpp"

namespace signseg {

namespace {

BioTag merge_pair(BioTag a, BioTag b) {
  if (a == BioTag::B || b == BioTag::B) return BioTag::B;
  if (a == BioTag::I || b == BioTag::I) return BioTag::I;
  return BioTag::O;
}

}  // namespace

TagSequence downsample_labels(const TagSequence& tags) {
  TagSequence out;
  out.frame_rate_hz = tags.frame_rate_hz / 2.0;
  const std::int64_t n = tags.size();
  out.tags.reserve(static_cast<std::size_t>((n + 1) / 2));
  for (std::int64_t t = 0; t < n; t += 2) {
    if (t + 1 < n) {
      out.tags.push_back(merge_pair(tags.tags[static_cast<std::size_t>(t)],
                                    tags.tags[static_cast<std::size_t>(t + 1)]));
    } else {
      out.tags.push_back(tags.tags[static_cast<std::size_t>(t)]);
    }
  }
  return out;
}

TagSequence downsample_labels(const TagSequence& tags,
                              const std::vector<std::uint8_t>& frame_mask,
                              std::vector<std::uint8_t>* mask_out) {
  TagSequence out;
  out.frame_rate_hz = tags.frame_rate_hz / 2.0;
  const std::int64_t n = tags.size();
  if (mask_out) mask_out->clear();
  for (std::int64_t t = 0; t < n; t += 2) {
    const bool a_real = frame_mask[static_cast<std::size_t>(t)] != 0;
    const bool b_real = t + 1 < n && frame_mask[static_cast<std::size_t>(t + 1)] != 0;
    BioTag merged = BioTag::O;
    if (a_real && b_real) {
      merged = merge_pair(tags.tags[static_cast<std::size_t>(t)],
                          tags.tags[static_cast<std::size_t>(t + 1)]);
    } else if (a_real) {
      merged = tags.tags[static_cast<std::size_t>(t)];
    } else if (b_real) {
      merged = tags.tags[static_cast<std::size_t>(t + 1)];
    }
    out.tags.push_back(merged);
    if (mask_out) mask_out->push_back(a_real || b_real ? 1 : 0);
  }
  return out;
}

std::vector<std::uint8_t> downsample_mask(
    const std::vector<std::uint8_t>& frame_mask) {
  std::vector<std::uint8_t> out;
  const std::size_t n = frame_mask.size();
  out.reserve((n + 1) / 2);
  for (std::size_t t = 0; t < n; t += 2) {
    const bool a = frame_mask[t] != 0;
    const bool b = t + 1 < n && frame_mask[t + 1] != 0;
    out.push_back(a || b ? 1 : 0);
  }
  return out;
}

TagSequence upsample_predictions(const TagSequence& half_rate,
                                 std::int64_t frames) {
  const std::int64_t expected = (frames + 1) / 2;
  if (half_rate.size() != expected) {
    throw ValidationError("upsample_predictions: got " +
                          std::to_string(half_rate.size()) +
                          " half-rate tags but " + std::to_string(frames) +
                          " frames need " + std::to_string(expected));
  }
  TagSequence out;
  out.frame_rate_hz = half_rate.frame_rate_hz * 2.0;
  out.tags.reserve(static_cast<std::size_t>(frames));
  for (std::int64_t i = 0; i < half_rate.size(); ++i) {
    const BioTag t = half_rate.tags[static_cast<std::size_t>(i)];
    out.tags.push_back(t);
    if (2 * i + 1 < frames) {
      out.tags.push_back(t == BioTag::B ? BioTag::I : t);
    }
  }
  return out;
}

}  // namespace signseg
