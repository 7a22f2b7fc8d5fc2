#include "data/windows.hpp"

#include <algorithm>

namespace signseg {

namespace {

std::int64_t force_even(std::int64_t w) { return (w % 2 != 0) ? w + 1 : w; }

void check_params(std::int64_t window, std::int64_t stride) {
  if (window < 2) {
    throw ValidationError("make_windows: window must be >= 2, got " +
                          std::to_string(window));
  }
  if (stride < 1 || stride > window) {
    throw ValidationError("make_windows: stride must be in [1, window], got " +
                          std::to_string(stride));
  }
}

}  // namespace

std::vector<std::int64_t> window_offsets(std::int64_t frames,
                                         std::int64_t window,
                                         std::int64_t stride) {
  check_params(window, stride);
  window = force_even(window);
  std::vector<std::int64_t> offsets;
  if (frames <= window) {
    offsets.push_back(0);
    return offsets;
  }
  for (std::int64_t o = 0;; o += stride) {
    if (o + window >= frames) {
      offsets.push_back(frames - window);
      break;
    }
    offsets.push_back(o);
  }
  return offsets;
}

std::vector<WindowedSample> make_windows(const Sample& sample,
                                         std::int64_t window,
                                         std::int64_t stride) {
  check_params(window, stride);
  window = force_even(window);
  const std::int64_t frames = sample.frames();
  const std::vector<std::int64_t> offsets =
      window_offsets(std::max<std::int64_t>(frames, 1), window, stride);

  std::vector<WindowedSample> out;
  out.reserve(offsets.size());
  for (std::int64_t offset : offsets) {
    WindowedSample w;
    w.offset = offset;
    w.valid = std::min(window, frames - offset);
    w.padded = w.valid < window;

    w.hamer = MatF::Zero(window, kHamerDim);
    w.angles = MatF::Zero(window, kAngleDim);
    if (w.valid > 0) {
      w.hamer.topRows(w.valid) = sample.features.hamer.middleRows(offset, w.valid);
      w.angles.topRows(w.valid) = sample.features.angles.middleRows(offset, w.valid);
    }

    w.frame_mask.assign(static_cast<std::size_t>(window), 0);
    std::fill(w.frame_mask.begin(),
              w.frame_mask.begin() + static_cast<std::ptrdiff_t>(std::max<std::int64_t>(w.valid, 0)),
              std::uint8_t{1});

    if (sample.labels) {
      TagSequence t;
      t.frame_rate_hz = sample.labels->frame_rate_hz;
      t.tags.assign(static_cast<std::size_t>(window), BioTag::O);
      for (std::int64_t i = 0; i < w.valid; ++i) {
        t.tags[static_cast<std::size_t>(i)] =
            sample.labels->tags[static_cast<std::size_t>(offset + i)];
      }
      w.labels = std::move(t);
    }

    if (sample.glosses) {
      const std::int64_t lo = offset;
      const std::int64_t hi = offset + w.valid - 1;
      for (const Segment& s : sample.glosses->segments) {
        if (s.end < lo || s.start > hi) continue;
        w.gloss_segments.push_back(
            {std::max(s.start, lo) - offset, std::min(s.end, hi) - offset});
      }
    }

    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace signseg
