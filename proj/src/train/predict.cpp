#include "train/predict.hpp"

#include <cmath>
#include <limits>

#include "model/labels.hpp"

namespace signseg {

TagSequence decode_window_tags(const MatT<float>& logits, std::int64_t valid,
                               double frame_rate_hz) {
  const std::int64_t rows = (valid + 1) / 2;
  TagSequence half;
  half.frame_rate_hz = frame_rate_hz / 2.0;
  half.tags.reserve(static_cast<std::size_t>(rows));
  for (std::int64_t r = 0; r < rows; ++r) {
    int best = 0;
    for (int k = 1; k < 3; ++k) {
      if (logits(r, k) > logits(r, best)) best = k;
    }
    half.tags.push_back(static_cast<BioTag>(best));
  }
  return upsample_predictions(half, valid);
}

TagSequence predict_tags(Network<float>& net,
                         const std::optional<NormStats>& norm,
                         const Sample& sample, std::int64_t window,
                         std::int64_t stride) {
  Sample local = sample;
  if (norm) {
    apply_normalization(*norm, local.features.hamer, local.features.angles);
  }
  const std::int64_t frames = local.frames();
  const std::vector<WindowedSample> windows =
      make_windows(local, window, stride);

  TagSequence out;
  out.frame_rate_hz = sample.features.frame_rate_hz;
  out.tags.assign(static_cast<std::size_t>(frames), BioTag::O);
  std::vector<double> best_dist(static_cast<std::size_t>(frames),
                                std::numeric_limits<double>::infinity());

  for (const WindowedSample& w : windows) {
    auto result = net.forward(w.hamer, w.angles, w.frame_mask,
                              /*training=*/false);
    const TagSequence tags = decode_window_tags(
        result.logits, w.valid, sample.features.frame_rate_hz);
    const double center =
        static_cast<double>(w.offset) + static_cast<double>(w.valid - 1) / 2.0;
    for (std::int64_t i = 0; i < w.valid; ++i) {
      const std::int64_t frame = w.offset + i;
      const double dist = std::abs(center - static_cast<double>(frame));
      if (dist < best_dist[static_cast<std::size_t>(frame)]) {
        best_dist[static_cast<std::size_t>(frame)] = dist;
        out.tags[static_cast<std::size_t>(frame)] =
            tags.tags[static_cast<std::size_t>(i)];
      }
    }
  }
  return out;
}

}  // namespace signseg
