#pragma once

#include <cstdint>
#include <vector>

#include "data/sample.hpp"

namespace signseg {

// Stand-in corpus: each sample alternates hands-down pauses with signs.
// During a sign, hand-shape rows sit near one of `num_prototypes`
// identity prototypes and angle rows near a shared hands-raised
// prototype; pauses sit near hands-down prototypes. `separation` scales
// the prototype magnitudes, `noise_sigma` the per-entry Gaussian noise,
// so separation / noise controls task difficulty.
struct SynthConfig {
  int num_samples = 250;
  std::int64_t frames_min = 300;
  std::int64_t frames_max = 300;
  std::int64_t sign_frames_min = 8;
  std::int64_t sign_frames_max = 20;
  std::int64_t pause_frames_min = 2;
  std::int64_t pause_frames_max = 6;
  int num_prototypes = 12;
  double noise_sigma = 0.25;
  double separation = 1.0;
  double frame_rate_hz = 50.0;
  // Spans are drawn with even lengths so every sign starts on an even
  // frame and ends on an odd one. The model predicts on a half-rate grid
  // and expands back by a fixed rule, so odd boundaries are not
  // representable at the original rate; aligned data keeps frame scores
  // a measure of learning rather than grid aliasing. Turn off to study
  // exactly that aliasing.
  bool even_alignment = true;

  void validate() const;
};

struct SynthPrototypes {
  std::vector<VecF> hamer_sign;  // one per prototype id
  VecF hamer_down;
  VecF angles_raised;
  VecF angles_down;
};

// Prototypes are a pure function of (config, seed).
SynthPrototypes make_prototypes(const SynthConfig& config, std::uint64_t seed);

std::vector<Sample> generate_synthetic(const SynthConfig& config,
                                       std::uint64_t seed);

}  // namespace signseg
