#include "data/synth.hpp"

#include <algorithm>
#include <random>

#include "util/rng.hpp"

namespace signseg {

namespace {

VecF random_prototype(int dim, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-scale, scale);
  VecF v(dim);
  for (int i = 0; i < dim; ++i) v[i] = static_cast<float>(u(rng));
  return v;
}

// Draws a span length from [lo, hi], restricted to even values when
// requested (the range is shrunk inward; validate() guarantees it stays
// nonempty).
std::int64_t draw_len(std::int64_t lo, std::int64_t hi, bool even,
                      std::mt19937_64& rng) {
  if (!even) {
    std::uniform_int_distribution<std::int64_t> d(lo, hi);
    return d(rng);
  }
  const std::int64_t elo = (lo + 1) / 2;
  const std::int64_t ehi = hi / 2;
  std::uniform_int_distribution<std::int64_t> d(elo, ehi);
  return 2 * d(rng);
}

}  // namespace

void SynthConfig::validate() const {
  if (num_samples < 1) throw ConfigError("synth: num_samples must be >= 1");
  if (frames_min < 1 || frames_max < frames_min) {
    throw ConfigError("synth: invalid frames range");
  }
  if (sign_frames_min < 1 || sign_frames_max < sign_frames_min) {
    throw ConfigError("synth: invalid sign length range");
  }
  if (pause_frames_min < 1 || pause_frames_max < pause_frames_min) {
    throw ConfigError("synth: invalid pause length range");
  }
  if (sign_frames_min > frames_min) {
    throw ConfigError("synth: minimum sign length " +
                      std::to_string(sign_frames_min) +
                      " exceeds minimum sequence length " +
                      std::to_string(frames_min));
  }
  if (num_prototypes < 1) throw ConfigError("synth: num_prototypes must be >= 1");
  if (noise_sigma < 0.0) throw ConfigError("synth: noise_sigma must be >= 0");
  if (!(separation > 0.0)) throw ConfigError("synth: separation must be > 0");
  if (!(frame_rate_hz > 0.0)) throw ConfigError("synth: frame_rate_hz must be > 0");
  if (even_alignment) {
    if (sign_frames_max / 2 < (sign_frames_min + 1) / 2 ||
        pause_frames_max / 2 < (pause_frames_min + 1) / 2) {
      throw ConfigError("synth: even alignment leaves an empty length range");
    }
  }
}

SynthPrototypes make_prototypes(const SynthConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng = make_engine(seed, "synth.prototypes");
  const double scale = config.separation / 2.0;
  SynthPrototypes p;
  p.hamer_sign.reserve(static_cast<std::size_t>(config.num_prototypes));
  for (int k = 0; k < config.num_prototypes; ++k) {
    p.hamer_sign.push_back(random_prototype(kHamerDim, scale, rng));
  }
  p.hamer_down = random_prototype(kHamerDim, scale, rng);
  p.angles_raised = random_prototype(kAngleDim, scale, rng);
  p.angles_down = random_prototype(kAngleDim, scale, rng);
  return p;
}

std::vector<Sample> generate_synthetic(const SynthConfig& config,
                                       std::uint64_t seed) {
  config.validate();
  const SynthPrototypes protos = make_prototypes(config, seed);

  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(config.num_samples));

  for (int idx = 0; idx < config.num_samples; ++idx) {
    std::mt19937_64 rng =
        make_engine(seed, "synth.sample", static_cast<std::uint64_t>(idx));
    std::uniform_int_distribution<std::int64_t> t_dist(config.frames_min,
                                                       config.frames_max);
    std::int64_t frames = t_dist(rng);
    if (config.even_alignment && frames % 2 != 0) frames += 1;

    Sample s;
    s.features.sample_id = "synth-" + std::to_string(idx);
    s.features.frame_rate_hz = config.frame_rate_hz;
    s.features.hamer.resize(frames, kHamerDim);
    s.features.angles.resize(frames, kAngleDim);

    TagSequence labels;
    labels.frame_rate_hz = config.frame_rate_hz;
    labels.tags.assign(static_cast<std::size_t>(frames), BioTag::O);
    GlossAnnotation glosses;

    std::uniform_int_distribution<int> proto_dist(0, config.num_prototypes - 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double sigma = config.noise_sigma;
    auto noise = [&]() { return sigma > 0.0 ? sigma * gauss(rng) : 0.0; };

    // Layout pass: alternate pause / sign spans until the sequence is full.
    std::int64_t t = 0;
    bool pause_phase = true;
    struct Span {
      std::int64_t start, len;
      bool sign;
      int proto;
    };
    std::vector<Span> spans;
    while (t < frames) {
      std::int64_t len =
          pause_phase
              ? draw_len(config.pause_frames_min, config.pause_frames_max,
                         config.even_alignment, rng)
              : draw_len(config.sign_frames_min, config.sign_frames_max,
                         config.even_alignment, rng);
      len = std::min(len, frames - t);
      const int proto = pause_phase ? -1 : proto_dist(rng);
      spans.push_back({t, len, !pause_phase, proto});
      t += len;
      pause_phase = !pause_phase;
    }

    for (const Span& span : spans) {
      if (span.sign) {
        labels.tags[static_cast<std::size_t>(span.start)] = BioTag::B;
        for (std::int64_t i = 1; i < span.len; ++i) {
          labels.tags[static_cast<std::size_t>(span.start + i)] = BioTag::I;
        }
        glosses.segments.push_back({span.start, span.start + span.len - 1});
        glosses.gloss_ids.push_back("g" + std::to_string(span.proto));
      }
      const VecF& hamer_proto =
          span.sign ? protos.hamer_sign[static_cast<std::size_t>(span.proto)]
                    : protos.hamer_down;
      const VecF& angle_proto =
          span.sign ? protos.angles_raised : protos.angles_down;
      for (std::int64_t i = 0; i < span.len; ++i) {
        const std::int64_t row = span.start + i;
        for (int d = 0; d < kHamerDim; ++d) {
          s.features.hamer(row, d) = hamer_proto[d] + static_cast<float>(noise());
        }
        for (int d = 0; d < kAngleDim; ++d) {
          s.features.angles(row, d) = angle_proto[d] + static_cast<float>(noise());
        }
      }
    }

    s.labels = std::move(labels);
    s.glosses = std::move(glosses);
    validate_sample(s);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace signseg
