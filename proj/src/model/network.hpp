#pragma once

#include <memory>
#include <optional>

#include "data/sample.hpp"
#include "model/labels.hpp"
#include "model/nn.hpp"
#include "util/rng.hpp"

namespace signseg {

// The trainable tagger: per-stream adapters (or frozen projections),
// factor-2 temporal downsampling, a multi-modal mixer, a transformer
// encoder with padding-aware self-attention, and a 3-class head emitting
// one logit row per half-rate frame.
template <class S>
class Network {
 public:
  struct Output {
    MatT<S> logits;                     // ceil(T/2) x 3
    std::vector<std::uint8_t> mask_ds;  // half-rate pad mask
  };

  Network(const ModelConfig& config, const ModulesConfig& modules,
          std::uint64_t init_seed)
      : config_(config), modules_(modules) {
    config_.validate();
    modules_.validate();
    if (modules_.mixer_mode == MixerMode::kCrossAttention &&
        (!modules_.use_mixer || modules_.stream_count() != 2)) {
      throw ConfigError(
          "model: cross-attention mixing needs use_mixer=true and both streams");
    }
    if (modules_.mixer_mode == MixerMode::kCrossAttention &&
        config_.adapter_out % config_.attention_heads != 0) {
      throw ConfigError(
          "model: cross-attention mixing needs adapter_out divisible by "
          "attention_heads");
    }

    std::mt19937_64 rng = make_engine(init_seed, "network.init");
    const int out = config_.adapter_out;
    const int concat = out * modules_.stream_count();
    const int d = config_.mixer_out;

    if (modules_.use_angles) {
      if (modules_.use_adapters) {
        angle_adapter_.emplace("adapter.angles", kAngleDim,
                               config_.adapter_hidden, out, true, rng);
      } else {
        angle_proj_.emplace("proj.angles", kAngleDim, out, false, false, rng);
      }
      angle_ds_ = nn::PairDownsample<S>(config_.downsample);
    }
    if (modules_.use_hamer) {
      if (modules_.use_adapters) {
        hamer_adapter_.emplace("adapter.hamer", kHamerDim,
                               config_.adapter_hidden, out, true, rng);
      } else {
        hamer_proj_.emplace("proj.hamer", kHamerDim, out, false, false, rng);
      }
      hamer_ds_ = nn::PairDownsample<S>(config_.downsample);
    }

    if (modules_.use_mixer) {
      if (modules_.mixer_mode == MixerMode::kMlp) {
        mixer_.emplace("mixer", concat, d, d, false, rng);
      } else {
        xattn_a2h_.emplace("mixer.xattn.a2h", out, config_.attention_heads, rng);
        xattn_h2a_.emplace("mixer.xattn.h2a", out, config_.attention_heads, rng);
        xattn_ln_a_ = nn::LayerNorm<S>("mixer.xattn.ln_a", out);
        xattn_ln_h_ = nn::LayerNorm<S>("mixer.xattn.ln_h", out);
        xattn_out_.emplace("mixer.xattn.out", concat, d, true, true, rng);
      }
    } else {
      mixer_proj_.emplace("proj.mixer", concat, d, false, false, rng);
    }

    const std::int64_t max_ds = (config_.max_window + 1) / 2;
    if (config_.positional_encoding == PositionalEncodingKind::kSinusoidal) {
      sin_pe_.resize(max_ds, d);
      for (std::int64_t pos = 0; pos < max_ds; ++pos) {
        for (int i = 0; i < d; ++i) {
          const double angle =
              static_cast<double>(pos) /
              std::pow(10000.0, 2.0 * (i / 2) / static_cast<double>(d));
          sin_pe_(pos, i) = static_cast<S>((i % 2 == 0) ? std::sin(angle)
                                                        : std::cos(angle));
        }
      }
    } else {
      learned_pe_.name = "pe.table";
      learned_pe_.init_zero(max_ds, d);
      std::normal_distribution<double> g(0.0, 0.02);
      for (std::int64_t r = 0; r < max_ds; ++r) {
        for (int c = 0; c < d; ++c) learned_pe_.value(r, c) = static_cast<S>(g(rng));
      }
    }
    pe_drop_ = nn::Dropout<S>(config_.dropout);

    encoder_.reserve(static_cast<std::size_t>(config_.encoder_layers));
    for (int l = 0; l < config_.encoder_layers; ++l) {
      encoder_.emplace_back("enc" + std::to_string(l), d,
                            config_.attention_heads, config_.feedforward_width,
                            config_.dropout, rng);
    }
    head_.emplace("head", d, 3, true, true, rng);
  }

  // `frame_mask` marks real frames (mask[i] != 0). Deterministic whenever
  // training=false or dropout is 0; `dropout_seed` pins the masks otherwise.
  Output forward(const MatF& hamer, const MatF& angles,
                 const std::vector<std::uint8_t>& frame_mask, bool training,
                 std::uint64_t dropout_seed = 0) {
    const std::int64_t t = modules_.use_hamer ? hamer.rows() : angles.rows();
    if (modules_.use_hamer && modules_.use_angles &&
        hamer.rows() != angles.rows()) {
      throw ValidationError("forward: hamer and angles row counts differ");
    }
    if (t > config_.max_window) {
      throw ValidationError("forward: " + std::to_string(t) +
                            " frames exceed max_window " +
                            std::to_string(config_.max_window));
    }
    if (static_cast<std::int64_t>(frame_mask.size()) != t) {
      throw ValidationError("forward: frame mask length mismatch");
    }
    std::mt19937_64 drop_rng(dropout_seed);

    std::vector<MatT<S>> streams;
    if (modules_.use_angles) {
      if (angles.cols() != kAngleDim) {
        throw ValidationError("forward: angles must have " +
                              std::to_string(kAngleDim) + " columns, got " +
                              std::to_string(angles.cols()));
      }
      MatT<S> x = angles.template cast<S>();
      x = angle_adapter_ ? angle_adapter_->forward(x) : angle_proj_->forward(x);
      streams.push_back(angle_ds_->forward(x, frame_mask));
    }
    if (modules_.use_hamer) {
      if (hamer.cols() != kHamerDim) {
        throw ValidationError("forward: hamer must have " +
                              std::to_string(kHamerDim) + " columns, got " +
                              std::to_string(hamer.cols()));
      }
      MatT<S> x = hamer.template cast<S>();
      x = hamer_adapter_ ? hamer_adapter_->forward(x) : hamer_proj_->forward(x);
      streams.push_back(hamer_ds_->forward(x, frame_mask));
    }

    Output out;
    out.mask_ds = downsample_mask(frame_mask);
    const std::int64_t t_ds = (t + 1) / 2;

    MatT<S> mixed;
    if (modules_.use_mixer && modules_.mixer_mode == MixerMode::kCrossAttention) {
      // streams[0]=angles, streams[1]=hamer when both are present
      MatT<S> a = xattn_ln_a_.forward(streams[0] +
                                      xattn_a2h_->forward(streams[0], streams[1], out.mask_ds));
      MatT<S> h = xattn_ln_h_.forward(streams[1] +
                                      xattn_h2a_->forward(streams[1], streams[0], out.mask_ds));
      MatT<S> cat(t_ds, a.cols() + h.cols());
      cat << a, h;
      mixed = xattn_out_->forward(cat);
    } else {
      MatT<S> cat;
      if (streams.size() == 1) {
        cat = std::move(streams[0]);
      } else {
        cat.resize(t_ds, streams[0].cols() + streams[1].cols());
        cat << streams[0], streams[1];
      }
      mixed = mixer_ ? mixer_->forward(cat) : mixer_proj_->forward(cat);
    }

    if (config_.positional_encoding == PositionalEncodingKind::kSinusoidal) {
      mixed += sin_pe_.topRows(t_ds);
    } else {
      mixed += learned_pe_.value.topRows(t_ds);
      pe_rows_ = t_ds;
    }
    mixed = pe_drop_.forward(mixed, training, drop_rng);

    for (auto& layer : encoder_) {
      mixed = layer.forward(mixed, out.mask_ds, training, drop_rng);
    }
    out.logits = head_->forward(mixed);
    return out;
  }

  // Accumulates parameter gradients for the preceding forward call.
  void backward(const MatT<S>& dlogits) {
    MatT<S> d = head_->backward(dlogits);
    for (auto it = encoder_.rbegin(); it != encoder_.rend(); ++it) {
      d = it->backward(d);
    }
    d = pe_drop_.backward(d);
    if (config_.positional_encoding == PositionalEncodingKind::kLearned) {
      learned_pe_.grad.topRows(pe_rows_) += d;
    }

    std::vector<MatT<S>> dstreams(2);
    if (modules_.use_mixer && modules_.mixer_mode == MixerMode::kCrossAttention) {
      MatT<S> dcat = xattn_out_->backward(d);
      const std::int64_t w = dcat.cols() / 2;
      MatT<S> da = xattn_ln_a_.backward(dcat.leftCols(w));
      MatT<S> dh = xattn_ln_h_.backward(dcat.rightCols(w));
      MatT<S> dq, dkv;
      dstreams[0] = da;
      dstreams[1] = dh;
      xattn_a2h_->backward(da, dq, dkv);
      dstreams[0] += dq;
      dstreams[1] += dkv;
      xattn_h2a_->backward(dh, dq, dkv);
      dstreams[1] += dq;
      dstreams[0] += dkv;
    } else {
      MatT<S> dcat = mixer_ ? mixer_->backward(d) : mixer_proj_->backward(d);
      if (modules_.stream_count() == 1) {
        dstreams[0] = std::move(dcat);
      } else {
        const std::int64_t w = dcat.cols() / 2;
        dstreams[0] = dcat.leftCols(w);
        dstreams[1] = dcat.rightCols(w);
      }
    }

    int idx = 0;
    if (modules_.use_angles) {
      MatT<S> dx = angle_ds_->backward(dstreams[static_cast<std::size_t>(idx++)]);
      if (angle_adapter_) {
        angle_adapter_->backward(dx);
      } else {
        angle_proj_->backward(dx);
      }
    }
    if (modules_.use_hamer) {
      MatT<S> dx = hamer_ds_->backward(dstreams[static_cast<std::size_t>(idx++)]);
      if (hamer_adapter_) {
        hamer_adapter_->backward(dx);
      } else {
        hamer_proj_->backward(dx);
      }
    }
  }

  std::vector<nn::Param<S>*> parameters() {
    std::vector<nn::Param<S>*> out;
    if (angle_adapter_) angle_adapter_->collect(out);
    if (angle_proj_) angle_proj_->collect(out);
    if (hamer_adapter_) hamer_adapter_->collect(out);
    if (hamer_proj_) hamer_proj_->collect(out);
    if (mixer_) mixer_->collect(out);
    if (xattn_a2h_) {
      xattn_a2h_->collect(out);
      xattn_h2a_->collect(out);
      xattn_ln_a_.collect(out);
      xattn_ln_h_.collect(out);
      xattn_out_->collect(out);
    }
    if (mixer_proj_) mixer_proj_->collect(out);
    if (config_.positional_encoding == PositionalEncodingKind::kLearned) {
      out.push_back(&learned_pe_);
    }
    for (auto& layer : encoder_) layer.collect(out);
    head_->collect(out);
    return out;
  }

  void zero_grads() {
    for (nn::Param<S>* p : parameters()) p->zero_grad();
  }

  // Copies parameter values (not grads) from another instance.
  void copy_values_from(Network<S>& other) {
    auto dst = parameters();
    auto src = other.parameters();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i]->value = src[i]->value;
  }

  const ModelConfig& config() const { return config_; }
  const ModulesConfig& modules() const { return modules_; }

 private:
  ModelConfig config_;
  ModulesConfig modules_;

  std::optional<nn::Mlp3<S>> angle_adapter_, hamer_adapter_;
  std::optional<nn::Linear<S>> angle_proj_, hamer_proj_;
  std::optional<nn::PairDownsample<S>> angle_ds_, hamer_ds_;
  std::optional<nn::Mlp3<S>> mixer_;
  std::optional<nn::Linear<S>> mixer_proj_;
  std::optional<nn::MultiHeadAttention<S>> xattn_a2h_, xattn_h2a_;
  nn::LayerNorm<S> xattn_ln_a_, xattn_ln_h_;
  std::optional<nn::Linear<S>> xattn_out_;
  MatT<S> sin_pe_;
  nn::Param<S> learned_pe_;
  std::int64_t pe_rows_ = 0;
  nn::Dropout<S> pe_drop_;
  std::vector<nn::EncoderLayer<S>> encoder_;
  std::optional<nn::Linear<S>> head_;
};

}  // namespace signseg
