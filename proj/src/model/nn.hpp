#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "model/config.hpp"
#include "util/error.hpp"
#include "util/mat.hpp"

// Small layer zoo with explicit forward caches and hand-written
// backward passes. Layers are single-writer: one forward, then one
// backward on the same instance. Gradients accumulate across calls
// until zero_grad().

namespace signseg::nn {

template <class S>
struct Param {
  std::string name;
  MatT<S> value;
  MatT<S> grad;
  bool trainable = true;

  void init_zero(std::int64_t rows, std::int64_t cols) {
    value = MatT<S>::Zero(rows, cols);
    grad = MatT<S>::Zero(rows, cols);
  }
  void zero_grad() { grad.setZero(); }
};

// Xavier-uniform fill; the usual default for affine layers.
template <class S>
void xavier_init(MatT<S>& m, std::int64_t fan_in, std::int64_t fan_out,
                 std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (std::int64_t r = 0; r < m.rows(); ++r) {
    for (std::int64_t c = 0; c < m.cols(); ++c) {
      m(r, c) = static_cast<S>(u(rng));
    }
  }
}

template <class S>
class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, int in, int out, bool trainable,
         bool has_bias, std::mt19937_64& rng)
      : has_bias_(has_bias) {
    w_.name = name + ".w";
    w_.init_zero(out, in);
    xavier_init(w_.value, in, out, rng);
    w_.trainable = trainable;
    if (has_bias_) {
      b_.name = name + ".b";
      b_.init_zero(1, out);
      b_.trainable = trainable;
    }
  }

  MatT<S> forward(const MatT<S>& x) {
    x_ = x;
    MatT<S> y = x * w_.value.transpose();
    if (has_bias_) y.rowwise() += b_.value.row(0);
    return y;
  }

  MatT<S> backward(const MatT<S>& dy) {
    w_.grad.noalias() += dy.transpose() * x_;
    if (has_bias_) b_.grad.row(0) += dy.colwise().sum();
    return dy * w_.value;
  }

  void collect(std::vector<Param<S>*>& out) {
    out.push_back(&w_);
    if (has_bias_) out.push_back(&b_);
  }

  Param<S> w_, b_;
  bool has_bias_ = true;

 private:
  MatT<S> x_;
};

// Exact GELU (erf form). Zero-preserving and smooth.
template <class S>
class Gelu {
 public:
  MatT<S> forward(const MatT<S>& x) {
    x_ = x;
    return x.unaryExpr([](S v) {
      return static_cast<S>(0.5 * static_cast<double>(v) *
                            (1.0 + std::erf(static_cast<double>(v) * M_SQRT1_2)));
    });
  }

  MatT<S> backward(const MatT<S>& dy) {
    constexpr double kInvSqrt2Pi = 0.3989422804014327;
    MatT<S> dx = x_.unaryExpr([](S v) {
      const double x = static_cast<double>(v);
      const double cdf = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
      const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
      return static_cast<S>(cdf + x * pdf);
    });
    return dx.cwiseProduct(dy);
  }

 private:
  MatT<S> x_;
};

template <class S>
class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(const std::string& name, int dim) {
    gamma_.name = name + ".gamma";
    gamma_.init_zero(1, dim);
    gamma_.value.setOnes();
    beta_.name = name + ".beta";
    beta_.init_zero(1, dim);
  }

  MatT<S> forward(const MatT<S>& x) {
    const std::int64_t rows = x.rows();
    const std::int64_t dim = x.cols();
    xhat_.resize(rows, dim);
    inv_std_.resize(rows);
    for (std::int64_t r = 0; r < rows; ++r) {
      const S mean = x.row(r).mean();
      const S var = (x.row(r).array() - mean).square().sum() / static_cast<S>(dim);
      const S inv = S(1) / std::sqrt(var + kEps);
      inv_std_[r] = inv;
      xhat_.row(r) = (x.row(r).array() - mean) * inv;
    }
    MatT<S> y = xhat_;
    y.array().rowwise() *= gamma_.value.row(0).array();
    y.rowwise() += beta_.value.row(0);
    return y;
  }

  MatT<S> backward(const MatT<S>& dy) {
    const std::int64_t rows = dy.rows();
    const std::int64_t dim = dy.cols();
    gamma_.grad.row(0) += dy.cwiseProduct(xhat_).colwise().sum();
    beta_.grad.row(0) += dy.colwise().sum();
    MatT<S> dx(rows, dim);
    for (std::int64_t r = 0; r < rows; ++r) {
      // dxhat = dy * gamma; standard layer-norm backward per row.
      Eigen::Array<S, 1, Eigen::Dynamic> dxhat =
          dy.row(r).array() * gamma_.value.row(0).array();
      const S m1 = dxhat.mean();
      const S m2 = (dxhat * xhat_.row(r).array()).mean();
      dx.row(r) =
          ((dxhat - m1 - xhat_.row(r).array() * m2) * inv_std_[r]).matrix();
    }
    return dx;
  }

  void collect(std::vector<Param<S>*>& out) {
    out.push_back(&gamma_);
    out.push_back(&beta_);
  }

  Param<S> gamma_, beta_;

 private:
  static constexpr S kEps = static_cast<S>(1e-5);
  MatT<S> xhat_;
  VecT<S> inv_std_;
};

// Inverted dropout; pass-through outside training.
template <class S>
class Dropout {
 public:
  Dropout() = default;
  explicit Dropout(double p) : p_(p) {}

  MatT<S> forward(const MatT<S>& x, bool training, std::mt19937_64& rng) {
    if (!training || p_ <= 0.0) {
      active_ = false;
      return x;
    }
    active_ = true;
    const S keep_inv = static_cast<S>(1.0 / (1.0 - p_));
    std::bernoulli_distribution keep(1.0 - p_);
    mask_.resize(x.rows(), x.cols());
    for (std::int64_t r = 0; r < x.rows(); ++r) {
      for (std::int64_t c = 0; c < x.cols(); ++c) {
        mask_(r, c) = keep(rng) ? keep_inv : S(0);
      }
    }
    return x.cwiseProduct(mask_);
  }

  MatT<S> backward(const MatT<S>& dy) {
    return active_ ? dy.cwiseProduct(mask_).eval() : dy;
  }

 private:
  double p_ = 0.0;
  bool active_ = false;
  MatT<S> mask_;
};

// Three affine layers applied rowwise. Adapters activate after every
// layer, the mixer keeps a linear output layer.
template <class S>
class Mlp3 {
 public:
  Mlp3() = default;
  Mlp3(const std::string& name, int in, int hidden, int out, bool final_act,
       std::mt19937_64& rng)
      : fc1_(name + ".fc1", in, hidden, true, true, rng),
        fc2_(name + ".fc2", hidden, hidden, true, true, rng),
        fc3_(name + ".fc3", hidden, out, true, true, rng),
        final_act_(final_act) {}

  MatT<S> forward(const MatT<S>& x) {
    MatT<S> h = act1_.forward(fc1_.forward(x));
    h = act2_.forward(fc2_.forward(h));
    h = fc3_.forward(h);
    if (final_act_) h = act3_.forward(h);
    return h;
  }

  MatT<S> backward(const MatT<S>& dy) {
    MatT<S> d = dy;
    if (final_act_) d = act3_.backward(d);
    d = fc3_.backward(d);
    d = fc2_.backward(act2_.backward(d));
    d = fc1_.backward(act1_.backward(d));
    return d;
  }

  void collect(std::vector<Param<S>*>& out) {
    fc1_.collect(out);
    fc2_.collect(out);
    fc3_.collect(out);
  }

 private:
  Linear<S> fc1_, fc2_, fc3_;
  Gelu<S> act1_, act2_, act3_;
  bool final_act_ = true;
};

// Scaled dot-product multi-head attention. Padded keys are excluded by
// forcing their scores to -inf before the softmax; query rows are left
// alone (padded outputs are masked out downstream).
template <class S>
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(const std::string& name, int dim, int heads,
                     std::mt19937_64& rng)
      : wq_(name + ".wq", dim, dim, true, true, rng),
        wk_(name + ".wk", dim, dim, true, true, rng),
        wv_(name + ".wv", dim, dim, true, true, rng),
        wo_(name + ".wo", dim, dim, true, true, rng),
        dim_(dim),
        heads_(heads),
        head_dim_(dim / heads) {}

  MatT<S> forward(const MatT<S>& q_in, const MatT<S>& kv_in,
                  const std::vector<std::uint8_t>& key_mask) {
    q_ = wq_.forward(q_in);
    k_ = wk_.forward(kv_in);
    v_ = wv_.forward(kv_in);
    const std::int64_t tq = q_.rows();
    const std::int64_t tk = k_.rows();
    const S scale = static_cast<S>(1.0 / std::sqrt(static_cast<double>(head_dim_)));
    attn_.assign(static_cast<std::size_t>(heads_), MatT<S>());
    MatT<S> ctx(tq, dim_);
    for (int h = 0; h < heads_; ++h) {
      const auto qh = q_.middleCols(h * head_dim_, head_dim_);
      const auto kh = k_.middleCols(h * head_dim_, head_dim_);
      const auto vh = v_.middleCols(h * head_dim_, head_dim_);
      MatT<S> scores = (qh * kh.transpose()) * scale;
      for (std::int64_t j = 0; j < tk; ++j) {
        if (!key_mask[static_cast<std::size_t>(j)]) {
          scores.col(j).setConstant(-std::numeric_limits<S>::infinity());
        }
      }
      MatT<S>& a = attn_[static_cast<std::size_t>(h)];
      a.resize(tq, tk);
      for (std::int64_t r = 0; r < tq; ++r) {
        const S m = scores.row(r).maxCoeff();
        Eigen::Array<S, 1, Eigen::Dynamic> e = (scores.row(r).array() - m).exp();
        a.row(r) = (e / e.sum()).matrix();
      }
      ctx.middleCols(h * head_dim_, head_dim_).noalias() = a * vh;
    }
    return wo_.forward(ctx);
  }

  // Returns (d q_in, d kv_in); for self-attention the caller adds both.
  void backward(const MatT<S>& dy, MatT<S>& dq_in, MatT<S>& dkv_in) {
    MatT<S> dctx = wo_.backward(dy);
    const S scale = static_cast<S>(1.0 / std::sqrt(static_cast<double>(head_dim_)));
    MatT<S> dq(q_.rows(), dim_), dk(k_.rows(), dim_), dv(v_.rows(), dim_);
    for (int h = 0; h < heads_; ++h) {
      const auto vh = v_.middleCols(h * head_dim_, head_dim_);
      const auto qh = q_.middleCols(h * head_dim_, head_dim_);
      const auto kh = k_.middleCols(h * head_dim_, head_dim_);
      const MatT<S>& a = attn_[static_cast<std::size_t>(h)];
      const auto dctx_h = dctx.middleCols(h * head_dim_, head_dim_);
      MatT<S> da = dctx_h * vh.transpose();
      dv.middleCols(h * head_dim_, head_dim_).noalias() = a.transpose() * dctx_h;
      // softmax backward, rowwise: ds = a .* (da - rowsum(da .* a))
      MatT<S> ds(a.rows(), a.cols());
      for (std::int64_t r = 0; r < a.rows(); ++r) {
        const S dot = a.row(r).dot(da.row(r));
        ds.row(r) = (a.row(r).array() * (da.row(r).array() - dot)).matrix();
      }
      dq.middleCols(h * head_dim_, head_dim_).noalias() = (ds * kh) * scale;
      dk.middleCols(h * head_dim_, head_dim_).noalias() =
          (ds.transpose() * qh) * scale;
    }
    dq_in = wq_.backward(dq);
    dkv_in = wk_.backward(dk) + wv_.backward(dv);
  }

  void collect(std::vector<Param<S>*>& out) {
    wq_.collect(out);
    wk_.collect(out);
    wv_.collect(out);
    wo_.collect(out);
  }

 private:
  Linear<S> wq_, wk_, wv_, wo_;
  int dim_ = 0, heads_ = 0, head_dim_ = 0;
  MatT<S> q_, k_, v_;
  std::vector<MatT<S>> attn_;
};

// Post-norm transformer encoder layer.
template <class S>
class EncoderLayer {
 public:
  EncoderLayer() = default;
  EncoderLayer(const std::string& name, int dim, int heads, int ffn,
               double dropout, std::mt19937_64& rng)
      : attn_(name + ".attn", dim, heads, rng),
        ln1_(name + ".ln1", dim),
        ln2_(name + ".ln2", dim),
        ff1_(name + ".ff1", dim, ffn, true, true, rng),
        ff2_(name + ".ff2", ffn, dim, true, true, rng),
        drop1_(dropout),
        drop2_(dropout) {}

  MatT<S> forward(const MatT<S>& x, const std::vector<std::uint8_t>& mask,
                  bool training, std::mt19937_64& rng) {
    MatT<S> a = drop1_.forward(attn_.forward(x, x, mask), training, rng);
    MatT<S> h = ln1_.forward(x + a);
    MatT<S> f = drop2_.forward(ff2_.forward(ff_act_.forward(ff1_.forward(h))),
                               training, rng);
    return ln2_.forward(h + f);
  }

  MatT<S> backward(const MatT<S>& dy) {
    MatT<S> dh = ln2_.backward(dy);
    MatT<S> df = drop2_.backward(dh);
    dh += ff1_.backward(ff_act_.backward(ff2_.backward(df)));
    MatT<S> dx = ln1_.backward(dh);
    MatT<S> da = drop1_.backward(dx);
    MatT<S> dq, dkv;
    attn_.backward(da, dq, dkv);
    return dx + dq + dkv;
  }

  void collect(std::vector<Param<S>*>& out) {
    attn_.collect(out);
    ln1_.collect(out);
    ff1_.collect(out);
    ff2_.collect(out);
    ln2_.collect(out);
  }

 private:
  MultiHeadAttention<S> attn_;
  LayerNorm<S> ln1_, ln2_;
  Linear<S> ff1_, ff2_;
  Gelu<S> ff_act_;
  Dropout<S> drop1_, drop2_;
};

// Factor-2 temporal reduction. Averaging uses only real frames of each
// pair; strided selection keeps the first frame.
template <class S>
class PairDownsample {
 public:
  PairDownsample() = default;
  explicit PairDownsample(DownsampleMode mode) : mode_(mode) {}

  MatT<S> forward(const MatT<S>& x, const std::vector<std::uint8_t>& frame_mask) {
    const std::int64_t t = x.rows();
    const std::int64_t t_ds = (t + 1) / 2;
    weights_ = VecT<S>::Zero(t);
    MatT<S> y = MatT<S>::Zero(t_ds, x.cols());
    for (std::int64_t i = 0; i < t_ds; ++i) {
      const std::int64_t a = 2 * i;
      const std::int64_t b = 2 * i + 1;
      const bool a_real = frame_mask[static_cast<std::size_t>(a)] != 0;
      const bool b_real = b < t && frame_mask[static_cast<std::size_t>(b)] != 0;
      if (mode_ == DownsampleMode::kStride) {
        if (a_real) {
          weights_[a] = S(1);
          y.row(i) = x.row(a);
        }
        continue;
      }
      if (a_real && b_real) {
        weights_[a] = weights_[b] = S(0.5);
        y.row(i) = (x.row(a) + x.row(b)) * S(0.5);
      } else if (a_real) {
        // also covers the odd unmasked tail, which passes through
        weights_[a] = S(1);
        y.row(i) = x.row(a);
      } else if (b_real) {
        weights_[b] = S(1);
        y.row(i) = x.row(b);
      }
    }
    return y;
  }

  MatT<S> backward(const MatT<S>& dy) {
    const std::int64_t t = weights_.size();
    MatT<S> dx = MatT<S>::Zero(t, dy.cols());
    for (std::int64_t r = 0; r < t; ++r) {
      if (weights_[r] != S(0)) dx.row(r) = dy.row(r / 2) * weights_[r];
    }
    return dx;
  }

 private:
  DownsampleMode mode_ = DownsampleMode::kAverage;
  VecT<S> weights_;
};

}  // namespace signseg::nn
