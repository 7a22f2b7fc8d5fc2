#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "core/bio.hpp"
#include "util/error.hpp"
#include "util/mat.hpp"

// Joint training objective: frame-level weighted cross-entropy plus
// gloss-level CTC over the 3-tag alphabet with O as the blank. All CTC
// arithmetic runs in log space via log-sum-exp.

namespace signseg {

template <class S>
struct LossBreakdown {
  S ce = S(0);
  S ctc = S(0);
  S total = S(0);
  double lambda_ce = 1.0;
  double lambda_ctc = 1.0;
  bool ctc_infeasible = false;
};

namespace detail {

template <class S>
S log_add(S a, S b) {
  if (a == -std::numeric_limits<S>::infinity()) return b;
  if (b == -std::numeric_limits<S>::infinity()) return a;
  const S m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Indices of unpadded rows, in order.
inline std::vector<std::int64_t> real_rows(
    const std::vector<std::uint8_t>& mask) {
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(static_cast<std::int64_t>(i));
  }
  return out;
}

// Blank-extended target: O z1 O z2 ... O.
inline std::vector<int> extended_target(const std::vector<BioTag>& target) {
  std::vector<int> ext;
  ext.reserve(2 * target.size() + 1);
  ext.push_back(0);
  for (BioTag t : target) {
    ext.push_back(static_cast<int>(t));
    ext.push_back(0);
  }
  return ext;
}

// Minimum frames any alignment needs: one per symbol plus a blank
// between equal neighbours.
inline std::int64_t min_alignment_frames(const std::vector<BioTag>& target) {
  std::int64_t n = static_cast<std::int64_t>(target.size());
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (target[i] == target[i - 1]) ++n;
  }
  return n;
}

}  // namespace detail

// Rowwise log-softmax plus its backward.
template <class S>
MatT<S> log_softmax(const MatT<S>& logits) {
  MatT<S> out(logits.rows(), logits.cols());
  for (std::int64_t r = 0; r < logits.rows(); ++r) {
    const S m = logits.row(r).maxCoeff();
    const S lse = m + std::log((logits.row(r).array() - m).exp().sum());
    out.row(r) = logits.row(r).array() - lse;
  }
  return out;
}

template <class S>
MatT<S> log_softmax_backward(const MatT<S>& log_probs, const MatT<S>& dlp) {
  MatT<S> dlogits(dlp.rows(), dlp.cols());
  for (std::int64_t r = 0; r < dlp.rows(); ++r) {
    const S total = dlp.row(r).sum();
    dlogits.row(r) =
        dlp.row(r).array() - log_probs.row(r).array().exp() * total;
  }
  return dlogits;
}

// Weighted mean of -w[y] log softmax(logits)[y] over unpadded frames,
// normalized by the sum of the applied weights. dlogits_out (optional)
// receives the gradient w.r.t. the logits.
template <class S>
S cross_entropy(const MatT<S>& logits, const std::vector<BioTag>& targets,
                const std::array<double, 3>& class_weights,
                const std::vector<std::uint8_t>& mask,
                MatT<S>* dlogits_out = nullptr) {
  if (static_cast<std::size_t>(logits.rows()) != targets.size() ||
      targets.size() != mask.size()) {
    throw ValidationError("cross_entropy: length mismatch");
  }
  for (double w : class_weights) {
    if (w < 0.0) throw ValidationError("cross_entropy: negative class weight");
  }
  const std::vector<std::int64_t> rows = detail::real_rows(mask);
  if (rows.empty()) {
    throw ValidationError("cross_entropy: every frame is padded");
  }
  const MatT<S> lp = log_softmax(logits);
  double weight_sum = 0.0;
  double loss_sum = 0.0;
  for (std::int64_t r : rows) {
    const int y = static_cast<int>(targets[static_cast<std::size_t>(r)]);
    const double w = class_weights[static_cast<std::size_t>(y)];
    loss_sum += -w * static_cast<double>(lp(r, y));
    weight_sum += w;
  }
  if (weight_sum <= 0.0) {
    throw ValidationError("cross_entropy: all frame weights are zero");
  }
  if (dlogits_out) {
    MatT<S>& d = *dlogits_out;
    d = MatT<S>::Zero(logits.rows(), 3);
    for (std::int64_t r : rows) {
      const int y = static_cast<int>(targets[static_cast<std::size_t>(r)]);
      const S scale =
          static_cast<S>(class_weights[static_cast<std::size_t>(y)] / weight_sum);
      d.row(r) = lp.row(r).array().exp() * scale;
      d(r, y) -= scale;
    }
  }
  return static_cast<S>(loss_sum / weight_sum);
}

// -log P(target | log_probs) by the forward recursion over the
// blank-extended target. `log_probs` rows must already be log-softmaxed;
// padded rows are skipped. Throws CtcInfeasibleError when no alignment
// exists in the unpadded frames.
template <class S>
S ctc_loss(const MatT<S>& log_probs, const std::vector<BioTag>& target,
           const std::vector<std::uint8_t>& mask) {
  const S kNegInf = -std::numeric_limits<S>::infinity();
  for (BioTag t : target) {
    if (t == BioTag::O) {
      throw ValidationError("ctc: target may not contain the blank tag O");
    }
  }
  const std::vector<std::int64_t> rows = detail::real_rows(mask);
  const std::int64_t t_eff = static_cast<std::int64_t>(rows.size());
  if (t_eff < detail::min_alignment_frames(target)) {
    throw CtcInfeasibleError(
        "ctc: target of length " + std::to_string(target.size()) +
        " needs at least " + std::to_string(detail::min_alignment_frames(target)) +
        " frames, got " + std::to_string(t_eff));
  }

  if (t_eff == 0) return S(0);  // empty target over zero frames

  const std::vector<int> ext = detail::extended_target(target);
  const std::int64_t u = static_cast<std::int64_t>(ext.size());

  std::vector<S> alpha(static_cast<std::size_t>(u), kNegInf);
  std::vector<S> prev(static_cast<std::size_t>(u), kNegInf);
  alpha[0] = log_probs(rows[0], ext[0]);
  if (u > 1) alpha[1] = log_probs(rows[0], ext[1]);
  for (std::int64_t t = 1; t < t_eff; ++t) {
    std::swap(prev, alpha);
    for (std::int64_t s = 0; s < u; ++s) {
      S acc = prev[static_cast<std::size_t>(s)];
      if (s >= 1) acc = detail::log_add(acc, prev[static_cast<std::size_t>(s - 1)]);
      if (s >= 2 && ext[static_cast<std::size_t>(s)] != 0 &&
          ext[static_cast<std::size_t>(s)] != ext[static_cast<std::size_t>(s - 2)]) {
        acc = detail::log_add(acc, prev[static_cast<std::size_t>(s - 2)]);
      }
      alpha[static_cast<std::size_t>(s)] =
          acc + log_probs(rows[static_cast<std::size_t>(t)],
                          ext[static_cast<std::size_t>(s)]);
    }
  }
  S log_p = alpha[static_cast<std::size_t>(u - 1)];
  if (u > 1) log_p = detail::log_add(log_p, alpha[static_cast<std::size_t>(u - 2)]);
  return -log_p;
}

template <class S>
struct CtcResult {
  S loss = S(0);
  MatT<S> dlog_probs;  // same shape as log_probs; zero at padded rows
};

// Forward-backward gradient of ctc_loss w.r.t. the log-probabilities:
//   d(-log P)/d log p_t(k) = -(1/P) * sum_{s: ext_s = k} alpha_t(s) beta_t(s)
// with beta including the emission at t, so alpha_t . beta_t / p_t = P
// for every t (the per-frame state posterior sums to one).
template <class S>
CtcResult<S> ctc_grad(const MatT<S>& log_probs,
                      const std::vector<BioTag>& target,
                      const std::vector<std::uint8_t>& mask) {
  const S kNegInf = -std::numeric_limits<S>::infinity();
  CtcResult<S> result;
  result.loss = ctc_loss(log_probs, target, mask);  // validates feasibility

  const std::vector<std::int64_t> rows = detail::real_rows(mask);
  const std::int64_t t_eff = static_cast<std::int64_t>(rows.size());
  result.dlog_probs = MatT<S>::Zero(log_probs.rows(), log_probs.cols());
  if (t_eff == 0) return result;

  const std::vector<int> ext = detail::extended_target(target);
  const std::int64_t u = static_cast<std::int64_t>(ext.size());

  MatT<S> alpha = MatT<S>::Constant(t_eff, u, kNegInf);
  MatT<S> beta = MatT<S>::Constant(t_eff, u, kNegInf);

  alpha(0, 0) = log_probs(rows[0], ext[0]);
  if (u > 1) alpha(0, 1) = log_probs(rows[0], ext[1]);
  for (std::int64_t t = 1; t < t_eff; ++t) {
    for (std::int64_t s = 0; s < u; ++s) {
      S acc = alpha(t - 1, s);
      if (s >= 1) acc = detail::log_add(acc, alpha(t - 1, s - 1));
      if (s >= 2 && ext[static_cast<std::size_t>(s)] != 0 &&
          ext[static_cast<std::size_t>(s)] != ext[static_cast<std::size_t>(s - 2)]) {
        acc = detail::log_add(acc, alpha(t - 1, s - 2));
      }
      alpha(t, s) = acc + log_probs(rows[static_cast<std::size_t>(t)],
                                    ext[static_cast<std::size_t>(s)]);
    }
  }

  beta(t_eff - 1, u - 1) = log_probs(rows[static_cast<std::size_t>(t_eff - 1)], ext[static_cast<std::size_t>(u - 1)]);
  if (u > 1) {
    beta(t_eff - 1, u - 2) =
        log_probs(rows[static_cast<std::size_t>(t_eff - 1)], ext[static_cast<std::size_t>(u - 2)]);
  }
  for (std::int64_t t = t_eff - 2; t >= 0; --t) {
    for (std::int64_t s = u - 1; s >= 0; --s) {
      S acc = beta(t + 1, s);
      if (s + 1 < u) acc = detail::log_add(acc, beta(t + 1, s + 1));
      if (s + 2 < u && ext[static_cast<std::size_t>(s + 2)] != 0 &&
          ext[static_cast<std::size_t>(s + 2)] != ext[static_cast<std::size_t>(s)]) {
        acc = detail::log_add(acc, beta(t + 1, s + 2));
      }
      beta(t, s) = acc + log_probs(rows[static_cast<std::size_t>(t)],
                                   ext[static_cast<std::size_t>(s)]);
    }
  }

  const S log_p = -result.loss;
  for (std::int64_t t = 0; t < t_eff; ++t) {
    const std::int64_t row = rows[static_cast<std::size_t>(t)];
    std::array<S, 3> acc = {kNegInf, kNegInf, kNegInf};
    for (std::int64_t s = 0; s < u; ++s) {
      const int k = ext[static_cast<std::size_t>(s)];
      // alpha and beta both include the emission at t; divide one out.
      const S val = alpha(t, s) + beta(t, s) - log_probs(row, k);
      acc[static_cast<std::size_t>(k)] =
          detail::log_add(acc[static_cast<std::size_t>(k)], val);
    }
    for (int k = 0; k < 3; ++k) {
      if (acc[static_cast<std::size_t>(k)] != kNegInf) {
        result.dlog_probs(row, k) =
            -std::exp(acc[static_cast<std::size_t>(k)] - log_p);
      }
    }
  }
  return result;
}

// Best single alignment, for bound checks: the Viterbi analogue of the
// forward recursion.
template <class S>
S ctc_best_path_nll(const MatT<S>& log_probs, const std::vector<BioTag>& target,
                    const std::vector<std::uint8_t>& mask) {
  const S kNegInf = -std::numeric_limits<S>::infinity();
  const std::vector<std::int64_t> rows = detail::real_rows(mask);
  const std::int64_t t_eff = static_cast<std::int64_t>(rows.size());
  if (t_eff < detail::min_alignment_frames(target)) {
    throw CtcInfeasibleError("ctc: no alignment exists");
  }
  if (t_eff == 0) return S(0);
  const std::vector<int> ext = detail::extended_target(target);
  const std::int64_t u = static_cast<std::int64_t>(ext.size());
  std::vector<S> best(static_cast<std::size_t>(u), kNegInf);
  std::vector<S> prev(static_cast<std::size_t>(u), kNegInf);
  best[0] = log_probs(rows[0], ext[0]);
  if (u > 1) best[1] = log_probs(rows[0], ext[1]);
  for (std::int64_t t = 1; t < t_eff; ++t) {
    std::swap(prev, best);
    for (std::int64_t s = 0; s < u; ++s) {
      S acc = prev[static_cast<std::size_t>(s)];
      if (s >= 1) acc = std::max(acc, prev[static_cast<std::size_t>(s - 1)]);
      if (s >= 2 && ext[static_cast<std::size_t>(s)] != 0 &&
          ext[static_cast<std::size_t>(s)] != ext[static_cast<std::size_t>(s - 2)]) {
        acc = std::max(acc, prev[static_cast<std::size_t>(s - 2)]);
      }
      best[static_cast<std::size_t>(s)] =
          acc + log_probs(rows[static_cast<std::size_t>(t)],
                          ext[static_cast<std::size_t>(s)]);
    }
  }
  S b = best[static_cast<std::size_t>(u - 1)];
  if (u > 1) b = std::max(b, best[static_cast<std::size_t>(u - 2)]);
  return -b;
}

// Joint loss. When the CTC target cannot be aligned within the window the
// CTC term is dropped and flagged. dlogits_out receives the gradient of
// total w.r.t. the raw logits.
template <class S>
LossBreakdown<S> combined_loss(const MatT<S>& logits,
                               const std::vector<BioTag>& targets,
                               const std::vector<BioTag>& ctc_target,
                               const std::array<double, 3>& class_weights,
                               const std::vector<std::uint8_t>& mask,
                               double lambda_ce, double lambda_ctc,
                               MatT<S>* dlogits_out = nullptr) {
  if (lambda_ce < 0.0 || lambda_ctc < 0.0) {
    throw ValidationError("combined_loss: loss weights must be nonnegative");
  }
  LossBreakdown<S> out;
  out.lambda_ce = lambda_ce;
  out.lambda_ctc = lambda_ctc;

  MatT<S> dce;
  out.ce = cross_entropy(logits, targets, class_weights, mask,
                         dlogits_out ? &dce : nullptr);

  MatT<S> dctc_logits;
  if (lambda_ctc > 0.0) {
    const MatT<S> lp = log_softmax(logits);
    try {
      if (dlogits_out) {
        CtcResult<S> r = ctc_grad(lp, ctc_target, mask);
        out.ctc = r.loss;
        dctc_logits = log_softmax_backward(lp, r.dlog_probs);
      } else {
        out.ctc = ctc_loss(lp, ctc_target, mask);
      }
    } catch (const CtcInfeasibleError&) {
      out.ctc = S(0);
      out.ctc_infeasible = true;
    }
  }

  out.total = static_cast<S>(lambda_ce * out.ce + lambda_ctc * out.ctc);
  if (dlogits_out) {
    *dlogits_out = dce * static_cast<S>(lambda_ce);
    if (dctc_logits.size() > 0) {
      *dlogits_out += dctc_logits * static_cast<S>(lambda_ctc);
    }
  }
  return out;
}

}  // namespace signseg
