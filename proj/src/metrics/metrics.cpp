#include "metrics/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "util/strict_json.hpp"

namespace signseg {

using nlohmann::json;

void MetricConfig::validate() const {
  auto check = [](const auto& v, const char* name) {
    if (v.empty()) {
      throw ConfigError(std::string("metrics: ") + name + " must be nonempty");
    }
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (!(v[i] > v[i - 1])) {
        throw ConfigError(std::string("metrics: ") + name +
                          " must be strictly increasing");
      }
    }
  };
  check(boundary_thresholds, "boundary_thresholds");
  check(iou_thresholds, "iou_thresholds");
  if (!boundary_thresholds.empty() && boundary_thresholds.front() < 0) {
    throw ConfigError("metrics: boundary thresholds must be >= 0");
  }
}

json MetricConfig::to_json() const {
  return {{"boundary_thresholds", boundary_thresholds},
          {"iou_thresholds", iou_thresholds},
          {"boundary_definition",
           boundary_definition == BoundaryDefinition::kStartsOnly
               ? "starts_only"
               : "starts_and_ends"}};
}

MetricConfig MetricConfig::from_json(const json& j, const std::string& path) {
  jsonutil::check_allowed_keys(
      j, path, {"boundary_thresholds", "iou_thresholds", "boundary_definition"});
  MetricConfig c;
  if (const json* v = jsonutil::find(j, "boundary_thresholds")) {
    c.boundary_thresholds = v->get<std::vector<std::int64_t>>();
  }
  if (const json* v = jsonutil::find(j, "iou_thresholds")) {
    c.iou_thresholds = v->get<std::vector<double>>();
  }
  const std::string def = jsonutil::get_string(j, path, "boundary_definition",
                                               "starts_only");
  if (def == "starts_only") {
    c.boundary_definition = BoundaryDefinition::kStartsOnly;
  } else if (def == "starts_and_ends") {
    c.boundary_definition = BoundaryDefinition::kStartsAndEnds;
  } else {
    throw ConfigError("config: " + path + ".boundary_definition must be "
                      "'starts_only' or 'starts_and_ends'");
  }
  c.validate();
  return c;
}

namespace {

void check_lengths(const TagSequence& pred, const TagSequence& gt,
                   const char* op) {
  if (pred.size() != gt.size()) {
    throw ValidationError(std::string(op) + ": length mismatch (" +
                          std::to_string(pred.size()) + " vs " +
                          std::to_string(gt.size()) + ")");
  }
}

FrameF1 frame_f1_from_confusion(const std::array<std::array<std::int64_t, 3>, 3>& m,
                                std::int64_t total) {
  FrameF1 out;
  double macro_sum = 0.0;
  std::int64_t diag = 0;
  for (int c = 0; c < 3; ++c) {
    std::int64_t tp = m[c][c];
    std::int64_t pred_count = 0;
    std::int64_t gt_count = 0;
    for (int k = 0; k < 3; ++k) {
      pred_count += m[k][c];  // rows: gt, cols: pred
      gt_count += m[c][k];
    }
    diag += tp;
    PerClassScore& s = out.per_class[static_cast<std::size_t>(c)];
    if (pred_count == 0 && gt_count == 0) {
      s.precision = s.recall = s.f1 = 1.0;  // class absent from both sides
    } else {
      s.precision = pred_count > 0 ? static_cast<double>(tp) / pred_count : 0.0;
      s.recall = gt_count > 0 ? static_cast<double>(tp) / gt_count : 0.0;
      s.f1 = (s.precision + s.recall) > 0.0
                 ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                 : 0.0;
    }
    macro_sum += s.f1;
  }
  out.macro = macro_sum / 3.0;
  out.micro = total > 0 ? static_cast<double>(diag) / total : 1.0;
  return out;
}

}  // namespace

FrameF1 frame_f1(const TagSequence& pred, const TagSequence& gt) {
  check_lengths(pred, gt, "frame_f1");
  std::array<std::array<std::int64_t, 3>, 3> m{};
  for (std::size_t i = 0; i < gt.tags.size(); ++i) {
    m[static_cast<std::size_t>(gt.tags[i])][static_cast<std::size_t>(pred.tags[i])]++;
  }
  return frame_f1_from_confusion(m, gt.size());
}

double frame_iou(const TagSequence& pred, const TagSequence& gt) {
  check_lengths(pred, gt, "frame_iou");
  std::int64_t inter = 0;
  std::int64_t uni = 0;
  for (std::size_t i = 0; i < gt.tags.size(); ++i) {
    const bool p = pred.tags[i] != BioTag::O;
    const bool g = gt.tags[i] != BioTag::O;
    inter += (p && g) ? 1 : 0;
    uni += (p || g) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double segment_ratio(std::size_t pred_count, std::size_t gt_count) {
  if (gt_count == 0) {
    throw ValidationError("segment_ratio: ground truth has no segments");
  }
  return static_cast<double>(pred_count) / static_cast<double>(gt_count);
}

double MatchCounts::precision() const {
  return pred > 0 ? static_cast<double>(matched) / pred : 0.0;
}
double MatchCounts::recall() const {
  return gt > 0 ? static_cast<double>(matched) / gt : 0.0;
}
double MatchCounts::f1() const {
  if (pred == 0 && gt == 0) return 1.0;
  const double p = precision();
  const double r = recall();
  return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

std::vector<std::int64_t> boundary_positions(const std::vector<Segment>& segs,
                                             BoundaryDefinition def) {
  std::vector<std::int64_t> out;
  for (const Segment& s : segs) {
    out.push_back(s.start);
    if (def == BoundaryDefinition::kStartsAndEnds) out.push_back(s.end);
  }
  std::sort(out.begin(), out.end());
  return out;
}

MatchCounts boundary_match_counts(const std::vector<Segment>& pred,
                                  const std::vector<Segment>& gt,
                                  std::int64_t threshold,
                                  BoundaryDefinition def) {
  const std::vector<std::int64_t> p = boundary_positions(pred, def);
  const std::vector<std::int64_t> g = boundary_positions(gt, def);
  MatchCounts c;
  c.pred = static_cast<std::int64_t>(p.size());
  c.gt = static_cast<std::int64_t>(g.size());
  std::size_t i = 0, j = 0;
  while (i < p.size() && j < g.size()) {
    if (std::llabs(p[i] - g[j]) <= threshold) {
      ++c.matched;
      ++i;
      ++j;
    } else if (p[i] < g[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return c;
}

double boundary_f1(const std::vector<Segment>& pred,
                   const std::vector<Segment>& gt, std::int64_t threshold,
                   BoundaryDefinition def) {
  return boundary_match_counts(pred, gt, threshold, def).f1();
}

double mf1b(const std::vector<Segment>& pred, const std::vector<Segment>& gt,
            const MetricConfig& config) {
  config.validate();
  double sum = 0.0;
  for (std::int64_t t : config.boundary_thresholds) {
    sum += boundary_f1(pred, gt, t, config.boundary_definition);
  }
  return sum / static_cast<double>(config.boundary_thresholds.size());
}

double segment_iou(const Segment& a, const Segment& b) {
  const std::int64_t inter = std::min(a.end, b.end) - std::max(a.start, b.start) + 1;
  if (inter <= 0) return 0.0;
  const std::int64_t uni = std::max(a.end, b.end) - std::min(a.start, b.start) + 1;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<double> match_segments_by_iou(const std::vector<Segment>& pred,
                                          const std::vector<Segment>& gt) {
  struct Cand {
    double iou;
    std::size_t pi, gi;
  };
  std::vector<Cand> cands;
  for (std::size_t pi = 0; pi < pred.size(); ++pi) {
    for (std::size_t gi = 0; gi < gt.size(); ++gi) {
      const double iou = segment_iou(pred[pi], gt[gi]);
      if (iou > 0.0) cands.push_back({iou, pi, gi});
    }
  }
  std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    const Segment& pa = pred[a.pi];
    const Segment& pb = pred[b.pi];
    if (pa.start != pb.start) return pa.start < pb.start;
    if (pa.length() != pb.length()) return pa.length() < pb.length();
    return a.gi < b.gi;
  });
  std::vector<bool> pred_used(pred.size(), false), gt_used(gt.size(), false);
  std::vector<double> matched;
  for (const Cand& c : cands) {
    if (pred_used[c.pi] || gt_used[c.gi]) continue;
    pred_used[c.pi] = true;
    gt_used[c.gi] = true;
    matched.push_back(c.iou);
  }
  return matched;
}

namespace {

double mf1s_from_matches(const std::vector<double>& matched_ious,
                         std::int64_t pred_count, std::int64_t gt_count,
                         const MetricConfig& config) {
  double sum = 0.0;
  for (double tau : config.iou_thresholds) {
    MatchCounts c;
    c.pred = pred_count;
    c.gt = gt_count;
    for (double iou : matched_ious) {
      if (iou > tau) ++c.matched;
    }
    sum += c.f1();
  }
  return sum / static_cast<double>(config.iou_thresholds.size());
}

}  // namespace

double mf1s(const std::vector<Segment>& pred, const std::vector<Segment>& gt,
            const MetricConfig& config) {
  config.validate();
  return mf1s_from_matches(match_segments_by_iou(pred, gt),
                           static_cast<std::int64_t>(pred.size()),
                           static_cast<std::int64_t>(gt.size()), config);
}

const char* category_name(SampleCategory c) {
  switch (c) {
    case SampleCategory::kMatched: return "matched";
    case SampleCategory::kOverSegmented: return "over_segmented";
    case SampleCategory::kUnderSegmented: return "under_segmented";
  }
  return "?";
}

std::int64_t EvalReport::count(SampleCategory c) const {
  std::int64_t n = 0;
  for (const SampleDiagnostic& d : samples) {
    if (d.category == c) ++n;
  }
  return n;
}

json EvalReport::to_json() const {
  json per_class_j;
  const char* names[3] = {"O", "I", "B"};
  for (int c = 0; c < 3; ++c) {
    const PerClassScore& s = per_class[static_cast<std::size_t>(c)];
    per_class_j[names[c]] = {
        {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
  }
  json samples_j = json::array();
  for (const SampleDiagnostic& d : samples) {
    samples_j.push_back({{"sample_id", d.sample_id},
                         {"pred_segments", d.pred_segments},
                         {"gt_segments", d.gt_segments},
                         {"category", category_name(d.category)}});
  }
  return {{"frame_f1", frame_f1},
          {"iou", iou},
          {"segment_ratio", segment_ratio},
          {"mf1b", mf1b},
          {"mf1s", mf1s},
          {"per_class", per_class_j},
          {"micro_f1", micro_f1},
          {"num_samples", samples.size()},
          {"over_segmented", count(SampleCategory::kOverSegmented)},
          {"under_segmented", count(SampleCategory::kUnderSegmented)},
          {"matched", count(SampleCategory::kMatched)},
          {"samples", samples_j}};
}

EvalReport EvalReport::from_json(const json& j) {
  EvalReport r;
  r.frame_f1 = j.at("frame_f1").get<double>();
  r.iou = j.at("iou").get<double>();
  r.segment_ratio = j.at("segment_ratio").get<double>();
  r.mf1b = j.at("mf1b").get<double>();
  r.mf1s = j.at("mf1s").get<double>();
  r.micro_f1 = j.value("micro_f1", 0.0);
  const char* names[3] = {"O", "I", "B"};
  if (j.contains("per_class")) {
    for (int c = 0; c < 3; ++c) {
      const json& s = j.at("per_class").at(names[c]);
      r.per_class[static_cast<std::size_t>(c)] = {s.at("precision").get<double>(),
                                                  s.at("recall").get<double>(),
                                                  s.at("f1").get<double>()};
    }
  }
  for (const auto& d : j.value("samples", json::array())) {
    SampleDiagnostic diag;
    diag.sample_id = d.at("sample_id").get<std::string>();
    diag.pred_segments = d.at("pred_segments").get<std::int64_t>();
    diag.gt_segments = d.at("gt_segments").get<std::int64_t>();
    const std::string cat = d.at("category").get<std::string>();
    diag.category = cat == "over_segmented" ? SampleCategory::kOverSegmented
                    : cat == "under_segmented" ? SampleCategory::kUnderSegmented
                                               : SampleCategory::kMatched;
    r.samples.push_back(std::move(diag));
  }
  return r;
}

EvalReport evaluate(const std::vector<EvalPair>& pairs,
                    const MetricConfig& config) {
  config.validate();
  EvalReport report;

  std::array<std::array<std::int64_t, 3>, 3> confusion{};
  std::int64_t total_frames = 0;
  std::int64_t iou_inter = 0, iou_union = 0;
  std::int64_t pred_total = 0, gt_total = 0;
  std::vector<MatchCounts> boundary(config.boundary_thresholds.size());
  struct SegAgg {
    std::vector<double> matched_ious;
    std::int64_t pred = 0, gt = 0;
  } seg;

  for (const EvalPair& pair : pairs) {
    check_lengths(pair.pred, pair.gt, "evaluate");
    for (std::size_t i = 0; i < pair.gt.tags.size(); ++i) {
      confusion[static_cast<std::size_t>(pair.gt.tags[i])]
               [static_cast<std::size_t>(pair.pred.tags[i])]++;
      const bool p = pair.pred.tags[i] != BioTag::O;
      const bool g = pair.gt.tags[i] != BioTag::O;
      iou_inter += (p && g) ? 1 : 0;
      iou_union += (p || g) ? 1 : 0;
    }
    total_frames += pair.gt.size();

    const std::vector<Segment> pred_segs =
        segments_from_tags(pair.pred, OrphanPolicy::kPromote);
    const std::vector<Segment> gt_segs =
        segments_from_tags(pair.gt, OrphanPolicy::kPromote);
    pred_total += static_cast<std::int64_t>(pred_segs.size());
    gt_total += static_cast<std::int64_t>(gt_segs.size());

    for (std::size_t k = 0; k < config.boundary_thresholds.size(); ++k) {
      const MatchCounts c = boundary_match_counts(
          pred_segs, gt_segs, config.boundary_thresholds[k],
          config.boundary_definition);
      boundary[k].matched += c.matched;
      boundary[k].pred += c.pred;
      boundary[k].gt += c.gt;
    }
    const std::vector<double> ious = match_segments_by_iou(pred_segs, gt_segs);
    seg.matched_ious.insert(seg.matched_ious.end(), ious.begin(), ious.end());
    seg.pred += static_cast<std::int64_t>(pred_segs.size());
    seg.gt += static_cast<std::int64_t>(gt_segs.size());

    SampleDiagnostic diag;
    diag.sample_id = pair.sample_id;
    diag.pred_segments = static_cast<std::int64_t>(pred_segs.size());
    diag.gt_segments = static_cast<std::int64_t>(gt_segs.size());
    diag.category = diag.pred_segments > diag.gt_segments
                        ? SampleCategory::kOverSegmented
                    : diag.pred_segments < diag.gt_segments
                        ? SampleCategory::kUnderSegmented
                        : SampleCategory::kMatched;
    report.samples.push_back(std::move(diag));
  }

  const FrameF1 f = frame_f1_from_confusion(confusion, total_frames);
  report.frame_f1 = f.macro;
  report.micro_f1 = f.micro;
  report.per_class = f.per_class;
  report.iou = iou_union == 0
                   ? 1.0
                   : static_cast<double>(iou_inter) / static_cast<double>(iou_union);
  report.segment_ratio = segment_ratio(static_cast<std::size_t>(pred_total),
                                       static_cast<std::size_t>(gt_total));

  double mf1b_sum = 0.0;
  for (const MatchCounts& c : boundary) mf1b_sum += c.f1();
  report.mf1b = mf1b_sum / static_cast<double>(boundary.size());
  report.mf1s = mf1s_from_matches(seg.matched_ious, seg.pred, seg.gt, config);
  return report;
}

}  // namespace signseg
