#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/bio.hpp"

namespace signseg {

enum class BoundaryDefinition { kStartsOnly, kStartsAndEnds };

struct MetricConfig {
  std::vector<std::int64_t> boundary_thresholds = {1, 2, 3, 4};
  std::vector<double> iou_thresholds = {0.40, 0.45, 0.50, 0.55,
                                        0.60, 0.65, 0.70, 0.75};
  BoundaryDefinition boundary_definition = BoundaryDefinition::kStartsOnly;

  void validate() const;
  nlohmann::json to_json() const;
  static MetricConfig from_json(const nlohmann::json& j, const std::string& path);
};

struct PerClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct FrameF1 {
  double macro = 0.0;
  double micro = 0.0;  // diagnostic; equals accuracy for single-label tags
  std::array<PerClassScore, 3> per_class;  // indexed by tag code
};

// Macro one-vs-rest F1 over {O, I, B}. A class absent from both sides
// scores 1; absent from ground truth but predicted scores 0.
FrameF1 frame_f1(const TagSequence& pred, const TagSequence& gt);

// Overlap of the in-sign (non-O) frame sets; 1 when both are empty.
double frame_iou(const TagSequence& pred, const TagSequence& gt);

// Predicted over ground-truth segment count. Errors when gt_count is 0.
double segment_ratio(std::size_t pred_count, std::size_t gt_count);

struct MatchCounts {
  std::int64_t matched = 0;
  std::int64_t pred = 0;
  std::int64_t gt = 0;

  double precision() const;
  double recall() const;
  double f1() const;
};

std::vector<std::int64_t> boundary_positions(const std::vector<Segment>& segs,
                                             BoundaryDefinition def);

// One-to-one matching of boundary positions within |distance| <=
// threshold via a sorted two-pointer sweep (optimal for points on a line
// with a uniform window).
MatchCounts boundary_match_counts(const std::vector<Segment>& pred,
                                  const std::vector<Segment>& gt,
                                  std::int64_t threshold,
                                  BoundaryDefinition def);

double boundary_f1(const std::vector<Segment>& pred,
                   const std::vector<Segment>& gt, std::int64_t threshold,
                   BoundaryDefinition def = BoundaryDefinition::kStartsOnly);

// Mean boundary F1 over config.boundary_thresholds.
double mf1b(const std::vector<Segment>& pred, const std::vector<Segment>& gt,
            const MetricConfig& config);

double segment_iou(const Segment& a, const Segment& b);

// Greedy one-to-one segment matching by descending IoU (ties: earlier
// start, then shorter segment, pred index before gt index). Returns the
// IoU of each matched pair.
std::vector<double> match_segments_by_iou(const std::vector<Segment>& pred,
                                          const std::vector<Segment>& gt);

// Per IoU threshold tau, F1 counting matched pairs with IoU > tau as
// correct; averaged over config.iou_thresholds.
double mf1s(const std::vector<Segment>& pred, const std::vector<Segment>& gt,
            const MetricConfig& config);

enum class SampleCategory { kMatched, kOverSegmented, kUnderSegmented };
const char* category_name(SampleCategory c);

struct SampleDiagnostic {
  std::string sample_id;
  std::int64_t pred_segments = 0;
  std::int64_t gt_segments = 0;
  SampleCategory category = SampleCategory::kMatched;
};

struct EvalReport {
  double frame_f1 = 0.0;
  double iou = 0.0;
  double segment_ratio = 0.0;
  double mf1b = 0.0;
  double mf1s = 0.0;
  std::array<PerClassScore, 3> per_class;
  double micro_f1 = 0.0;
  std::vector<SampleDiagnostic> samples;

  std::int64_t count(SampleCategory c) const;
  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
};

struct EvalPair {
  std::string sample_id;
  TagSequence pred;
  TagSequence gt;
};

// Frame metrics micro-aggregate over concatenated frames; boundary and
// segment scores aggregate matched/pred/gt counts across samples per
// threshold; the ratio uses global segment counts.
EvalReport evaluate(const std::vector<EvalPair>& pairs,
                    const MetricConfig& config);

}  // namespace signseg
