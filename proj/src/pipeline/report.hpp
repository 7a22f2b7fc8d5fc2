#pragma once

#include <filesystem>

#include "metrics/metrics.hpp"

namespace signseg {

// Two horizontal tag strips (ground truth above, prediction below), one
// cell per frame, framed in the sample's category color: green matched,
// red over-segmented, orange under-segmented.
void render_timeline_svg(const std::filesystem::path& path,
                         const std::string& sample_id, const TagSequence& gt,
                         const TagSequence& pred, SampleCategory category);

// Plain-text metric table plus category counts.
void write_report_summary(const std::filesystem::path& path,
                          const EvalReport& report, int timelines_rendered);

}  // namespace signseg
