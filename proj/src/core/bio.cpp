#include "core/bio.hpp"

#include <sstream>

namespace signseg {

namespace {

std::string segment_str(const Segment& s) {
  std::ostringstream ss;
  ss << "[" << s.start << "," << s.end << "]";
  return ss.str();
}

}  // namespace

void validate_segments(const std::vector<Segment>& segments,
                       std::int64_t frames) {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    if (s.start < 0 || s.start > s.end) {
      throw ValidationError("segments[" + std::to_string(i) + "]=" +
                            segment_str(s) + " is not a valid span");
    }
    if (s.end >= frames) {
      throw ValidationError("segments[" + std::to_string(i) + "]=" +
                            segment_str(s) + " out of range for " +
                            std::to_string(frames) + " frames");
    }
    if (i > 0 && segments[i - 1].end >= s.start) {
      throw ValidationError("segments[" + std::to_string(i - 1) + "]=" +
                            segment_str(segments[i - 1]) +
                            " overlaps or is not before segments[" +
                            std::to_string(i) + "]=" + segment_str(s));
    }
  }
}

void validate_gloss_annotation(const GlossAnnotation& glosses,
                               std::int64_t frames) {
  if (glosses.segments.size() != glosses.gloss_ids.size()) {
    throw ValidationError(
        "gloss annotation: " + std::to_string(glosses.segments.size()) +
        " segments but " + std::to_string(glosses.gloss_ids.size()) +
        " gloss ids");
  }
  validate_segments(glosses.segments, frames);
}

std::vector<Segment> segments_from_tags(const TagSequence& tags,
                                        OrphanPolicy policy) {
  std::vector<Segment> out;
  std::int64_t open_start = -1;   // start of the currently open segment
  bool in_orphan_discard = false; // inside an I-run we are dropping

  const std::int64_t n = tags.size();
  for (std::int64_t t = 0; t < n; ++t) {
    switch (tags.tags[static_cast<std::size_t>(t)]) {
      case BioTag::B:
        if (open_start >= 0) out.push_back({open_start, t - 1});
        open_start = t;
        in_orphan_discard = false;
        break;
      case BioTag::I:
        if (open_start < 0 && !in_orphan_discard) {
          if (policy == OrphanPolicy::kPromote) {
            open_start = t;
          } else {
            in_orphan_discard = true;
          }
        }
        break;
      case BioTag::O:
        if (open_start >= 0) {
          out.push_back({open_start, t - 1});
          open_start = -1;
        }
        in_orphan_discard = false;
        break;
    }
  }
  if (open_start >= 0) out.push_back({open_start, n - 1});
  return out;
}

TagSequence tags_from_segments(const std::vector<Segment>& segments,
                               std::int64_t frames, double frame_rate_hz) {
  validate_segments(segments, frames);
  TagSequence out;
  out.frame_rate_hz = frame_rate_hz;
  out.tags.assign(static_cast<std::size_t>(frames), BioTag::O);
  for (const Segment& s : segments) {
    out.tags[static_cast<std::size_t>(s.start)] = BioTag::B;
    for (std::int64_t t = s.start + 1; t <= s.end; ++t) {
      out.tags[static_cast<std::size_t>(t)] = BioTag::I;
    }
  }
  return out;
}

std::vector<BioTag> collapse_for_ctc(const TagSequence& tags) {
  std::vector<BioTag> out;
  bool have_prev = false;
  BioTag prev = BioTag::O;
  for (BioTag t : tags.tags) {
    if (!have_prev || t != prev) {
      if (t != BioTag::O) out.push_back(t);
      prev = t;
      have_prev = true;
    }
  }
  return out;
}

std::string tags_to_string(const TagSequence& tags) {
  std::string s;
  s.reserve(tags.tags.size());
  for (BioTag t : tags.tags) s.push_back(tag_char(t));
  return s;
}

}  // namespace signseg
