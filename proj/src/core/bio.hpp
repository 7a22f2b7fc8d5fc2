#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "util/error.hpp"

namespace signseg {

// Per-frame phase tag. Integer codes are part of the on-disk format and
// must not change.
enum class BioTag : std::uint8_t { O = 0, I = 1, B = 2 };

inline bool is_valid_tag_code(std::uint8_t code) { return code <= 2; }

inline char tag_char(BioTag t) {
  switch (t) {
    case BioTag::O: return 'O';
    case BioTag::I: return 'I';
    case BioTag::B: return 'B';
  }
  return '?';
}

struct TagSequence {
  std::vector<BioTag> tags;
  double frame_rate_hz = 50.0;

  std::int64_t size() const { return static_cast<std::int64_t>(tags.size()); }
  bool operator==(const TagSequence& other) const = default;
};

// Inclusive [start, end] frame span of one sign.
struct Segment {
  std::int64_t start = 0;
  std::int64_t end = 0;

  std::int64_t length() const { return end - start + 1; }
  bool operator==(const Segment& other) const = default;
};

struct GlossAnnotation {
  std::vector<Segment> segments;
  std::vector<std::string> gloss_ids;

  bool operator==(const GlossAnnotation& other) const = default;
};

enum class OrphanPolicy {
  kPromote,  // an I-run with no leading B becomes a segment at its first I
  kDiscard,  // such runs produce no segment
};

// Throws ValidationError naming the offending pair/segment if the list is
// unsorted, overlapping, inverted, or reaches past `frames`.
void validate_segments(const std::vector<Segment>& segments,
                       std::int64_t frames);

// Checks |segments| == |gloss_ids| and segment well-formedness.
void validate_gloss_annotation(const GlossAnnotation& glosses,
                               std::int64_t frames);

std::vector<Segment> segments_from_tags(const TagSequence& tags,
                                        OrphanPolicy policy);

TagSequence tags_from_segments(const std::vector<Segment>& segments,
                               std::int64_t frames,
                               double frame_rate_hz = 50.0);

// CTC target for a tag sequence: consecutive duplicate tags are merged
// first, then O is dropped (O acts as the CTC blank). This is exactly the
// collapse CTC applies to alignment paths, so the target of a clean tag
// sequence is always reachable from it.
std::vector<BioTag> collapse_for_ctc(const TagSequence& tags);

std::string tags_to_string(const TagSequence& tags);

}  // namespace signseg
