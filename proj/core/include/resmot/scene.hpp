#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "resmot/metrics.hpp"
#include "resmot/types.hpp"

namespace resmot {

/// Object population of a synthetic scene segment, defined relative to the
/// detectability floor of the synthetic detector:
///   Near  - detectable at every rung with at least 2x headroom,
///   Mid   - detectable at the two largest rungs only,
///   Far   - detectable at full resolution only,
///   Mixed - a blend of all three.
enum class SegmentKind { Near, Mid, Far, Mixed, Empty };

const char* to_string(SegmentKind k);
SegmentKind parse_segment_kind(const std::string& text);

struct SceneSegment {
  SegmentKind kind = SegmentKind::Near;
  int frames = 50;
};

struct SceneSpec {
  std::vector<Resolution> ladder;
  std::vector<SceneSegment> segments;
  double floor = 15.0;  // detector floor the height bands are derived from
  int near_objects = 5;
  int mid_objects = 5;
  int far_objects = 6;
  std::uint64_t seed = 7;
};

/// Height band (full-resolution pixels) used for a segment kind.
std::pair<double, double> height_band(SegmentKind kind, const SceneSpec& spec);

/// Renders a ground-truth sequence; frames are numbered from 1 and every
/// frame of every segment appears (possibly empty).
GtSequence generate_scene(const SceneSpec& spec);

/// Alternating near/far segments of `segment_frames` each.
SceneSpec near_far_scene(const std::vector<Resolution>& ladder, int total_frames,
                         int segment_frames, std::uint64_t seed = 7);

/// Repeating near, mid, far, mixed segments.
SceneSpec mixed_scene(const std::vector<Resolution>& ladder, int total_frames,
                      int segment_frames, std::uint64_t seed = 7);

/// Segment kind covering each 1-based frame of `spec`.
std::vector<SegmentKind> segment_kinds(const SceneSpec& spec);

/// Dense frame list [first, last] carrying the ground-truth objects.
/// When `last` is 0 the last annotated frame is used.
std::vector<Frame> frames_from_gt(const GtSequence& gt, const Resolution& full,
                                  const std::string& sequence_id, int first = 1, int last = 0);

/// Writes a sequence in MOTChallenge ground-truth form.
void write_mot_gt(std::ostream& out, const GtSequence& gt);

/// Rescales every box from `native` coordinates into `full`.
GtSequence rescale(const GtSequence& gt, const Resolution& native, const Resolution& full);

}  // namespace resmot
