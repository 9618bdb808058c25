#include "resmot/scene.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <random>

namespace resmot {

namespace {

constexpr double kAspect = 0.41;  // pedestrian w/h

double speed_for(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::Near:
      return 1.5;
    case SegmentKind::Mid:
      return 0.8;
    default:
      return 0.4;
  }
}

struct Mover {
  int identity;
  double cx, cy, w, h, vx, vy;
};

}  // namespace

const char* to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::Near:
      return "near";
    case SegmentKind::Mid:
      return "mid";
    case SegmentKind::Far:
      return "far";
    case SegmentKind::Mixed:
      return "mixed";
    case SegmentKind::Empty:
      return "empty";
  }
  return "?";
}

SegmentKind parse_segment_kind(const std::string& text) {
  for (auto k : {SegmentKind::Near, SegmentKind::Mid, SegmentKind::Far, SegmentKind::Mixed,
                 SegmentKind::Empty}) {
    if (text == to_string(k)) return k;
  }
  throw Error("scene", "unknown segment kind '" + text + "'");
}

std::pair<double, double> height_band(SegmentKind kind, const SceneSpec& spec) {
  if (spec.ladder.size() < 3) throw Error("scene", "scene generation needs at least 3 rungs");
  const double full_h = spec.ladder.back().height;
  auto scale = [&](std::size_t i) { return spec.ladder[i].height / full_h; };
  const std::size_t n = spec.ladder.size();
  const double f = spec.floor;
  switch (kind) {
    case SegmentKind::Near: {
      const double base = 2.0 * f / scale(0);
      return {1.1 * base, 2.0 * base};
    }
    case SegmentKind::Mid:
      return {1.04 * f / scale(n - 2), 0.96 * f / scale(n - 3)};
    case SegmentKind::Far:
      return {1.04 * f, 0.96 * f / scale(n - 2)};
    default:
      throw Error("scene", "segment kind has no single height band");
  }
}

GtSequence generate_scene(const SceneSpec& spec) {
  if (spec.ladder.empty()) throw Error("scene", "scene needs a ladder");
  const Resolution& full = spec.ladder.back();
  std::mt19937_64 rng(spec.seed);
  GtSequence gt;
  int next_id = 1;
  int frame = 1;

  for (const auto& seg : spec.segments) {
    if (seg.frames <= 0) throw Error("scene", "segment length must be positive");
    std::vector<std::pair<SegmentKind, int>> groups;
    switch (seg.kind) {
      case SegmentKind::Near:
        groups = {{SegmentKind::Near, spec.near_objects}};
        break;
      case SegmentKind::Mid:
        groups = {{SegmentKind::Mid, spec.mid_objects}};
        break;
      case SegmentKind::Far:
        groups = {{SegmentKind::Far, spec.far_objects}};
        break;
      case SegmentKind::Mixed:
        groups = {{SegmentKind::Near, std::max(1, spec.near_objects / 2)},
                  {SegmentKind::Mid, std::max(1, spec.mid_objects / 2)},
                  {SegmentKind::Far, std::max(1, spec.far_objects / 2)}};
        break;
      case SegmentKind::Empty:
        break;
    }

    std::vector<Mover> movers;
    for (const auto& [kind, count] : groups) {
      const auto [lo, hi] = height_band(kind, spec);
      std::uniform_real_distribution<double> height(lo, hi);
      const double v = speed_for(kind);
      std::uniform_real_distribution<double> vel(-v, v);
      for (int i = 0; i < count; ++i) {
        Mover m;
        m.identity = next_id++;
        m.h = height(rng);
        m.w = kAspect * m.h;
        std::uniform_real_distribution<double> x(m.w, full.width - m.w);
        std::uniform_real_distribution<double> y(m.h, full.height - m.h);
        m.cx = x(rng);
        m.cy = y(rng);
        m.vx = vel(rng);
        m.vy = 0.3 * vel(rng);
        movers.push_back(m);
      }
    }

    for (int t = 0; t < seg.frames; ++t, ++frame) {
      auto& objs = gt[frame];
      for (auto& m : movers) {
        objs.push_back({m.identity, {m.cx, m.cy, m.w, m.h}, 1.0});
        m.cx += m.vx;
        m.cy += m.vy;
        if (m.cx < 0.5 * m.w || m.cx > full.width - 0.5 * m.w) m.vx = -m.vx;
        if (m.cy < 0.5 * m.h || m.cy > full.height - 0.5 * m.h) m.vy = -m.vy;
      }
    }
  }
  return gt;
}

SceneSpec near_far_scene(const std::vector<Resolution>& ladder, int total_frames,
                         int segment_frames, std::uint64_t seed) {
  SceneSpec s;
  s.ladder = ladder;
  s.seed = seed;
  for (int done = 0, i = 0; done < total_frames; ++i) {
    const int len = std::min(segment_frames, total_frames - done);
    s.segments.push_back({i % 2 == 0 ? SegmentKind::Near : SegmentKind::Far, len});
    done += len;
  }
  return s;
}

SceneSpec mixed_scene(const std::vector<Resolution>& ladder, int total_frames, int segment_frames,
                      std::uint64_t seed) {
  static constexpr SegmentKind cycle[] = {SegmentKind::Near, SegmentKind::Mid, SegmentKind::Far,
                                          SegmentKind::Mixed};
  SceneSpec s;
  s.ladder = ladder;
  s.seed = seed;
  for (int done = 0, i = 0; done < total_frames; ++i) {
    const int len = std::min(segment_frames, total_frames - done);
    s.segments.push_back({cycle[i % 4], len});
    done += len;
  }
  return s;
}

std::vector<SegmentKind> segment_kinds(const SceneSpec& spec) {
  std::vector<SegmentKind> kinds;
  for (const auto& seg : spec.segments) kinds.insert(kinds.end(), seg.frames, seg.kind);
  return kinds;
}

std::vector<Frame> frames_from_gt(const GtSequence& gt, const Resolution& full,
                                  const std::string& sequence_id, int first, int last) {
  if (last == 0) last = gt.empty() ? first - 1 : gt.rbegin()->first;
  std::vector<Frame> frames;
  for (int f = first; f <= last; ++f) {
    Frame fr;
    fr.sequence_id = sequence_id;
    fr.frame_index = f;
    fr.native_resolution = full;
    if (auto it = gt.find(f); it != gt.end()) fr.objects = it->second;
    frames.push_back(std::move(fr));
  }
  return frames;
}

void write_mot_gt(std::ostream& out, const GtSequence& gt) {
  char buf[160];
  for (const auto& [frame, objs] : gt) {
    for (const auto& o : objs) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.3f,%.3f,%.3f,%.3f,1,1,%.2f\n", frame, o.identity,
                    o.box.left(), o.box.top(), o.box.w, o.box.h, o.visibility);
      out << buf;
    }
  }
}

GtSequence rescale(const GtSequence& gt, const Resolution& native, const Resolution& full) {
  GtSequence out;
  for (const auto& [frame, objs] : gt) {
    auto& dst = out[frame];
    for (auto o : objs) {
      o.box = scale_box(o.box, native, full);
      dst.push_back(o);
    }
  }
  return out;
}

}  // namespace resmot
