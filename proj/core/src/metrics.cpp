#include "resmot/metrics.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "resmot/hungarian.hpp"

namespace resmot {

FrameMatch match_frame(std::span<const GroundTruthObject> gt, std::span<const TrackedBox> preds,
                       MatchHistory& history, double iou_threshold) {
  FrameMatch out;
  std::vector<char> gt_used(gt.size(), 0), pred_used(preds.size(), 0);
  std::vector<std::pair<int, int>> idx_pairs;  // (gt index, pred index)

  for (std::size_t g = 0; g < gt.size(); ++g) {
    auto prev = history.previous_frame.find(gt[g].identity);
    if (prev == history.previous_frame.end()) continue;
    for (std::size_t p = 0; p < preds.size(); ++p) {
      if (pred_used[p] || preds[p].track_id != prev->second) continue;
      if (iou(gt[g].box, preds[p].box) >= iou_threshold) {
        gt_used[g] = pred_used[p] = 1;
        idx_pairs.emplace_back(static_cast<int>(g), static_cast<int>(p));
      }
      break;
    }
  }

  std::vector<int> gt_left, pred_left;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (!gt_used[g]) gt_left.push_back(static_cast<int>(g));
  }
  for (std::size_t p = 0; p < preds.size(); ++p) {
    if (!pred_used[p]) pred_left.push_back(static_cast<int>(p));
  }
  if (!gt_left.empty() && !pred_left.empty()) {
    CostMatrix cost(static_cast<int>(gt_left.size()), static_cast<int>(pred_left.size()));
    for (int r = 0; r < cost.rows(); ++r) {
      for (int c = 0; c < cost.cols(); ++c) {
        const double o = iou(gt[gt_left[r]].box, preds[pred_left[c]].box);
        cost(r, c) = o < iou_threshold ? kForbidden : 1.0 - o;
      }
    }
    const Assignment a = hungarian(cost);
    for (const auto& [r, c] : a.pairs()) idx_pairs.emplace_back(gt_left[r], pred_left[c]);
  }

  std::sort(idx_pairs.begin(), idx_pairs.end());
  history.previous_frame.clear();
  for (const auto& [g, p] : idx_pairs) {
    const int gid = gt[g].identity;
    const int tid = preds[p].track_id;
    auto last = history.last_matched.find(gid);
    if (last != history.last_matched.end() && last->second != tid) ++out.counts.idsw;
    history.last_matched[gid] = tid;
    history.previous_frame[gid] = tid;
    out.pairs.emplace_back(gid, tid);
  }
  out.counts.gt = static_cast<int>(gt.size());
  out.counts.matches = static_cast<int>(idx_pairs.size());
  out.counts.fn = out.counts.gt - out.counts.matches;
  out.counts.fp = static_cast<int>(preds.size()) - out.counts.matches;
  return out;
}

double mota(std::span<const FrameEvalCounts> counts) {
  long errors = 0, gt = 0;
  for (const auto& c : counts) {
    errors += static_cast<long>(c.fp) + c.fn + c.idsw;
    gt += c.gt;
  }
  if (gt == 0) throw Error("metrics", "MOTA undefined: sequence has no ground-truth boxes");
  return 1.0 - static_cast<double>(errors) / static_cast<double>(gt);
}

IdentityScores identity_scores(const GtSequence& gt, const ResultSequence& preds,
                               double iou_threshold) {
  std::map<int, int> gt_index, pred_index;
  long gt_total = 0, pred_total = 0;
  for (const auto& [f, objs] : gt) {
    for (const auto& o : objs) gt_index.emplace(o.identity, static_cast<int>(gt_index.size()));
    gt_total += static_cast<long>(objs.size());
  }
  for (const auto& [f, boxes] : preds) {
    for (const auto& b : boxes) pred_index.emplace(b.track_id, static_cast<int>(pred_index.size()));
    pred_total += static_cast<long>(boxes.size());
  }

  IdentityScores s;
  if (gt_total == 0 && pred_total == 0) return s;
  if (gt_total == 0 || pred_total == 0) {
    s.idfp = pred_total;
    s.idfn = gt_total;
    s.idf1 = 0.0;
    return s;
  }

  // co-occurrence counts of (gt id, track id) overlapping above threshold
  std::vector<std::vector<long>> overlap(gt_index.size(), std::vector<long>(pred_index.size(), 0));
  for (const auto& [f, objs] : gt) {
    auto it = preds.find(f);
    if (it == preds.end()) continue;
    for (const auto& o : objs) {
      for (const auto& b : it->second) {
        if (iou(o.box, b.box) >= iou_threshold) {
          ++overlap[gt_index.at(o.identity)][pred_index.at(b.track_id)];
        }
      }
    }
  }
  long max_overlap = 0;
  for (const auto& row : overlap) {
    for (long v : row) max_overlap = std::max(max_overlap, v);
  }
  CostMatrix cost(static_cast<int>(gt_index.size()), static_cast<int>(pred_index.size()));
  for (int r = 0; r < cost.rows(); ++r) {
    for (int c = 0; c < cost.cols(); ++c) {
      cost(r, c) = static_cast<double>(max_overlap - overlap[r][c]);
    }
  }
  const Assignment a = hungarian(cost);
  for (const auto& [r, c] : a.pairs()) s.idtp += overlap[r][c];
  s.idfn = gt_total - s.idtp;
  s.idfp = pred_total - s.idtp;
  s.idf1 = 2.0 * s.idtp / static_cast<double>(2 * s.idtp + s.idfp + s.idfn);
  return s;
}

double idf1(const GtSequence& gt, const ResultSequence& preds, double iou_threshold) {
  return identity_scores(gt, preds, iou_threshold).idf1;
}

std::vector<double> detection_rate(std::span<const int> dets_at_r,
                                   std::span<const int> dets_at_full) {
  if (dets_at_r.size() != dets_at_full.size()) {
    throw Error("metrics", "detection_rate: series lengths differ");
  }
  std::vector<double> out(dets_at_r.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = dets_at_full[i] == 0 ? 1.0
                                  : static_cast<double>(dets_at_r[i]) / dets_at_full[i];
  }
  return out;
}

std::pair<double, double> mt_ml(const GtSequence& gt, const std::map<int, int>& matched_frames) {
  std::map<int, int> lifespan;
  for (const auto& [f, objs] : gt) {
    for (const auto& o : objs) ++lifespan[o.identity];
  }
  if (lifespan.empty()) return {0.0, 0.0};
  int mt = 0, ml = 0;
  for (const auto& [id, frames] : lifespan) {
    auto it = matched_frames.find(id);
    const double covered = it == matched_frames.end() ? 0.0 : it->second;
    const double ratio = covered / frames;
    if (ratio > 0.8) ++mt;
    if (ratio < 0.2) ++ml;
  }
  const double n = static_cast<double>(lifespan.size());
  return {mt / n, ml / n};
}

SequenceReport evaluate_sequence(const GtSequence& gt, const ResultSequence& preds,
                                 double iou_threshold) {
  std::set<int> frames;
  for (const auto& [f, v] : gt) frames.insert(f);
  for (const auto& [f, v] : preds) frames.insert(f);

  SequenceReport rep;
  std::vector<FrameEvalCounts> counts;
  std::map<int, int> matched_frames;
  MatchHistory history;
  static const std::vector<GroundTruthObject> no_gt;
  static const std::vector<TrackedBox> no_preds;
  for (int f : frames) {
    auto g = gt.find(f);
    auto p = preds.find(f);
    const auto& gv = g == gt.end() ? no_gt : g->second;
    const auto& pv = p == preds.end() ? no_preds : p->second;
    const FrameMatch m = match_frame(gv, pv, history, iou_threshold);
    for (const auto& [gid, tid] : m.pairs) ++matched_frames[gid];
    counts.push_back(m.counts);
    rep.fp_total += m.counts.fp;
    rep.fn_total += m.counts.fn;
    rep.gt_total += m.counts.gt;
    rep.idsw_total += m.counts.idsw;
  }
  rep.frames = static_cast<int>(frames.size());
  rep.mota = mota(counts);
  rep.idf1 = idf1(gt, preds, iou_threshold);
  std::tie(rep.mt_ratio, rep.ml_ratio) = mt_ml(gt, matched_frames);
  std::set<int> ids;
  for (const auto& [f, objs] : gt) {
    for (const auto& o : objs) ids.insert(o.identity);
  }
  rep.gt_tracks = static_cast<int>(ids.size());
  return rep;
}

namespace {

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

// Resolution-keyed maps in ladder (area) order rather than string order.
std::vector<std::pair<std::string, double>> by_area(const std::map<std::string, double>& m) {
  std::vector<std::pair<std::string, double>> v(m.begin(), m.end());
  auto area = [](const std::string& s) {
    try {
      return parse_resolution(s).area();
    } catch (const Error&) {
      return 0L;
    }
  };
  std::stable_sort(v.begin(), v.end(),
                   [&](const auto& a, const auto& b) { return area(a.first) < area(b.first); });
  return v;
}

}  // namespace

void write_report_text(std::ostream& out, const SequenceReport& r) {
  auto row = [&](const std::string& k, const std::string& v) {
    out << std::left << std::setw(28) << k << std::right << std::setw(12) << v << '\n';
  };
  row("frames", std::to_string(r.frames));
  row("gt_boxes", std::to_string(r.gt_total));
  row("gt_tracks", std::to_string(r.gt_tracks));
  row("MOTA", fmt(r.mota));
  row("IDF1", fmt(r.idf1));
  row("MT", fmt(r.mt_ratio));
  row("ML", fmt(r.ml_ratio));
  row("IDSW", std::to_string(r.idsw_total));
  row("FP", std::to_string(r.fp_total));
  row("FN", std::to_string(r.fn_total));
  if (r.fps > 0.0) row("FPS(sim)", fmt(r.fps, 2));
  for (const auto& [res, v] : by_area(r.frame_mix)) row("mix[" + res + "]", fmt(100.0 * v, 2) + "%");
  for (const auto& [res, v] : by_area(r.detection_rate_per_resolution)) {
    row("detection_rate[" + res + "]", fmt(v));
  }
}

void write_report_kv(std::ostream& out, const SequenceReport& r) {
  out << "frames=" << r.frames << '\n'
      << "gt_boxes=" << r.gt_total << '\n'
      << "gt_tracks=" << r.gt_tracks << '\n'
      << "mota=" << fmt(r.mota, 6) << '\n'
      << "idf1=" << fmt(r.idf1, 6) << '\n'
      << "mt=" << fmt(r.mt_ratio, 6) << '\n'
      << "ml=" << fmt(r.ml_ratio, 6) << '\n'
      << "idsw=" << r.idsw_total << '\n'
      << "fp=" << r.fp_total << '\n'
      << "fn=" << r.fn_total << '\n';
  if (r.fps > 0.0) out << "fps_sim=" << fmt(r.fps, 4) << '\n';
  for (const auto& [res, v] : by_area(r.frame_mix)) out << "mix." << res << '=' << fmt(v, 6) << '\n';
  for (const auto& [res, v] : by_area(r.detection_rate_per_resolution)) {
    out << "detection_rate." << res << '=' << fmt(v, 6) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  return fields;
}

double field_double(const std::vector<std::string>& f, std::size_t i, const std::string& origin,
                    int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(f[i], &used);
    const auto rest = f[i].find_first_not_of(" \t\r", used);
    if (rest == std::string::npos && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw Error("metrics", origin + ": line " + std::to_string(line) + ": bad field " +
                             std::to_string(i + 1) + " '" + f[i] + "'");
}

int field_int(const std::vector<std::string>& f, std::size_t i, const std::string& origin,
              int line) {
  const double v = field_double(f, i, origin, line);
  if (v != std::floor(v) || std::fabs(v) > 1e9) {
    throw Error("metrics", origin + ": line " + std::to_string(line) + ": field " +
                               std::to_string(i + 1) + " is not an integer");
  }
  return static_cast<int>(v);
}

template <typename Fn>
void for_each_row(std::istream& in, const std::string& origin, Fn&& fn) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    auto fields = split_csv(line);
    if (fields.size() < 6) {
      throw Error("metrics", origin + ": line " + std::to_string(line_no) +
                                 ": expected at least 6 fields, got " +
                                 std::to_string(fields.size()));
    }
    fn(fields, line_no);
  }
}

}  // namespace

GtSequence parse_mot_gt(std::istream& in, const std::string& origin) {
  GtSequence seq;
  for_each_row(in, origin, [&](const std::vector<std::string>& f, int line) {
    const int frame = field_int(f, 0, origin, line);
    GroundTruthObject obj;
    obj.identity = field_int(f, 1, origin, line);
    obj.box = BoundingBox::from_tlwh(field_double(f, 2, origin, line),
                                     field_double(f, 3, origin, line),
                                     field_double(f, 4, origin, line),
                                     field_double(f, 5, origin, line));
    const double conf = f.size() > 6 ? field_double(f, 6, origin, line) : 1.0;
    const int cls = f.size() > 7 ? field_int(f, 7, origin, line) : -1;
    obj.visibility = f.size() > 8 ? field_double(f, 8, origin, line) : 1.0;
    if (conf == 0.0) return;
    if (cls != 1 && cls != -1) return;
    if (obj.identity < 0 || !obj.box.valid()) {
      throw Error("metrics", origin + ": line " + std::to_string(line) + ": invalid object");
    }
    obj.visibility = std::clamp(obj.visibility, 0.0, 1.0);
    seq[frame].push_back(obj);
  });
  return seq;
}

GtSequence load_mot_gt(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("metrics", "cannot open ground-truth file '" + path + "'");
  return parse_mot_gt(in, path);
}

ResultSequence parse_mot_results(std::istream& in, const std::string& origin) {
  ResultSequence seq;
  for_each_row(in, origin, [&](const std::vector<std::string>& f, int line) {
    const int frame = field_int(f, 0, origin, line);
    TrackedBox b;
    b.track_id = field_int(f, 1, origin, line);
    b.box = BoundingBox::from_tlwh(field_double(f, 2, origin, line),
                                   field_double(f, 3, origin, line),
                                   field_double(f, 4, origin, line),
                                   field_double(f, 5, origin, line));
    b.score = f.size() > 6 ? field_double(f, 6, origin, line) : 1.0;
    if (!b.box.valid()) {
      throw Error("metrics", origin + ": line " + std::to_string(line) + ": invalid box");
    }
    seq[frame].push_back(b);
  });
  return seq;
}

ResultSequence load_mot_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("metrics", "cannot open result file '" + path + "'");
  return parse_mot_results(in, path);
}

void write_mot_results(std::ostream& out, const ResultSequence& results) {
  char buf[160];
  for (const auto& [frame, boxes] : results) {
    for (const auto& b : boxes) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.3f,%.3f,%.3f,%.3f,%.4f,-1,-1,-1\n", frame,
                    b.track_id, b.box.left(), b.box.top(), b.box.w, b.box.h, b.score);
      out << buf;
    }
  }
}

}  // namespace resmot
