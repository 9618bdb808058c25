#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "resmot/types.hpp"

namespace resmot {

/// A tracker hypothesis in one frame.
struct TrackedBox {
  int track_id = 0;
  BoundingBox box;
  double score = 1.0;
};

using GtSequence = std::map<int, std::vector<GroundTruthObject>>;
using ResultSequence = std::map<int, std::vector<TrackedBox>>;

struct FrameEvalCounts {
  int fp = 0;
  int fn = 0;
  int idsw = 0;
  int gt = 0;
  int matches = 0;
};

struct FrameMatch {
  std::vector<std::pair<int, int>> pairs;  // (gt identity, track id)
  FrameEvalCounts counts;
};

/// Matching state carried between frames of one sequence.
struct MatchHistory {
  std::map<int, int> previous_frame;  // gt identity -> track id matched last frame
  std::map<int, int> last_matched;    // gt identity -> most recent track id ever matched
};

/// CLEAR-MOT frame matching: last frame's pairs are kept while their IoU
/// clears the threshold, the rest are solved by minimum-cost matching on
/// 1 - IoU. An identity switch is charged when a GT object's track id
/// differs from the one it was last matched to. Updates `history`.
FrameMatch match_frame(std::span<const GroundTruthObject> gt, std::span<const TrackedBox> preds,
                       MatchHistory& history, double iou_threshold = 0.5);

/// 1 - sum(fp + fn + idsw) / sum(gt). Throws when sum(gt) == 0.
double mota(std::span<const FrameEvalCounts> counts);

struct IdentityScores {
  long idtp = 0;
  long idfp = 0;
  long idfn = 0;
  double idf1 = 1.0;
};

/// Identity F1 under the optimal one-to-one trajectory assignment.
IdentityScores identity_scores(const GtSequence& gt, const ResultSequence& preds,
                               double iou_threshold = 0.5);
double idf1(const GtSequence& gt, const ResultSequence& preds, double iou_threshold = 0.5);

/// Per-frame count_r / count_full; 1 where count_full is 0.
std::vector<double> detection_rate(std::span<const int> dets_at_r, std::span<const int> dets_at_full);

/// Fraction of GT trajectories tracked for more than 80% / less than 20% of
/// their lifespan. `matched_frames[id]` counts frames where `id` was matched.
std::pair<double, double> mt_ml(const GtSequence& gt, const std::map<int, int>& matched_frames);

struct SequenceReport {
  double mota = 0.0;
  double idf1 = 0.0;
  double mt_ratio = 0.0;
  double ml_ratio = 0.0;
  int idsw_total = 0;
  long fp_total = 0;
  long fn_total = 0;
  long gt_total = 0;
  int gt_tracks = 0;
  int frames = 0;
  double fps = 0.0;  // simulated, 0 when not measured
  std::map<std::string, double> detection_rate_per_resolution;
  std::map<std::string, double> frame_mix;  // resolution -> share of frames
};

/// Full CLEAR-MOT + identity evaluation of one sequence. Frames present in
/// either input are evaluated in order.
SequenceReport evaluate_sequence(const GtSequence& gt, const ResultSequence& preds,
                                 double iou_threshold = 0.5);

/// Aligned two-column text.
void write_report_text(std::ostream& out, const SequenceReport& report);
/// Machine-readable key=value lines.
void write_report_kv(std::ostream& out, const SequenceReport& report);

// MOTChallenge text formats.

/// Ground truth: frame,id,left,top,w,h,conf,class,visibility. Rows with
/// conf == 0 or a non-pedestrian class are dropped.
GtSequence parse_mot_gt(std::istream& in, const std::string& origin = "<gt>");
GtSequence load_mot_gt(const std::string& path);

/// Tracker output: frame,id,left,top,w,h,score,-1,-1,-1.
ResultSequence parse_mot_results(std::istream& in, const std::string& origin = "<results>");
ResultSequence load_mot_results(const std::string& path);
void write_mot_results(std::ostream& out, const ResultSequence& results);

}  // namespace resmot
