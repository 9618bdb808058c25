#pragma once

#include <span>
#include <utility>
#include <vector>

#include "resmot/hungarian.hpp"
#include "resmot/kalman.hpp"
#include "resmot/types.hpp"

namespace resmot {

enum class TrackStatus { Tentative, Active, Lost, Removed };

const char* to_string(TrackStatus s);

struct Track {
  int track_id = 0;
  KalmanState state;
  Embedding smoothed_embedding;
  TrackStatus status = TrackStatus::Tentative;
  int last_update_frame = 0;
  int hit_count = 0;
  int miss_count = 0;
  double score = 0.0;

  BoundingBox box() const { return state.box(); }
};

struct AssociationConfig {
  double appearance_gate = 0.4;  // max cosine distance
  double iou_gate = 0.3;         // min IoU
  double ema_alpha = 0.9;
  int max_miss = 30;
  int min_hits = 2;
  KalmanParams kalman;

  void validate() const;
};

enum class MatchStage { Appearance = 1, Overlap = 2 };

struct AssociationResult {
  struct Match {
    int track = 0;      // index into the track list
    int detection = 0;  // index into the detection list
    MatchStage stage = MatchStage::Appearance;
  };
  std::vector<Match> matches;
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
};

/// Two-stage cascade: appearance (cosine distance) first, then IoU against
/// the predicted boxes for whatever is left. Tracks must already be
/// predicted to the current frame.
AssociationResult associate(std::span<const Track> tracks, std::span<const Detection> detections,
                            const AssociationConfig& cfg);

struct TrackOutput {
  int frame_index = 0;
  int track_id = 0;
  BoundingBox box;
  double score = 0.0;
};

/// Tracking-by-detection state machine for one sequence.
class Tracker {
 public:
  explicit Tracker(AssociationConfig cfg = {});

  /// Advances to `frame_index` and returns the Active tracks updated on it.
  std::vector<TrackOutput> step(std::span<const Detection> detections, int frame_index);

  /// Tentative-phase boxes of tracks confirmed by the last step, so offline
  /// writers can emit a confirmed track from its first frame.
  const std::vector<TrackOutput>& last_backfill() const { return backfill_; }

  const std::vector<Track>& tracks() const { return tracks_; }
  const AssociationConfig& config() const { return cfg_; }
  const AssociationResult& last_association() const { return last_association_; }

 private:
  AssociationConfig cfg_;
  std::vector<Track> tracks_;
  std::vector<std::vector<TrackOutput>> pending_;  // parallel to tracks_
  std::vector<TrackOutput> backfill_;
  AssociationResult last_association_;
  int next_id_ = 1;
  int last_frame_ = 0;
  bool started_ = false;
};

}  // namespace resmot
