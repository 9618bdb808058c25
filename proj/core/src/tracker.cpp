#include "resmot/tracker.hpp"

#include <algorithm>
#include <cmath>

namespace resmot {

const char* to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::Tentative:
      return "tentative";
    case TrackStatus::Active:
      return "active";
    case TrackStatus::Lost:
      return "lost";
    case TrackStatus::Removed:
      return "removed";
  }
  return "?";
}

void AssociationConfig::validate() const {
  if (!(appearance_gate >= 0.0 && appearance_gate <= 2.0)) {
    throw Error("tracker", "appearance_gate must lie in [0,2]");
  }
  if (!(iou_gate >= 0.0 && iou_gate <= 1.0)) throw Error("tracker", "iou_gate must lie in [0,1]");
  if (!(ema_alpha >= 0.0 && ema_alpha <= 1.0)) throw Error("tracker", "ema_alpha must lie in [0,1]");
  if (max_miss < 0 || min_hits < 1) throw Error("tracker", "bad track lifecycle limits");
}

AssociationResult associate(std::span<const Track> tracks, std::span<const Detection> detections,
                            const AssociationConfig& cfg) {
  AssociationResult res;
  std::vector<int> track_left, det_left;
  for (int i = 0; i < static_cast<int>(tracks.size()); ++i) track_left.push_back(i);
  for (int j = 0; j < static_cast<int>(detections.size()); ++j) det_left.push_back(j);

  auto solve = [&](MatchStage stage, auto&& cost_of) {
    if (track_left.empty() || det_left.empty()) return;
    CostMatrix cost(static_cast<int>(track_left.size()), static_cast<int>(det_left.size()));
    for (int r = 0; r < cost.rows(); ++r) {
      for (int c = 0; c < cost.cols(); ++c) {
        cost(r, c) = cost_of(tracks[track_left[r]], detections[det_left[c]]);
      }
    }
    const Assignment a = hungarian(cost);
    std::vector<char> det_used(det_left.size(), 0);
    std::vector<int> still_tracks;
    for (int r = 0; r < cost.rows(); ++r) {
      const int c = a.row_to_col[r];
      if (c < 0) {
        still_tracks.push_back(track_left[r]);
        continue;
      }
      res.matches.push_back({track_left[r], det_left[c], stage});
      det_used[c] = 1;
    }
    std::vector<int> still_dets;
    for (std::size_t c = 0; c < det_left.size(); ++c) {
      if (!det_used[c]) still_dets.push_back(det_left[c]);
    }
    track_left = std::move(still_tracks);
    det_left = std::move(still_dets);
  };

  solve(MatchStage::Appearance, [&](const Track& t, const Detection& d) {
    if (t.smoothed_embedding.empty() || d.embedding.empty()) return kForbidden;
    const double dist = 1.0 - cosine_similarity(t.smoothed_embedding, d.embedding);
    return dist > cfg.appearance_gate ? kForbidden : dist;
  });
  solve(MatchStage::Overlap, [&](const Track& t, const Detection& d) {
    const double o = iou(t.box(), d.box);
    return o < cfg.iou_gate ? kForbidden : 1.0 - o;
  });

  res.unmatched_tracks = std::move(track_left);
  res.unmatched_detections = std::move(det_left);
  std::sort(res.unmatched_tracks.begin(), res.unmatched_tracks.end());
  std::sort(res.unmatched_detections.begin(), res.unmatched_detections.end());
  return res;
}

Tracker::Tracker(AssociationConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::vector<TrackOutput> Tracker::step(std::span<const Detection> detections, int frame_index) {
  if (started_ && frame_index <= last_frame_) {
    throw Error("tracker", "frame index " + std::to_string(frame_index) +
                               " is not after " + std::to_string(last_frame_));
  }
  const int dt = started_ ? frame_index - last_frame_ : 1;
  started_ = true;
  last_frame_ = frame_index;
  backfill_.clear();

  for (auto& t : tracks_) {
    for (int i = 0; i < dt; ++i) t.state = kalman_predict(t.state, cfg_.kalman);
  }

  last_association_ = associate(tracks_, detections, cfg_);

  for (const auto& m : last_association_.matches) {
    Track& t = tracks_[m.track];
    const Detection& d = detections[m.detection];
    t.state = kalman_update(t.state, d.box, cfg_.kalman);
    if (!d.embedding.empty()) {
      if (t.smoothed_embedding.size() != d.embedding.size()) {
        t.smoothed_embedding = d.embedding;
      } else {
        for (std::size_t k = 0; k < d.embedding.size(); ++k) {
          t.smoothed_embedding[k] = static_cast<float>(cfg_.ema_alpha * t.smoothed_embedding[k] +
                                                       (1.0 - cfg_.ema_alpha) * d.embedding[k]);
        }
      }
      normalize(t.smoothed_embedding);
    }
    t.score = d.score;
    t.last_update_frame = frame_index;
    ++t.hit_count;
    t.miss_count = 0;
    const bool was_tentative = t.status == TrackStatus::Tentative;
    if (t.hit_count >= cfg_.min_hits) {
      t.status = TrackStatus::Active;
    } else if (t.status == TrackStatus::Lost) {
      t.status = TrackStatus::Tentative;
    }
    auto& pending = pending_[m.track];
    if (was_tentative && t.status == TrackStatus::Active) {
      backfill_.insert(backfill_.end(), pending.begin(), pending.end());
      pending.clear();
    } else if (t.status == TrackStatus::Tentative) {
      pending.push_back({frame_index, t.track_id, t.box(), t.score});
    }
  }

  for (int idx : last_association_.unmatched_tracks) {
    Track& t = tracks_[idx];
    ++t.miss_count;
    if (t.status == TrackStatus::Tentative || t.miss_count > cfg_.max_miss) {
      t.status = TrackStatus::Removed;
    } else {
      t.status = TrackStatus::Lost;
    }
  }

  for (int idx : last_association_.unmatched_detections) {
    const Detection& d = detections[idx];
    Track t;
    t.track_id = next_id_++;
    t.state = kalman_initiate(d.box, cfg_.kalman);
    t.smoothed_embedding = d.embedding;
    normalize(t.smoothed_embedding);
    t.last_update_frame = frame_index;
    t.hit_count = 1;
    t.score = d.score;
    t.status = t.hit_count >= cfg_.min_hits ? TrackStatus::Active : TrackStatus::Tentative;
    tracks_.push_back(std::move(t));
    pending_.emplace_back();
    if (tracks_.back().status == TrackStatus::Tentative) {
      pending_.back().push_back({frame_index, tracks_.back().track_id, d.box, d.score});
    }
  }

  std::vector<TrackOutput> out;
  for (const auto& t : tracks_) {
    if (t.status == TrackStatus::Active && t.last_update_frame == frame_index) {
      out.push_back({frame_index, t.track_id, t.box(), t.score});
    }
  }

  std::size_t keep = 0;
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    if (tracks_[i].status == TrackStatus::Removed) continue;
    if (keep != i) {
      tracks_[keep] = std::move(tracks_[i]);
      pending_[keep] = std::move(pending_[i]);
    }
    ++keep;
  }
  tracks_.resize(keep);
  pending_.resize(keep);
  return out;
}

}  // namespace resmot
