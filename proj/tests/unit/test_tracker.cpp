#include <gtest/gtest.h>

#include <random>
#include <set>

#include "resmot/tracker.hpp"

using namespace resmot;

namespace {

Embedding axis(int i, int dim = 8) {
  Embedding e(static_cast<std::size_t>(dim), 0.0f);
  e[static_cast<std::size_t>(i)] = 1.0f;
  return e;
}

Detection det(double cx, double cy, Embedding e, double h = 80) {
  return {{cx, cy, 0.4 * h, h}, 0.9, std::move(e)};
}

Track predicted_track(const BoundingBox& b, Embedding e, int id = 1) {
  Track t;
  t.track_id = id;
  t.state = kalman_predict(kalman_initiate(b));
  t.smoothed_embedding = std::move(e);
  t.status = TrackStatus::Active;
  return t;
}

}  // namespace

TEST(Associate, AppearanceMatch) {
  const std::vector<Track> tracks{predicted_track({100, 100, 32, 80}, axis(0))};
  const std::vector<Detection> dets{det(102, 101, axis(0))};
  const auto r = associate(tracks, dets, {});
  ASSERT_EQ(r.matches.size(), 1u);
  EXPECT_EQ(r.matches[0].stage, MatchStage::Appearance);
  EXPECT_TRUE(r.unmatched_tracks.empty());
  EXPECT_TRUE(r.unmatched_detections.empty());
}

TEST(Associate, OrthogonalEmbeddingFallsBackToIou) {
  const BoundingBox b{200, 150, 40, 100};
  const std::vector<Track> tracks{predicted_track(b, axis(0)), predicted_track({600, 300, 40, 100}, axis(1), 2)};
  BoundingBox shifted = tracks[0].box();
  shifted.cx += 1.0;  // IoU about 0.95 with the predicted box
  ASSERT_GT(iou(shifted, tracks[0].box()), 0.9);
  const std::vector<Detection> dets{{shifted, 0.8, axis(5)}};
  const auto r = associate(tracks, dets, {});
  ASSERT_EQ(r.matches.size(), 1u);
  EXPECT_EQ(r.matches[0].track, 0);
  EXPECT_EQ(r.matches[0].stage, MatchStage::Overlap);
  EXPECT_EQ(r.unmatched_tracks, (std::vector<int>{1}));
}

TEST(Associate, NoDetections) {
  const std::vector<Track> tracks{predicted_track({100, 100, 32, 80}, axis(0)),
                                  predicted_track({300, 100, 32, 80}, axis(1), 2)};
  const auto r = associate(tracks, std::vector<Detection>{}, {});
  EXPECT_TRUE(r.matches.empty());
  EXPECT_EQ(r.unmatched_tracks, (std::vector<int>{0, 1}));
}

TEST(Associate, GatesRespected) {
  const std::vector<Track> tracks{predicted_track({100, 100, 32, 80}, axis(0))};
  // orthogonal embedding and no overlap: nothing matches
  const std::vector<Detection> dets{det(500, 400, axis(1))};
  const auto r = associate(tracks, dets, {});
  EXPECT_TRUE(r.matches.empty());
  EXPECT_EQ(r.unmatched_detections, (std::vector<int>{0}));
}

TEST(Associate, OneToOneOnRandomInputs) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> pos(50, 600);
  std::uniform_int_distribution<int> ax(0, 3), count(0, 6);
  for (int t = 0; t < 200; ++t) {
    std::vector<Track> tracks;
    std::vector<Detection> dets;
    const int nt = count(rng), nd = count(rng);
    for (int i = 0; i < nt; ++i) tracks.push_back(predicted_track({pos(rng), pos(rng), 30, 70}, axis(ax(rng)), i + 1));
    for (int i = 0; i < nd; ++i) dets.push_back(det(pos(rng), pos(rng), axis(ax(rng)), 70));
    const auto r = associate(tracks, dets, {});
    std::set<int> ts, ds;
    for (const auto& m : r.matches) {
      EXPECT_TRUE(ts.insert(m.track).second);
      EXPECT_TRUE(ds.insert(m.detection).second);
    }
    for (int u : r.unmatched_tracks) EXPECT_TRUE(ts.insert(u).second);
    for (int u : r.unmatched_detections) EXPECT_TRUE(ds.insert(u).second);
    EXPECT_EQ(static_cast<int>(ts.size()), nt);
    EXPECT_EQ(static_cast<int>(ds.size()), nd);
  }
}

TEST(Tracker, LifecycleTrace) {
  Tracker tr;
  const std::vector<Detection> three{det(100, 100, axis(0)), det(300, 100, axis(1)),
                                     det(500, 100, axis(2))};
  EXPECT_TRUE(tr.step(three, 1).empty());
  EXPECT_EQ(tr.tracks().size(), 3u);
  for (const auto& t : tr.tracks()) EXPECT_EQ(t.status, TrackStatus::Tentative);

  const auto out = tr.step(three, 2);
  ASSERT_EQ(out.size(), 3u);
  std::set<int> ids;
  for (const auto& o : out) ids.insert(o.track_id);
  EXPECT_EQ(ids, (std::set<int>{1, 2, 3}));
  EXPECT_EQ(tr.last_backfill().size(), 3u);  // frame-1 boxes of the confirmed tracks
  for (const auto& b : tr.last_backfill()) EXPECT_EQ(b.frame_index, 1);
}

TEST(Tracker, RemovedAfterMaxMissAndNewIdOnReturn) {
  AssociationConfig cfg;
  cfg.max_miss = 5;
  Tracker tr(cfg);
  const std::vector<Detection> one{det(100, 100, axis(0))};
  tr.step(one, 1);
  tr.step(one, 2);
  int frame = 3;
  for (int i = 0; i < cfg.max_miss; ++i, ++frame) {
    tr.step(std::vector<Detection>{}, frame);
    ASSERT_EQ(tr.tracks().size(), 1u);
    EXPECT_EQ(tr.tracks()[0].status, TrackStatus::Lost);
  }
  tr.step(std::vector<Detection>{}, frame++);  // miss number max_miss + 1
  EXPECT_TRUE(tr.tracks().empty());
  tr.step(one, frame++);
  ASSERT_EQ(tr.tracks().size(), 1u);
  EXPECT_EQ(tr.tracks()[0].track_id, 2);
}

TEST(Tracker, LostTrackRecovered) {
  Tracker tr;
  const std::vector<Detection> one{det(100, 100, axis(0))};
  tr.step(one, 1);
  tr.step(one, 2);
  tr.step(std::vector<Detection>{}, 3);
  const auto out = tr.step(one, 4);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].track_id, 1);
}

TEST(Tracker, TentativeDroppedOnFirstMiss) {
  Tracker tr;
  tr.step(std::vector<Detection>{det(100, 100, axis(0))}, 1);
  tr.step(std::vector<Detection>{}, 2);
  EXPECT_TRUE(tr.tracks().empty());
}

TEST(Tracker, RejectsNonIncreasingFrames) {
  Tracker tr;
  tr.step(std::vector<Detection>{}, 5);
  EXPECT_THROW(tr.step(std::vector<Detection>{}, 5), Error);
  EXPECT_THROW(tr.step(std::vector<Detection>{}, 4), Error);
}

TEST(Tracker, EmbeddingStaysUnitNorm) {
  Tracker tr;
  std::mt19937 rng(6);
  std::normal_distribution<float> n(0, 0.3f);
  for (int f = 1; f <= 20; ++f) {
    Embedding e = axis(0, 16);
    for (auto& x : e) x += n(rng);
    normalize(e);
    tr.step(std::vector<Detection>{det(100 + f, 100, e)}, f);
    ASSERT_EQ(tr.tracks().size(), 1u);
    double norm = 0.0;
    for (float x : tr.tracks()[0].smoothed_embedding) norm += x * x;
    EXPECT_NEAR(norm, 1.0, 1e-5);
  }
}

TEST(Tracker, Deterministic) {
  std::vector<std::vector<Detection>> stream;
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> jitter(-2, 2);
  for (int f = 0; f < 30; ++f) {
    std::vector<Detection> d;
    for (int k = 0; k < 4; ++k) {
      if ((f + k) % 7 == 0) continue;
      d.push_back(det(100 + 120 * k + 2 * f + jitter(rng), 200 + jitter(rng), axis(k)));
    }
    stream.push_back(d);
  }
  auto run = [&] {
    Tracker tr;
    std::vector<std::tuple<int, int, double, double>> out;
    for (int f = 0; f < 30; ++f) {
      for (const auto& o : tr.step(stream[f], f + 1)) out.emplace_back(o.frame_index, o.track_id, o.box.cx, o.box.cy);
    }
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(AssociationConfig, Validation) {
  AssociationConfig c;
  c.appearance_gate = 3.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.iou_gate = -0.1;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.min_hits = 0;
  EXPECT_THROW(c.validate(), Error);
}
