#include <gtest/gtest.h>

#include <sstream>

#include "resmot/metrics.hpp"

using namespace resmot;

namespace {

GroundTruthObject gt_obj(int id, double cx, double cy = 100) { return {id, {cx, cy, 20, 50}, 1.0}; }
TrackedBox pred(int id, double cx, double cy = 100) { return {id, {cx, cy, 20, 50}, 1.0}; }

ResultSequence self_results(const GtSequence& gt) {
  ResultSequence r;
  for (const auto& [f, objs] : gt) {
    for (const auto& o : objs) r[f].push_back({o.identity, o.box, 1.0});
  }
  return r;
}

GtSequence line_gt(int ids, int frames) {
  GtSequence gt;
  for (int f = 1; f <= frames; ++f) {
    for (int i = 0; i < ids; ++i) gt[f].push_back(gt_obj(i + 1, 100.0 * (i + 1) + f, 200));
  }
  return gt;
}

}  // namespace

TEST(MatchFrame, PerfectFrame) {
  MatchHistory h;
  const std::vector<GroundTruthObject> g{gt_obj(1, 100), gt_obj(2, 300)};
  const std::vector<TrackedBox> p{pred(7, 100), pred(8, 300)};
  const auto m = match_frame(g, p, h);
  EXPECT_EQ(m.counts.fp, 0);
  EXPECT_EQ(m.counts.fn, 0);
  EXPECT_EQ(m.counts.idsw, 0);
  EXPECT_EQ(m.counts.gt, 2);
}

TEST(MatchFrame, FourCorrectOneSpurious) {
  MatchHistory h;
  std::vector<GroundTruthObject> g;
  std::vector<TrackedBox> p;
  for (int i = 0; i < 5; ++i) g.push_back(gt_obj(i, 100.0 * (i + 1)));
  for (int i = 0; i < 4; ++i) p.push_back(pred(10 + i, 100.0 * (i + 1)));
  p.push_back(pred(99, 900, 500));
  const auto m = match_frame(g, p, h);
  EXPECT_EQ(m.counts.fp, 1);
  EXPECT_EQ(m.counts.fn, 1);
  EXPECT_EQ(m.counts.gt, 5);
}

TEST(MatchFrame, IdChangeChargesOneSwitch) {
  MatchHistory h;
  const std::vector<GroundTruthObject> g{gt_obj(1, 100)};
  match_frame(g, std::vector<TrackedBox>{pred(1, 100)}, h);
  const auto m = match_frame(g, std::vector<TrackedBox>{pred(2, 100)}, h);
  EXPECT_EQ(m.counts.idsw, 1);
  const auto m3 = match_frame(g, std::vector<TrackedBox>{pred(2, 100)}, h);
  EXPECT_EQ(m3.counts.idsw, 0);
}

TEST(MatchFrame, CrossingSwapChargesTwo) {
  GtSequence gt;
  ResultSequence res;
  // A moves right, B moves left; they pass through each other at frame 3.
  for (int f = 1; f <= 5; ++f) {
    const double a = 100 + 50.0 * (f - 1), b = 300 - 50.0 * (f - 1);
    gt[f] = {gt_obj(1, a), gt_obj(2, b)};
    if (f < 3) {
      res[f] = {pred(1, a), pred(2, b)};
    } else {
      res[f] = {pred(1, b), pred(2, a)};  // tracker swaps identities at the crossing
    }
  }
  MatchHistory h;
  int idsw = 0;
  for (int f = 1; f <= 5; ++f) idsw += match_frame(gt[f], res[f], h).counts.idsw;
  EXPECT_EQ(idsw, 2);
  EXPECT_EQ(evaluate_sequence(gt, res).idsw_total, 2);
}

TEST(MatchFrame, CarryOverKeepsPreviousPair) {
  MatchHistory h;
  const std::vector<GroundTruthObject> g{gt_obj(1, 100)};
  match_frame(g, std::vector<TrackedBox>{pred(1, 100)}, h);
  // a second hypothesis fits slightly better, but the old pair is still valid
  const std::vector<TrackedBox> p{pred(1, 104), pred(2, 100)};
  const auto m = match_frame(g, p, h);
  EXPECT_EQ(m.counts.idsw, 0);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0].second, 1);
}

TEST(Mota, Examples) {
  EXPECT_DOUBLE_EQ(mota(std::vector<FrameEvalCounts>{{0, 0, 0, 5, 5}}), 1.0);
  EXPECT_DOUBLE_EQ(mota(std::vector<FrameEvalCounts>{{1, 2, 0, 5, 3}}), 0.4);
  EXPECT_LT(mota(std::vector<FrameEvalCounts>{{9, 0, 0, 3, 3}}), 0.0);
  EXPECT_THROW(mota(std::vector<FrameEvalCounts>{{1, 0, 0, 0, 0}}), Error);
}

TEST(Idf1, HalfCoveredTrajectory) {
  GtSequence gt;
  ResultSequence res;
  for (int f = 1; f <= 10; ++f) {
    gt[f] = {gt_obj(1, 100 + f)};
    if (f <= 5) res[f] = {pred(4, 100 + f)};
  }
  const auto s = identity_scores(gt, res);
  EXPECT_EQ(s.idtp, 5);
  EXPECT_EQ(s.idfn, 5);
  EXPECT_EQ(s.idfp, 0);
  EXPECT_NEAR(s.idf1, 2.0 / 3.0, 1e-9);
}

TEST(Idf1, EmptyCases) {
  EXPECT_DOUBLE_EQ(idf1({}, {}), 1.0);
  EXPECT_DOUBLE_EQ(idf1(line_gt(2, 3), {}), 0.0);
  EXPECT_DOUBLE_EQ(idf1({}, self_results(line_gt(2, 3))), 0.0);
}

TEST(Idf1, OneTrackPerTrajectory) {
  // one track follows GT 1 for 6 frames then GT 2 for 4 frames
  GtSequence gt = line_gt(2, 10);
  ResultSequence res;
  for (int f = 1; f <= 10; ++f) {
    const auto& target = gt[f][f <= 6 ? 0 : 1];
    res[f].push_back({1, target.box, 1.0});
  }
  const auto s = identity_scores(gt, res);
  EXPECT_EQ(s.idtp, 6);
  EXPECT_EQ(s.idfp, 4);
  EXPECT_EQ(s.idfn, 14);
}

TEST(Evaluate, SelfEvaluationIsPerfect) {
  const auto gt = line_gt(4, 20);
  const auto r = evaluate_sequence(gt, self_results(gt));
  EXPECT_DOUBLE_EQ(r.mota, 1.0);
  EXPECT_DOUBLE_EQ(r.idf1, 1.0);
  EXPECT_DOUBLE_EQ(r.mt_ratio, 1.0);
  EXPECT_DOUBLE_EQ(r.ml_ratio, 0.0);
  EXPECT_EQ(r.gt_tracks, 4);
  EXPECT_EQ(r.frames, 20);
}

TEST(Evaluate, EmptyGtIsAnError) {
  EXPECT_THROW(evaluate_sequence({}, {}), Error);
}

TEST(Evaluate, MotaNeverAboveOne) {
  const auto gt = line_gt(3, 10);
  auto res = self_results(gt);
  res[4].clear();
  res[7].push_back(pred(50, 900, 500));
  const auto r = evaluate_sequence(gt, res);
  EXPECT_LT(r.mota, 1.0);
  EXPECT_LE(r.mt_ratio + r.ml_ratio, 1.0);
}

TEST(DetectionRate, Examples) {
  const std::vector<int> full{4, 4, 0, 2};
  const std::vector<int> low{3, 4, 0, 2};
  const auto rate = detection_rate(low, full);
  EXPECT_EQ(rate, (std::vector<double>{0.75, 1.0, 1.0, 1.0}));
  for (double v : detection_rate(full, full)) EXPECT_EQ(v, 1.0);
  EXPECT_THROW(detection_rate(std::vector<int>{1}, full), Error);
}

TEST(MtMl, HandCount) {
  GtSequence gt;
  for (int f = 1; f <= 10; ++f) {
    for (int id = 1; id <= 10; ++id) gt[f].push_back(gt_obj(id, 50.0 * id));
  }
  std::map<int, int> matched;
  for (int id = 1; id <= 3; ++id) matched[id] = 9;
  for (int id = 4; id <= 5; ++id) matched[id] = 1;
  for (int id = 6; id <= 10; ++id) matched[id] = 5;
  const auto [mt, ml] = mt_ml(gt, matched);
  EXPECT_DOUBLE_EQ(mt, 0.3);
  EXPECT_DOUBLE_EQ(ml, 0.2);
}

TEST(MtMl, HalfCoveredCountsTowardNeither) {
  GtSequence gt;
  for (int f = 1; f <= 10; ++f) gt[f].push_back(gt_obj(1, 100));
  const auto [mt, ml] = mt_ml(gt, {{1, 5}});
  EXPECT_EQ(mt, 0.0);
  EXPECT_EQ(ml, 0.0);
}

TEST(MotGt, Parsing) {
  std::stringstream empty("");
  EXPECT_TRUE(parse_mot_gt(empty).empty());

  std::stringstream one("3,7,100,50,20,40,1,1,0.8\n");
  const auto gt = parse_mot_gt(one);
  ASSERT_EQ(gt.at(3).size(), 1u);
  const auto& o = gt.at(3)[0];
  EXPECT_EQ(o.identity, 7);
  EXPECT_DOUBLE_EQ(o.box.cx, 110.0);
  EXPECT_DOUBLE_EQ(o.box.cy, 70.0);
  EXPECT_DOUBLE_EQ(o.visibility, 0.8);

  std::stringstream skipped("3,7,100,50,20,40,0,1,0.8\n3,8,100,50,20,40,1,3,0.8\n4,9,1,1,5,5,1,-1,1\n");
  const auto g2 = parse_mot_gt(skipped);
  EXPECT_EQ(g2.count(3), 0u);
  EXPECT_EQ(g2.at(4).size(), 1u);

  std::stringstream bad("1,1,1,1,5,5,1,1,1\n1,2,x,1,5,5,1,1,1\n");
  try {
    parse_mot_gt(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(MotResults, RoundTrip) {
  ResultSequence r;
  r[1] = {{3, BoundingBox::from_tlwh(10, 20, 30, 40), 0.5}};
  r[2] = {{3, BoundingBox::from_tlwh(11, 21, 30, 40), 1.0}, {4, BoundingBox::from_tlwh(5, 5, 6, 7), 0.25}};
  std::stringstream ss;
  write_mot_results(ss, r);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "1,3,10.000,20.000,30.000,40.000,0.5000,-1,-1,-1");
  const auto back = parse_mot_results(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.at(2).size(), 2u);
  EXPECT_NEAR(back.at(2)[1].box.cx, 8.0, 1e-9);
}

TEST(Report, WritersListEveryField) {
  const auto gt = line_gt(2, 5);
  auto rep = evaluate_sequence(gt, self_results(gt));
  rep.frame_mix = {{"1088x608", 0.25}, {"576x320", 0.75}};
  std::stringstream text, kv;
  write_report_text(text, rep);
  write_report_kv(kv, rep);
  EXPECT_NE(text.str().find("MOTA"), std::string::npos);
  EXPECT_NE(kv.str().find("mota=1.000000"), std::string::npos);
  EXPECT_NE(kv.str().find("idf1=1.000000"), std::string::npos);
  // ladder order, smallest first
  EXPECT_LT(kv.str().find("mix.576x320"), kv.str().find("mix.1088x608"));
}
