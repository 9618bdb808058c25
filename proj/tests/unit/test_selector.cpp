#include <gtest/gtest.h>

#include <random>

#include "../support/oracles.hpp"
#include "resmot/detector.hpp"
#include "resmot/selector.hpp"

using namespace resmot;

namespace {

Heatmap grid(std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows.begin()->size());
  Heatmap m(r, c);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) m.at(i, j++) = v;
    ++i;
  }
  return m;
}

// Stack whose candidate i has ratio exactly ratios[i] against a 10-cell full map.
HeatmapStack stack_with_ratios(const std::vector<double>& ratios) {
  Heatmap full(1, 10, 1.0);
  HeatmapStack s;
  for (double r : ratios) {
    Heatmap m(1, 10);
    const int on = static_cast<int>(std::lround(r * 10));
    for (int c = 0; c < on; ++c) m.at(0, c) = 1.0;
    s.push_back(m);
  }
  s.push_back(full);
  return s;
}

ResolutionPolicy four_rung(std::vector<std::optional<double>> th) {
  ResolutionPolicy p;
  p.ladder = {{64, 32, 0}, {96, 48, 1}, {128, 64, 2}, {192, 96, 3}};
  p.thresholds = std::move(th);
  return p;
}

HeatmapStack random_stack(std::mt19937& rng, int depth) {
  std::uniform_real_distribution<double> u(0, 1);
  std::bernoulli_distribution coin(0.3);
  HeatmapStack s;
  Heatmap full(4, 6);
  for (auto& v : full.values()) v = coin(rng) ? 0.4 + 0.6 * u(rng) : 0.4 * u(rng);
  for (int i = 0; i + 1 < depth; ++i) {
    Heatmap m(4, 6);
    const double keep = u(rng);
    for (std::size_t k = 0; k < m.size(); ++k) {
      m.values()[k] = u(rng) < keep ? full.values()[k] : 0.4 * u(rng);
    }
    s.push_back(m);
  }
  s.push_back(full);
  return s;
}

ResolutionPolicy random_policy(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  ResolutionPolicy p = ResolutionPolicy::preset("C1");
  // non-increasing thresholds with random exclusions
  std::vector<double> t(4);
  for (auto& v : t) v = std::round(u(rng) * 10) / 10;
  std::sort(t.rbegin(), t.rend());
  for (int i = 0; i < 4; ++i) {
    p.thresholds[i] = u(rng) < 0.2 ? std::nullopt : std::optional<double>(t[i]);
  }
  return p;
}

}  // namespace

TEST(Ratio, Examples) {
  const auto full = grid({{1, 0}, {0, 1}});
  EXPECT_DOUBLE_EQ(detectability_ratio(full, full, 0.4), 1.0);
  EXPECT_DOUBLE_EQ(detectability_ratio(grid({{1, 0}, {0, 0}}), full, 0.4), 0.5);
  EXPECT_DOUBLE_EQ(detectability_ratio(grid({{1, 0}, {0, 0}}), Heatmap(2, 2), 0.4), 1.0);
  EXPECT_THROW(detectability_ratio(Heatmap(2, 3), full, 0.4), Error);
}

TEST(Ratio, BinarizesAtTau) {
  const auto full = grid({{0.4, 0.39}, {0.9, 0.0}});
  const auto cand = grid({{0.41, 1.0}, {0.3, 0.0}});
  EXPECT_DOUBLE_EQ(detectability_ratio(cand, full, 0.4), 0.5);
}

TEST(Ratio, NeverAboveOne) {
  std::mt19937 rng(4);
  for (int t = 0; t < 200; ++t) {
    const auto s = random_stack(rng, 2);
    const double r = detectability_ratio(s[0], s[1], 0.4);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
  }
}

TEST(Select, AllZeroThresholdsPickSmallestEnabled) {
  auto p = four_rung({0.0, 0.0, 0.0});
  const auto s = stack_with_ratios({0.1, 0.2, 0.3});
  EXPECT_EQ(select_resolution(s, p).chosen.index, 0);
  p.thresholds[0] = std::nullopt;
  EXPECT_EQ(select_resolution(s, p).chosen.index, 1);
}

TEST(Select, FirstSatisfyingScan) {
  const auto p = four_rung({1.0, 0.6, 0.0});
  const auto d = select_resolution(stack_with_ratios({0.8, 0.7, 0.9}), p, 12);
  EXPECT_EQ(d.chosen.index, 1);
  ASSERT_EQ(d.ratios.size(), 3u);
  EXPECT_DOUBLE_EQ(d.ratios[0], 0.8);
  EXPECT_EQ(d.frame_index, 12);
  EXPECT_EQ(d.valid_until, 12 + p.interval_k - 1);
}

TEST(Select, C3FallsBackToFull) {
  const auto p = ResolutionPolicy::preset("C3");
  const auto d = select_resolution(stack_with_ratios({1.0, 1.0, 1.0, 0.9}), p);
  EXPECT_EQ(d.chosen.width, 1088);
  EXPECT_EQ(d.chosen.height, 608);
  EXPECT_EQ(select_resolution(stack_with_ratios({0, 0, 0, 1.0}), p).chosen.width, 864);
}

TEST(Select, AllZeroFullMapPicksSmallestEnabled) {
  for (const char* name : {"C1", "C2", "C3"}) {
    const auto p = ResolutionPolicy::preset(name);
    HeatmapStack s(5, Heatmap(4, 4));
    const int expected = std::string(name) == "C3" ? 3 : 0;
    EXPECT_EQ(select_resolution(s, p).chosen.index, expected) << name;
  }
}

TEST(Select, StackDepthMismatchThrows) {
  EXPECT_THROW(select_resolution(HeatmapStack(3, Heatmap(2, 2)), ResolutionPolicy::preset("C1")),
               Error);
}

TEST(Select, MatchesOracleAndIsThresholdMonotone) {
  std::mt19937 rng(21);
  for (int t = 0; t < 1000; ++t) {
    const auto s = random_stack(rng, 5);
    const auto p = random_policy(rng);
    const int chosen = select_resolution(s, p).chosen.index;
    EXPECT_EQ(chosen, oracle::first_satisfier(s, p));
    for (int i = 0; i < 4; ++i) {
      auto q = p;
      q.thresholds[i] = std::nullopt;
      EXPECT_GE(select_resolution(s, q).chosen.index, chosen);
      if (p.thresholds[i]) {
        q = p;
        q.thresholds[i] = std::min(1.0, *p.thresholds[i] + 0.3);
        EXPECT_GE(select_resolution(s, q).chosen.index, chosen);
      }
    }
  }
}

TEST(Select, PresetsOrderedOnFixedStacks) {
  std::mt19937 rng(8);
  const auto c1 = ResolutionPolicy::preset("C1");
  const auto c2 = ResolutionPolicy::preset("C2");
  const auto c3 = ResolutionPolicy::preset("C3");
  for (int t = 0; t < 500; ++t) {
    const auto s = random_stack(rng, 5);
    const int a = select_resolution(s, c1).chosen.index;
    const int b = select_resolution(s, c2).chosen.index;
    const int c = select_resolution(s, c3).chosen.index;
    EXPECT_LE(a, b);
    EXPECT_LE(b, c);
  }
}

TEST(Policy, PresetsAndValidation) {
  const auto c2 = ResolutionPolicy::preset("C2", 5);
  EXPECT_EQ(c2.interval_k, 5);
  EXPECT_EQ(c2.ladder.size(), 5u);
  EXPECT_DOUBLE_EQ(*c2.thresholds[3], 0.8);
  EXPECT_THROW(ResolutionPolicy::preset("C9"), Error);

  auto bad = c2;
  bad.thresholds[3] = 1.0;
  bad.thresholds[0] = 0.5;  // smaller rung demands less than a larger one
  EXPECT_THROW(bad.validate(), Error);
  bad = c2;
  bad.interval_k = 0;
  EXPECT_THROW(bad.validate(), Error);
  bad = c2;
  bad.thresholds.pop_back();
  EXPECT_THROW(bad.validate(), Error);
  bad = c2;
  bad.ladder[0].width = 578;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Policy, ParseAndRoundTrip) {
  const auto p = ResolutionPolicy::parse(
      "# custom\nladder = 576x320,640x352,1088x608\nthresholds = -, 0.9\nk = 7\ntau = 0.5\n");
  EXPECT_EQ(p.ladder.size(), 3u);
  EXPECT_FALSE(p.thresholds[0].has_value());
  EXPECT_DOUBLE_EQ(*p.thresholds[1], 0.9);
  EXPECT_EQ(p.interval_k, 7);
  EXPECT_DOUBLE_EQ(p.binarize_tau, 0.5);
  const auto q = ResolutionPolicy::parse(p.to_string());
  EXPECT_EQ(q.thresholds, p.thresholds);
  EXPECT_EQ(q.ladder, p.ladder);
  EXPECT_THROW(ResolutionPolicy::parse("thresholds = 1.0, x, 0\n"), Error);
}

namespace {

// Detector returning the same detections at every rung.
class ConstantDetector final : public Detector {
 public:
  ConstantDetector() { info_.ladder = default_ladder(); }
  const DetectorInfo& info() const override { return info_; }
  std::vector<Detection> detect(const Frame& f, const Resolution&) const override {
    std::vector<Detection> out;
    for (const auto& o : f.objects) out.push_back({o.box, 1.0, {}});
    return out;
  }

 private:
  DetectorInfo info_;
};

std::vector<Frame> frames(int n) {
  std::vector<Frame> out;
  for (int i = 0; i < n; ++i) {
    Frame f;
    f.frame_index = i;
    f.objects.push_back({1, {300, 300, 40, 100}, 1.0});
    out.push_back(f);
  }
  return out;
}

}  // namespace

TEST(Scheduler, DecisionCadence) {
  const ConstantDetector det;
  for (int k : {1, 3, 40}) {
    Scheduler s(ResolutionPolicy::preset("C1", k));
    int decisions = 0, at_chosen = 0;
    std::vector<int> decision_frames;
    for (const auto& f : frames(120)) {
      const auto sf = s.next(f, det);
      if (sf.decision_frame) {
        ++decisions;
        decision_frames.push_back(sf.frame_index);
        EXPECT_EQ(sf.working.index, 4);
        ASSERT_TRUE(sf.decision.has_value());
      } else {
        ++at_chosen;
        EXPECT_FALSE(sf.decision.has_value());
        EXPECT_EQ(sf.working.index, 0);  // identical stacks -> smallest rung
      }
    }
    EXPECT_EQ(decisions, (120 + k - 1) / k);
    if (k == 40) {
      EXPECT_EQ(decision_frames, (std::vector<int>{0, 40, 80}));
      EXPECT_EQ(at_chosen, 117);
    }
  }
}

TEST(Scheduler, RejectsOutOfOrderFrames) {
  const ConstantDetector det;
  Scheduler s(ResolutionPolicy::preset("C1", 4));
  auto fs = frames(3);
  s.next(fs[1], det);
  EXPECT_THROW(s.next(fs[0], det), Error);
  EXPECT_THROW(s.next(fs[1], det), Error);
}
