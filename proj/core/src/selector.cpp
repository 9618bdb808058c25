#include "resmot/selector.hpp"

#include <cmath>
#include <sstream>

#include "resmot/config.hpp"
#include "resmot/detector.hpp"

namespace resmot {

std::vector<Resolution> default_ladder() {
  return {{576, 320, 0}, {640, 352, 1}, {704, 384, 2}, {864, 480, 3}, {1088, 608, 4}};
}

void ResolutionPolicy::validate() const {
  if (ladder.empty()) throw Error("selector", "policy ladder is empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const auto& r = ladder[i];
    if (r.width <= 0 || r.height <= 0) throw Error("selector", "non-positive resolution");
    if (r.width % kHeatmapStride != 0 || r.height % kHeatmapStride != 0) {
      throw Error("selector", r.to_string() + " is not divisible by the heatmap stride");
    }
    if (r.index != static_cast<int>(i)) throw Error("selector", "ladder index out of order");
    if (i > 0 && r.area() <= ladder[i - 1].area()) {
      throw Error("selector", "ladder must be strictly increasing in area");
    }
  }
  if (thresholds.size() + 1 != ladder.size()) {
    throw Error("selector", "expected " + std::to_string(ladder.size() - 1) + " thresholds, got " +
                                std::to_string(thresholds.size()));
  }
  std::optional<double> prev;
  for (const auto& t : thresholds) {
    if (!t) continue;
    if (!(*t >= 0.0 && *t <= 1.0)) throw Error("selector", "threshold outside [0,1]");
    if (prev && *t > *prev) {
      throw Error("selector", "thresholds must be non-increasing as resolution grows");
    }
    prev = t;
  }
  if (interval_k < 1) throw Error("selector", "interval K must be >= 1");
  if (!(binarize_tau >= 0.0 && binarize_tau <= 1.0)) {
    throw Error("selector", "binarize tau outside [0,1]");
  }
}

ResolutionPolicy ResolutionPolicy::preset(const std::string& name, int interval_k) {
  ResolutionPolicy p;
  p.ladder = default_ladder();
  p.interval_k = interval_k;
  // columns: 576x320, 640x352, 704x384, 864x480
  if (name == "C1") {
    p.thresholds = {1.0, 1.0, 0.0, 0.0};
  } else if (name == "C2") {
    p.thresholds = {1.0, 1.0, 1.0, 0.8};
  } else if (name == "C3") {
    p.thresholds = {std::nullopt, std::nullopt, std::nullopt, 1.0};
  } else {
    throw Error("selector", "unknown policy preset '" + name + "'");
  }
  p.validate();
  return p;
}

namespace {

ResolutionPolicy from_config(const KeyValueConfig& cfg) {
  ResolutionPolicy p;
  p.ladder = parse_ladder(cfg.get("ladder", ladder_to_string(default_ladder())));
  std::stringstream ss(cfg.get("thresholds"));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    item = b == std::string::npos ? "" : item.substr(b, e - b + 1);
    if (item == "-") {
      p.thresholds.push_back(std::nullopt);
      continue;
    }
    try {
      std::size_t used = 0;
      p.thresholds.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error("selector", cfg.origin() + ": bad threshold '" + item + "'");
    }
  }
  p.interval_k = static_cast<int>(cfg.get_int("k", 40));
  p.binarize_tau = cfg.get_double("tau", 0.4);
  p.raw_ratio = cfg.get_bool("raw", false);
  p.validate();
  return p;
}

}  // namespace

ResolutionPolicy ResolutionPolicy::parse(const std::string& text) {
  return from_config(KeyValueConfig::parse(text, "<policy>"));
}

ResolutionPolicy ResolutionPolicy::load(const std::string& path_or_preset,
                                        int interval_k_override) {
  ResolutionPolicy p;
  if (path_or_preset == "C1" || path_or_preset == "C2" || path_or_preset == "C3") {
    p = preset(path_or_preset);
  } else {
    p = from_config(KeyValueConfig::load(path_or_preset));
  }
  if (interval_k_override > 0) p.interval_k = interval_k_override;
  p.validate();
  return p;
}

std::string ResolutionPolicy::to_string() const {
  std::ostringstream out;
  out << "ladder = " << ladder_to_string(ladder) << '\n' << "thresholds = ";
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (i) out << ',';
    if (thresholds[i]) {
      out << *thresholds[i];
    } else {
      out << '-';
    }
  }
  out << '\n'
      << "k = " << interval_k << '\n'
      << "tau = " << binarize_tau << '\n'
      << "raw = " << (raw_ratio ? "true" : "false") << '\n';
  return out.str();
}

double detectability_ratio(const Heatmap& candidate, const Heatmap& full, double binarize_tau) {
  if (!candidate.same_shape(full)) throw Error("selector", "heatmap dimension mismatch");
  const auto c = candidate.values();
  const auto f = full.values();
  long overlap = 0, active = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] >= binarize_tau) {
      ++active;
      if (c[i] >= binarize_tau) ++overlap;
    }
  }
  if (active == 0) return 1.0;
  return static_cast<double>(overlap) / static_cast<double>(active);
}

double raw_detectability_ratio(const Heatmap& candidate, const Heatmap& full) {
  if (!candidate.same_shape(full)) throw Error("selector", "heatmap dimension mismatch");
  const auto c = candidate.values();
  const auto f = full.values();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    num += c[i] * f[i];
    den += f[i];
  }
  if (den == 0.0) return 1.0;
  return num / den;
}

SelectionDecision select_resolution(const HeatmapStack& stack, const ResolutionPolicy& policy,
                                    int frame_index) {
  if (stack.size() != policy.ladder.size()) {
    throw Error("selector", "heatmap stack depth " + std::to_string(stack.size()) +
                                " does not match ladder size " +
                                std::to_string(policy.ladder.size()));
  }
  SelectionDecision d;
  d.frame_index = frame_index;
  d.valid_until = frame_index + policy.interval_k - 1;
  d.chosen = policy.full();
  const Heatmap& full = stack.back();
  bool found = false;
  for (std::size_t i = 0; i + 1 < stack.size(); ++i) {
    const double ratio = policy.raw_ratio ? raw_detectability_ratio(stack[i], full)
                                          : detectability_ratio(stack[i], full, policy.binarize_tau);
    d.ratios.push_back(ratio);
    const auto& t = policy.thresholds[i];
    if (!found && t && ratio >= *t) {
      d.chosen = policy.ladder[i];
      found = true;
    }
  }
  return d;
}

Scheduler::Scheduler(ResolutionPolicy policy) : policy_(std::move(policy)) {
  policy_.validate();
  current_ = policy_.full();
}

ScheduledFrame Scheduler::next(const Frame& frame, const Detector& detector) {
  if (position_ > 0 && frame.frame_index <= last_frame_index_) {
    throw Error("selector", "frame " + std::to_string(frame.frame_index) +
                                " is not after frame " + std::to_string(last_frame_index_));
  }
  ScheduledFrame out;
  out.frame_index = frame.frame_index;
  if (next_is_decision()) {
    out.decision_frame = true;
    out.working = policy_.full();
    out.decision = select_resolution(detector.predict_stack(frame), policy_, frame.frame_index);
    current_ = out.decision->chosen;
  } else {
    out.working = current_;
  }
  out.detections = detector.detect(frame, out.working);
  last_frame_index_ = frame.frame_index;
  ++position_;
  return out;
}

}  // namespace resmot
