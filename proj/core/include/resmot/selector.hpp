#pragma once

#include <optional>
#include <string>
#include <vector>

#include "resmot/heatmap.hpp"
#include "resmot/types.hpp"

namespace resmot {

class Detector;

/// Default ladder: 576x320 .. 1088x608.
std::vector<Resolution> default_ladder();

/// Candidate ladder, per-candidate thresholds and adaptation interval.
///
/// `thresholds[i]` applies to `ladder[i]` for every non-full entry; an empty
/// optional marks the candidate as excluded. The last ladder entry is the
/// full resolution and carries no threshold.
struct ResolutionPolicy {
  std::vector<Resolution> ladder;
  std::vector<std::optional<double>> thresholds;
  int interval_k = 40;
  double binarize_tau = 0.4;
  bool raw_ratio = false;

  const Resolution& full() const { return ladder.back(); }

  /// Throws resmot::Error when an invariant is broken.
  void validate() const;

  /// Built-in threshold sets "C1", "C2", "C3" on the default ladder.
  static ResolutionPolicy preset(const std::string& name, int interval_k = 40);

  /// Plain key=value text: ladder, thresholds ("-" = excluded), k, tau, raw.
  static ResolutionPolicy parse(const std::string& text);
  static ResolutionPolicy load(const std::string& path_or_preset, int interval_k_override = 0);
  std::string to_string() const;
};

struct SelectionDecision {
  Resolution chosen;
  std::vector<double> ratios;  // one per non-full candidate
  int frame_index = 0;
  int valid_until = 0;
};

/// Overlap of the candidate map with the full-resolution map, both binarized
/// at `binarize_tau`. Returns 1 when the full map has no active cell.
double detectability_ratio(const Heatmap& candidate, const Heatmap& full, double binarize_tau);

/// Same ratio on the continuous maps (sum of products over sum of full).
double raw_detectability_ratio(const Heatmap& candidate, const Heatmap& full);

/// Smallest non-excluded candidate whose ratio meets its threshold, else full.
SelectionDecision select_resolution(const HeatmapStack& stack, const ResolutionPolicy& policy,
                                    int frame_index = 0);

/// One scheduled frame: where it is tracked and, on decision frames, the
/// decision made from its heatmap stack.
struct ScheduledFrame {
  int frame_index = 0;
  Resolution working;
  bool decision_frame = false;
  std::optional<SelectionDecision> decision;
  std::vector<Detection> detections;
};

/// Every-K-frames adaptation loop over one ordered frame stream. Decisions
/// happen on stream positions 0, K, 2K, ...; decision frames are tracked at
/// full resolution and the following K-1 frames at the chosen size.
class Scheduler {
 public:
  explicit Scheduler(ResolutionPolicy policy);

  /// Runs `detector` on `frame` at the scheduled resolution.
  ScheduledFrame next(const Frame& frame, const Detector& detector);

  /// Resolution for the next frame without running anything.
  bool next_is_decision() const { return position_ % policy_.interval_k == 0; }
  const Resolution& current() const { return current_; }
  const ResolutionPolicy& policy() const { return policy_; }

 private:
  ResolutionPolicy policy_;
  Resolution current_;
  long position_ = 0;
  int last_frame_index_ = 0;
};

}  // namespace resmot
