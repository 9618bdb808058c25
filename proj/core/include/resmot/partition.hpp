#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "resmot/detector.hpp"
#include "resmot/metrics.hpp"
#include "resmot/selector.hpp"
#include "resmot/tracker.hpp"
#include "resmot/wire.hpp"

namespace resmot {

/// Camera/server link. Each one-way message costs
/// (bytes + per_message_overhead) * 8 / bandwidth + rtt / 2.
struct LinkModel {
  double uplink_bps = 21.1e6;
  double downlink_bps = 78.0e6;
  double rtt_s = 1.4e-3;
  int per_message_overhead = 64;

  void validate() const;
  double uplink_seconds(std::size_t bytes) const;
  double downlink_seconds(std::size_t bytes) const;

  /// Keys: uplink_mbps, downlink_mbps, rtt_ms, per_message_overhead.
  static LinkModel load(const std::string& path);
};

struct StageCost {
  double detect_s = 0.0;
  double associate_s = 0.0;
};

/// Per-node timing table, indexed by ladder rung.
struct NodeProfile {
  std::vector<StageCost> per_resolution;
  double select_s = 0.0;

  const StageCost& at(const Resolution& r) const;
};

/// Detection time grows with frame area following the 1 : 1.25 : 1.62 ratio
/// measured at 576x320 / 864x480 / 1088x608; intermediate sizes interpolate
/// linearly in area.
double detection_time_ratio(const Resolution& r);

struct ComputeModel {
  NodeProfile camera;
  NodeProfile server;

  void validate(std::size_t ladder_size) const;

  /// Default tables for `ladder`: a server GPU and a slower embedded camera.
  static ComputeModel defaults(const std::vector<Resolution>& ladder);

  /// Sections [camera] and [server], keys "<WxH> = detect_ms, associate_ms"
  /// and "select_ms".
  static ComputeModel load(const std::string& path, const std::vector<Resolution>& ladder);
};

/// Encoded image bytes per ladder rung.
struct FrameBytesModel {
  std::vector<std::size_t> bytes;

  std::size_t at(const Resolution& r) const;
  void validate(const std::vector<Resolution>& ladder) const;

  /// 46.5 KB at full resolution, other rungs scaled by pixel count.
  static FrameBytesModel defaults(const std::vector<Resolution>& ladder,
                                  std::size_t full_bytes = 47616);
};

enum class Architecture { CO, SO, SOAT, SAT };

const char* to_string(Architecture a);
Architecture parse_architecture(const std::string& text);
inline constexpr Architecture kAllArchitectures[] = {Architecture::CO, Architecture::SO,
                                                      Architecture::SOAT, Architecture::SAT};

/// Per-frame accounting. Byte columns count message content (image bytes for
/// frame uploads, payload for result messages); framing header and per-message
/// overhead enter the transmission time only.
struct FrameTrace {
  int frame_index = 0;
  bool decision_frame = false;
  Resolution working;
  double camera_compute_s = 0.0;
  double server_compute_s = 0.0;
  double uplink_s = 0.0;
  double downlink_s = 0.0;
  double transmission_s = 0.0;
  std::size_t uplink_bytes = 0;
  std::size_t downlink_bytes = 0;

  double total_s() const { return camera_compute_s + server_compute_s + transmission_s; }
};

struct PartitionTrace {
  Architecture architecture = Architecture::CO;
  std::vector<FrameTrace> frames;
  double camera_compute_s = 0.0;
  double server_compute_s = 0.0;
  double transmission_s = 0.0;
  std::size_t uplink_bytes = 0;
  std::size_t downlink_bytes = 0;
  double effective_fps = 0.0;

  std::size_t frame_count() const { return frames.size(); }
  double per_frame(double total) const { return frames.empty() ? 0.0 : total / frames.size(); }
};

/// Which detector runs on which node. Null = no detector on that node.
struct DetectorAssignment {
  const Detector* camera = nullptr;
  const Detector* server = nullptr;
};

struct SimulationInputs {
  std::span<const Frame> frames;
  ResolutionPolicy policy;
  DetectorAssignment detectors;
  LinkModel link;
  ComputeModel compute;
  FrameBytesModel bytes;
  AssociationConfig association;
};

struct SimulationResult {
  PartitionTrace trace;
  ResultSequence tracks;
};

/// Sequential per-frame model of one architecture: no overlap between
/// transmission and compute.
SimulationResult simulate(Architecture arch, const SimulationInputs& in);

struct OrderingCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct OrderingReport {
  std::vector<OrderingCheck> checks;
  std::vector<std::string> notes;

  bool passed() const;
  std::vector<std::string> failures() const;
};

/// Verifies the qualitative compute/traffic orderings between architectures.
/// All four traces must come from identical inputs.
OrderingReport qualitative_check(const std::map<Architecture, PartitionTrace>& traces);

void write_report(std::ostream& out, const OrderingReport& report);

/// CSV with one row per frame.
void write_trace_csv(std::ostream& out, const PartitionTrace& trace);

}  // namespace resmot
