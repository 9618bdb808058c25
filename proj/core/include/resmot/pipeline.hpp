#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resmot/detector.hpp"
#include "resmot/metrics.hpp"
#include "resmot/partition.hpp"
#include "resmot/selector.hpp"
#include "resmot/tracker.hpp"

namespace resmot {

struct DetectorSpec {
  enum class Kind { Synthetic, Replay };
  Kind kind = Kind::Synthetic;
  SyntheticDetectorConfig synthetic;
  std::string replay_path;
};

/// Everything a run needs, as read from a sectioned key=value file. Relative
/// paths resolve against the config file's directory.
struct RunConfig {
  std::string scene_path;
  std::optional<Resolution> scene_native;  // coordinates of the scene file, default = full rung
  std::string sequence_id = "seq";
  DetectorSpec detector;                    // server / primary node
  std::optional<DetectorSpec> camera_detector;  // defaults to `detector`
  std::string policy = "C2";
  int k = 0;  // overrides the policy's interval when > 0
  Architecture architecture = Architecture::SO;
  std::string link_path;
  std::string compute_path;
  std::size_t full_frame_bytes = 47616;
  AssociationConfig association;
  std::optional<std::uint64_t> seed;
  std::string output_dir = ".";

  static RunConfig load(const std::string& path);
  static RunConfig parse(const std::string& text, const std::string& base_dir);
};

/// A loaded, ready-to-run experiment.
struct Experiment {
  std::vector<Frame> frames;
  GtSequence gt;
  bool has_gt = false;
  std::shared_ptr<const Detector> server;
  std::shared_ptr<const Detector> camera;
  ResolutionPolicy policy;
  AssociationConfig association;
  LinkModel link;
  ComputeModel compute;
  FrameBytesModel bytes;
  Architecture architecture = Architecture::SO;

  static Experiment from_config(const RunConfig& cfg);

  /// Synthetic experiment over an in-memory ground-truth sequence.
  static Experiment synthetic(const GtSequence& gt, ResolutionPolicy policy,
                              SyntheticDetectorConfig server_cfg,
                              std::optional<SyntheticDetectorConfig> camera_cfg = std::nullopt);

  SimulationInputs simulation_inputs() const;
};

std::unique_ptr<Detector> make_detector(const DetectorSpec& spec,
                                        const std::vector<Resolution>& ladder);

struct TrackRun {
  ResultSequence results;
  std::vector<ScheduledFrame> schedule;  // detections dropped, decisions kept
  std::optional<SequenceReport> report;
  std::string report_error;
  std::vector<std::string> log;
  double simulated_fps = 0.0;
  std::map<std::string, double> frame_mix;
  int decision_count = 0;
};

/// Schedule -> detect -> associate over every frame on a single node whose
/// stage costs come from `timing`.
TrackRun run_track(const Experiment& ex, const NodeProfile& timing);
TrackRun run_track(const Experiment& ex);

/// Loads the config, runs, and writes `results.txt` and `report.txt` under
/// the output directory. Returns the run.
TrackRun run_track_to_disk(const RunConfig& cfg);

enum class SweepAxis { Policy, K, Architecture };

SweepAxis parse_sweep_axis(const std::string& text);

struct SweepRow {
  std::string setting;
  double mota = 0.0;
  double idf1 = 0.0;
  double fps = 0.0;
  int decisions = 0;
  std::map<std::string, double> frame_mix;
  bool partition = false;
  double server_ms = 0.0;
  double camera_ms = 0.0;
  double transmission_ms = 0.0;
  double uplink_kb = 0.0;
};

struct SweepTable {
  SweepAxis axis = SweepAxis::Policy;
  std::vector<std::string> resolutions;
  std::vector<SweepRow> rows;
  std::optional<OrderingReport> ordering;
};

/// One row per axis value. Policy values are presets or policy files; K
/// values are integers; architecture values are co/so/soat/sat.
SweepTable sweep(const Experiment& base, SweepAxis axis, const std::vector<std::string>& values);

void write_sweep_text(std::ostream& out, const SweepTable& table);
void write_sweep_csv(std::ostream& out, const SweepTable& table);

}  // namespace resmot
