#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "resmot/heatmap.hpp"
#include "resmot/types.hpp"

namespace resmot {

enum class QualityProfile { Standard, MultiresTrained };

const char* to_string(QualityProfile p);
QualityProfile parse_quality_profile(const std::string& text);

struct DetectorInfo {
  std::string name;
  std::vector<Resolution> ladder;
  int embedding_dim = kDefaultEmbeddingDim;
  QualityProfile profile = QualityProfile::Standard;
};

/// A detection backend. Implementations are immutable after construction and
/// deterministic in (frame, resolution).
class Detector {
 public:
  virtual ~Detector() = default;

  virtual const DetectorInfo& info() const = 0;

  /// Detections for `frame` processed at `resolution`; boxes are returned in
  /// full-frame coordinates.
  virtual std::vector<Detection> detect(const Frame& frame, const Resolution& resolution) const = 0;

  /// False when the backend has no data for this frame (replay gaps).
  virtual bool covers(const Frame&) const { return true; }

  /// Heatmaps a calibrated detectability head would produce: each rung's
  /// detections rendered on the shared full-frame grid.
  virtual HeatmapStack predict_stack(const Frame& frame) const;

  const Resolution& full() const { return info().ladder.back(); }
};

struct SyntheticDetectorConfig {
  double min_detectable_height = 15.0;  // pixels at the working resolution
  double score_decay = 0.5;
  double embedding_noise_sigma = 0.05;
  double box_jitter = 0.0;  // stddev in pixels, 0 = exact GT boxes
  std::uint64_t seed = 0;
  int embedding_dim = kDefaultEmbeddingDim;
  QualityProfile profile = QualityProfile::Standard;
  double multires_floor_factor = 0.8;
};

/// Resolution-dependent oracle over ground-truth objects: an object is found
/// iff its height at the working resolution reaches the detectability floor.
class SyntheticDetector final : public Detector {
 public:
  SyntheticDetector(SyntheticDetectorConfig cfg, std::vector<Resolution> ladder);

  const DetectorInfo& info() const override { return info_; }
  std::vector<Detection> detect(const Frame& frame, const Resolution& resolution) const override;

  /// Effective floor after the quality profile is applied.
  double floor() const;
  const SyntheticDetectorConfig& config() const { return cfg_; }

  /// Seeded per-identity appearance vector (unit norm, noiseless).
  Embedding identity_embedding(int identity) const;

 private:
  SyntheticDetectorConfig cfg_;
  DetectorInfo info_;
};

struct ReplayRecord {
  int frame_index = 0;
  int resolution_index = 0;
  BoundingBox box;
  double score = 0.0;
  Embedding embedding;
};

/// Serves detections exported from a real model, keyed by (frame, rung).
class ReplayDetector final : public Detector {
 public:
  ReplayDetector(std::vector<ReplayRecord> records, std::vector<Resolution> ladder,
                 int embedding_dim);

  const DetectorInfo& info() const override { return info_; }
  std::vector<Detection> detect(const Frame& frame, const Resolution& resolution) const override;
  bool covers(const Frame& frame) const override;

  std::size_t record_count() const { return count_; }

 private:
  DetectorInfo info_;
  std::map<std::pair<int, int>, std::vector<Detection>> index_;
  std::size_t count_ = 0;
};

/// Parses the replay text format. `embedding_dim` = 0 infers it from the
/// first record.
std::unique_ptr<ReplayDetector> load_replay(const std::string& path,
                                            const std::vector<Resolution>& ladder,
                                            int embedding_dim = 0);
std::unique_ptr<ReplayDetector> parse_replay(std::istream& in,
                                             const std::vector<Resolution>& ladder,
                                             int embedding_dim = 0);

/// Writes records in the replay format (header included).
void write_replay(std::ostream& out, const std::vector<Resolution>& ladder,
                  const std::vector<ReplayRecord>& records);

std::string ladder_to_string(const std::vector<Resolution>& ladder);
std::vector<Resolution> parse_ladder(const std::string& text);

}  // namespace resmot
