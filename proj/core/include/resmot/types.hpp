#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace resmot {

/// Error raised by any module. `module()` names the component that failed so
/// the CLI can print a module-qualified error line.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// A candidate frame size. `index` is the ordinal within the resolution
/// ladder (0 = smallest area).
struct Resolution {
  int width = 0;
  int height = 0;
  int index = 0;

  long area() const { return static_cast<long>(width) * height; }
  std::string to_string() const;

  bool operator==(const Resolution&) const = default;
};

/// Parses "WxH" (index left at 0).
Resolution parse_resolution(const std::string& text);

/// Axis-aligned box in center+size form, full-resolution pixel coordinates.
struct BoundingBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  double left() const { return cx - 0.5 * w; }
  double top() const { return cy - 0.5 * h; }
  double right() const { return cx + 0.5 * w; }
  double bottom() const { return cy + 0.5 * h; }
  double area() const { return w * h; }
  bool valid() const;

  static BoundingBox from_tlwh(double left, double top, double w, double h) {
    return {left + 0.5 * w, top + 0.5 * h, w, h};
  }

  bool operator==(const BoundingBox&) const = default;
};

using Embedding = std::vector<float>;

inline constexpr int kDefaultEmbeddingDim = 128;

struct Detection {
  BoundingBox box;
  double score = 1.0;
  Embedding embedding;
};

struct GroundTruthObject {
  int identity = 0;
  BoundingBox box;
  double visibility = 1.0;
};

struct Frame {
  std::string sequence_id;
  int frame_index = 0;
  Resolution native_resolution;
  std::vector<GroundTruthObject> objects;
};

/// Intersection over union; 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Cosine similarity of two equal-length vectors. A zero-norm input yields 0.
double cosine_similarity(std::span<const float> u, std::span<const float> v);

/// Rescales a box expressed at `from` into the coordinate frame of `to`.
BoundingBox scale_box(const BoundingBox& box, const Resolution& from, const Resolution& to);

/// Normalizes in place; leaves a zero vector untouched.
void normalize(Embedding& e);

}  // namespace resmot
