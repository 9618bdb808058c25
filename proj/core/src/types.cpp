#include "resmot/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace resmot {

std::string Resolution::to_string() const {
  return std::to_string(width) + "x" + std::to_string(height);
}

Resolution parse_resolution(const std::string& text) {
  const auto x = text.find_first_of("xX");
  Resolution r;
  if (x == std::string::npos) throw Error("core", "bad resolution '" + text + "'");
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto w = std::from_chars(begin, begin + x, r.width);
  auto h = std::from_chars(begin + x + 1, end, r.height);
  if (w.ec != std::errc{} || w.ptr != begin + x || h.ec != std::errc{} || h.ptr != end ||
      r.width <= 0 || r.height <= 0) {
    throw Error("core", "bad resolution '" + text + "'");
  }
  return r;
}

bool BoundingBox::valid() const {
  return std::isfinite(cx) && std::isfinite(cy) && std::isfinite(w) && std::isfinite(h) &&
         w > 0.0 && h > 0.0;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double cosine_similarity(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) throw Error("core", "cosine_similarity: length mismatch");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += static_cast<double>(u[i]) * v[i];
    nu += static_cast<double>(u[i]) * u[i];
    nv += static_cast<double>(v[i]) * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

BoundingBox scale_box(const BoundingBox& box, const Resolution& from, const Resolution& to) {
  const double sx = static_cast<double>(to.width) / from.width;
  const double sy = static_cast<double>(to.height) / from.height;
  return {box.cx * sx, box.cy * sy, box.w * sx, box.h * sy};
}

void normalize(Embedding& e) {
  double n = 0.0;
  for (float x : e) n += static_cast<double>(x) * x;
  if (n == 0.0) return;
  const double inv = 1.0 / std::sqrt(n);
  for (float& x : e) x = static_cast<float>(x * inv);
}

}  // namespace resmot
