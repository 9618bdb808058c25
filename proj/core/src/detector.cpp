#include "resmot/detector.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace resmot {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t seed, std::initializer_list<std::int64_t> parts) {
  std::uint64_t h = splitmix64(seed);
  for (auto p : parts) h = splitmix64(h ^ static_cast<std::uint64_t>(p));
  return h;
}

Embedding gaussian_unit_vector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Embedding e(static_cast<std::size_t>(dim));
  for (float& x : e) x = static_cast<float>(normal(rng));
  normalize(e);
  return e;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (trim(field.substr(used)).empty() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw Error("detector", "replay line " + std::to_string(line) + ": bad number '" + field + "'");
}

int parse_int(const std::string& field, int line) {
  const std::string t = trim(field);
  int v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw Error("detector",
                "replay line " + std::to_string(line) + ": bad integer '" + field + "'");
  }
  return v;
}

}  // namespace

const char* to_string(QualityProfile p) {
  return p == QualityProfile::Standard ? "standard" : "multires-trained";
}

QualityProfile parse_quality_profile(const std::string& text) {
  if (text == "standard") return QualityProfile::Standard;
  if (text == "multires-trained" || text == "multires") return QualityProfile::MultiresTrained;
  throw Error("detector", "unknown quality profile '" + text + "'");
}

std::string ladder_to_string(const std::vector<Resolution>& ladder) {
  std::string out;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (i) out += ',';
    out += ladder[i].to_string();
  }
  return out;
}

std::vector<Resolution> parse_ladder(const std::string& text) {
  std::vector<Resolution> ladder;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Resolution r = parse_resolution(trim(item));
    r.index = static_cast<int>(ladder.size());
    ladder.push_back(r);
  }
  if (ladder.empty()) throw Error("detector", "empty resolution ladder");
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (ladder[i].area() <= ladder[i - 1].area()) {
      throw Error("detector", "ladder must be strictly increasing in area");
    }
  }
  return ladder;
}

HeatmapStack Detector::predict_stack(const Frame& frame) const {
  const auto& ladder = info().ladder;
  HeatmapStack stack;
  stack.reserve(ladder.size());
  std::vector<BoundingBox> boxes;
  for (const auto& r : ladder) {
    boxes.clear();
    for (const auto& d : detect(frame, r)) boxes.push_back(d.box);
    // kernels sized at full resolution so rungs differ only in which objects they find
    stack.push_back(render_gt_heatmap(boxes, full(), full()));
  }
  return stack;
}

SyntheticDetector::SyntheticDetector(SyntheticDetectorConfig cfg, std::vector<Resolution> ladder)
    : cfg_(cfg) {
  if (!(cfg_.min_detectable_height > 0.0)) {
    throw Error("detector", "min_detectable_height must be positive");
  }
  if (cfg_.score_decay < 0.0 || cfg_.embedding_noise_sigma < 0.0 || cfg_.box_jitter < 0.0) {
    throw Error("detector", "synthetic detector parameters must be non-negative");
  }
  if (ladder.empty()) throw Error("detector", "empty ladder");
  info_.name = "synthetic";
  info_.ladder = std::move(ladder);
  info_.embedding_dim = cfg_.embedding_dim;
  info_.profile = cfg_.profile;
}

double SyntheticDetector::floor() const {
  return cfg_.profile == QualityProfile::MultiresTrained
             ? cfg_.min_detectable_height * cfg_.multires_floor_factor
             : cfg_.min_detectable_height;
}

Embedding SyntheticDetector::identity_embedding(int identity) const {
  std::mt19937_64 rng(mix(cfg_.seed, {0x1d, identity}));
  return gaussian_unit_vector(rng, cfg_.embedding_dim);
}

std::vector<Detection> SyntheticDetector::detect(const Frame& frame,
                                                 const Resolution& resolution) const {
  const double scale = static_cast<double>(resolution.height) / full().height;
  const double f = floor();
  std::vector<Detection> out;
  for (const auto& obj : frame.objects) {
    const double h_r = obj.box.h * scale;
    if (h_r < f) continue;
    Detection d;
    d.box = obj.box;
    const double deficit = std::max(0.0, 2.0 * f - h_r) / f;
    d.score = std::clamp(1.0 - cfg_.score_decay * deficit, 0.0, 1.0);
    d.embedding = identity_embedding(obj.identity);
    std::mt19937_64 rng(mix(cfg_.seed, {0x2e, obj.identity, frame.frame_index, resolution.index}));
    if (cfg_.embedding_noise_sigma > 0.0) {
      std::normal_distribution<double> noise(0.0, cfg_.embedding_noise_sigma);
      for (float& x : d.embedding) x = static_cast<float>(x + noise(rng));
      normalize(d.embedding);
    }
    if (cfg_.box_jitter > 0.0) {
      std::normal_distribution<double> jitter(0.0, cfg_.box_jitter);
      d.box.cx += jitter(rng);
      d.box.cy += jitter(rng);
    }
    out.push_back(std::move(d));
  }
  return out;
}

ReplayDetector::ReplayDetector(std::vector<ReplayRecord> records, std::vector<Resolution> ladder,
                               int embedding_dim) {
  info_.name = "replay";
  info_.ladder = std::move(ladder);
  info_.embedding_dim = embedding_dim;
  for (auto& rec : records) {
    if (rec.resolution_index < 0 ||
        rec.resolution_index >= static_cast<int>(info_.ladder.size())) {
      throw Error("detector", "replay resolution_index out of ladder");
    }
    index_[{rec.frame_index, rec.resolution_index}].push_back(
        Detection{rec.box, rec.score, std::move(rec.embedding)});
    ++count_;
  }
}

std::vector<Detection> ReplayDetector::detect(const Frame& frame,
                                              const Resolution& resolution) const {
  auto it = index_.find({frame.frame_index, resolution.index});
  if (it == index_.end()) return {};
  return it->second;
}

bool ReplayDetector::covers(const Frame& frame) const {
  auto it = index_.lower_bound({frame.frame_index, 0});
  return it != index_.end() && it->first.first == frame.frame_index;
}

std::unique_ptr<ReplayDetector> parse_replay(std::istream& in,
                                             const std::vector<Resolution>& ladder,
                                             int embedding_dim) {
  std::vector<ReplayRecord> records;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (!header_seen) {
      const std::string prefix = "#ladder:";
      if (t.rfind(prefix, 0) != 0) {
        throw Error("detector", "replay line " + std::to_string(line_no) +
                                    ": missing '#ladder:' header");
      }
      const auto declared = parse_ladder(t.substr(prefix.size()));
      if (declared.size() != ladder.size() ||
          !std::equal(declared.begin(), declared.end(), ladder.begin(),
                      [](const Resolution& a, const Resolution& b) {
                        return a.width == b.width && a.height == b.height;
                      })) {
        throw Error("detector", "replay ladder '" + ladder_to_string(declared) +
                                    "' does not match '" + ladder_to_string(ladder) + "'");
      }
      header_seen = true;
      continue;
    }
    if (t[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(t);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 8) {
      throw Error("detector", "replay line " + std::to_string(line_no) + ": expected 8 fields, got " +
                                  std::to_string(fields.size()));
    }
    ReplayRecord rec;
    rec.frame_index = parse_int(fields[0], line_no);
    rec.resolution_index = parse_int(fields[1], line_no);
    rec.box = {parse_double(fields[2], line_no), parse_double(fields[3], line_no),
               parse_double(fields[4], line_no), parse_double(fields[5], line_no)};
    rec.score = parse_double(fields[6], line_no);
    if (!rec.box.valid()) {
      throw Error("detector", "replay line " + std::to_string(line_no) + ": invalid box");
    }
    if (rec.score < 0.0 || rec.score > 1.0) {
      throw Error("detector", "replay line " + std::to_string(line_no) + ": score outside [0,1]");
    }
    if (rec.resolution_index < 0 || rec.resolution_index >= static_cast<int>(ladder.size())) {
      throw Error("detector", "replay line " + std::to_string(line_no) +
                                  ": unknown resolution_index " +
                                  std::to_string(rec.resolution_index));
    }
    std::stringstream es(fields[7]);
    std::string tok;
    while (es >> tok) rec.embedding.push_back(static_cast<float>(parse_double(tok, line_no)));
    if (embedding_dim == 0) embedding_dim = static_cast<int>(rec.embedding.size());
    if (static_cast<int>(rec.embedding.size()) != embedding_dim || embedding_dim == 0) {
      throw Error("detector", "replay line " + std::to_string(line_no) + ": embedding length " +
                                  std::to_string(rec.embedding.size()) + ", expected " +
                                  std::to_string(embedding_dim));
    }
    records.push_back(std::move(rec));
  }
  if (embedding_dim == 0) embedding_dim = kDefaultEmbeddingDim;
  return std::make_unique<ReplayDetector>(std::move(records), ladder, embedding_dim);
}

std::unique_ptr<ReplayDetector> load_replay(const std::string& path,
                                            const std::vector<Resolution>& ladder,
                                            int embedding_dim) {
  std::ifstream in(path);
  if (!in) throw Error("detector", "cannot open replay file '" + path + "'");
  return parse_replay(in, ladder, embedding_dim);
}

void write_replay(std::ostream& out, const std::vector<Resolution>& ladder,
                  const std::vector<ReplayRecord>& records) {
  out << "#ladder:" << ladder_to_string(ladder) << '\n';
  const auto old = out.precision(9);
  for (const auto& r : records) {
    out << r.frame_index << ',' << r.resolution_index << ',' << r.box.cx << ',' << r.box.cy << ','
        << r.box.w << ',' << r.box.h << ',' << r.score << ',';
    for (std::size_t i = 0; i < r.embedding.size(); ++i) {
      if (i) out << ' ';
      out << r.embedding[i];
    }
    out << '\n';
  }
  out.precision(old);
}

}  // namespace resmot
