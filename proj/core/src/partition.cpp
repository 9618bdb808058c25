#include "resmot/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "resmot/config.hpp"

namespace resmot {

namespace {

// Anchors of the detection-time curve: (area, relative time).
constexpr std::pair<double, double> kTimeAnchors[] = {
    {576.0 * 320.0, 1.0}, {864.0 * 480.0, 1.25}, {1088.0 * 608.0, 1.62}};

constexpr double kServerDetectBase = 0.030;
constexpr double kServerAssociate = 0.002;
constexpr double kServerSelect = 0.004;
constexpr double kCameraDetectBase = 0.120;
constexpr double kCameraAssociate = 0.006;
constexpr double kCameraSelect = 0.012;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

NodeProfile default_profile(const std::vector<Resolution>& ladder, double detect_base,
                            double associate, double select) {
  NodeProfile p;
  for (const auto& r : ladder) p.per_resolution.push_back({detect_base * detection_time_ratio(r), associate});
  p.select_s = select;
  return p;
}

void load_profile(const KeyValueConfig& cfg, const std::string& section,
                  const std::vector<Resolution>& ladder, NodeProfile& p) {
  for (const auto& key : cfg.keys(section)) {
    const std::string full_key = section + "." + key;
    if (key == "select_ms") {
      p.select_s = cfg.get_double(full_key) * 1e-3;
      continue;
    }
    const Resolution r = parse_resolution(key);
    auto it = std::find_if(ladder.begin(), ladder.end(), [&](const Resolution& l) {
      return l.width == r.width && l.height == r.height;
    });
    if (it == ladder.end()) throw Error("partition", cfg.origin() + ": " + key + " is not in the ladder");
    const std::string value = cfg.get(full_key);
    const auto comma = value.find(',');
    if (comma == std::string::npos) {
      throw Error("partition", cfg.origin() + ": expected 'detect_ms, associate_ms' for " + full_key);
    }
    try {
      auto& cost = p.per_resolution[static_cast<std::size_t>(it->index)];
      cost.detect_s = std::stod(trim(value.substr(0, comma))) * 1e-3;
      cost.associate_s = std::stod(trim(value.substr(comma + 1))) * 1e-3;
    } catch (const std::exception&) {
      throw Error("partition", cfg.origin() + ": bad timing for " + full_key);
    }
  }
}

void check_ladder(const Detector* d, const std::vector<Resolution>& ladder, const char* node) {
  if (!d) return;
  const auto& dl = d->info().ladder;
  if (dl.size() != ladder.size() ||
      !std::equal(dl.begin(), dl.end(), ladder.begin(), [](const Resolution& a, const Resolution& b) {
        return a.width == b.width && a.height == b.height;
      })) {
    throw Error("partition", std::string(node) + " detector ladder differs from the policy ladder");
  }
}

std::size_t frame_wire_bytes(std::size_t image_bytes) {
  return wire::kHeaderSize + wire::kFrameDescriptorSize + image_bytes;
}

wire::TrackUpdate track_update(int frame_index, std::span<const TrackOutput> outputs) {
  wire::TrackUpdate u;
  u.frame_index = static_cast<std::uint32_t>(frame_index);
  for (const auto& o : outputs) {
    u.tracks.push_back({static_cast<std::uint32_t>(o.track_id), static_cast<float>(o.box.cx),
                        static_cast<float>(o.box.cy), static_cast<float>(o.box.w),
                        static_cast<float>(o.box.h)});
  }
  return u;
}

void record_tracks(ResultSequence& out, const Tracker& tracker,
                   std::span<const TrackOutput> outputs) {
  for (const auto& b : tracker.last_backfill()) {
    out[b.frame_index].push_back({b.track_id, b.box, b.score});
  }
  for (const auto& o : outputs) out[o.frame_index].push_back({o.track_id, o.box, o.score});
}

class TraceBuilder {
 public:
  TraceBuilder(const LinkModel& link, const wire::Codec& codec) : link_(link), codec_(codec) {}

  void upload_frame(FrameTrace& f, std::size_t image_bytes) {
    f.uplink_bytes += image_bytes;
    f.uplink_s += link_.uplink_seconds(frame_wire_bytes(image_bytes));
  }

  void download(FrameTrace& f, const wire::Message& m) {
    const std::size_t payload = codec_.payload_size(m);
    f.downlink_bytes += payload;
    f.downlink_s += link_.downlink_seconds(wire::kHeaderSize + payload);
  }

 private:
  const LinkModel& link_;
  const wire::Codec& codec_;
};

}  // namespace

void LinkModel::validate() const {
  if (!(uplink_bps > 0.0) || !(downlink_bps > 0.0)) {
    throw Error("partition", "link bandwidths must be positive");
  }
  if (rtt_s < 0.0 || per_message_overhead < 0) {
    throw Error("partition", "link latency and overhead must be non-negative");
  }
}

double LinkModel::uplink_seconds(std::size_t bytes) const {
  return static_cast<double>(bytes + per_message_overhead) * 8.0 / uplink_bps + 0.5 * rtt_s;
}

double LinkModel::downlink_seconds(std::size_t bytes) const {
  return static_cast<double>(bytes + per_message_overhead) * 8.0 / downlink_bps + 0.5 * rtt_s;
}

LinkModel LinkModel::load(const std::string& path) {
  const auto cfg = KeyValueConfig::load(path);
  LinkModel l;
  l.uplink_bps = cfg.get_double("uplink_mbps", l.uplink_bps / 1e6) * 1e6;
  l.downlink_bps = cfg.get_double("downlink_mbps", l.downlink_bps / 1e6) * 1e6;
  l.rtt_s = cfg.get_double("rtt_ms", l.rtt_s * 1e3) * 1e-3;
  l.per_message_overhead = static_cast<int>(cfg.get_int("per_message_overhead", l.per_message_overhead));
  l.validate();
  return l;
}

const StageCost& NodeProfile::at(const Resolution& r) const {
  if (r.index < 0 || r.index >= static_cast<int>(per_resolution.size())) {
    throw Error("partition", "no timing entry for " + r.to_string());
  }
  return per_resolution[static_cast<std::size_t>(r.index)];
}

double detection_time_ratio(const Resolution& r) {
  const double a = static_cast<double>(r.area());
  const auto& anchors = kTimeAnchors;
  std::size_t i = 1;
  while (i + 1 < std::size(anchors) && a > anchors[i].first) ++i;
  const auto [a0, t0] = anchors[i - 1];
  const auto [a1, t1] = anchors[i];
  return std::max(0.0, t0 + (t1 - t0) * (a - a0) / (a1 - a0));
}

void ComputeModel::validate(std::size_t ladder_size) const {
  for (const NodeProfile* p : {&camera, &server}) {
    if (p->per_resolution.size() != ladder_size) {
      throw Error("partition", "compute model does not cover the ladder");
    }
    if (p->select_s < 0.0) throw Error("partition", "negative selection time");
    for (std::size_t i = 0; i < p->per_resolution.size(); ++i) {
      const auto& c = p->per_resolution[i];
      if (c.detect_s < 0.0 || c.associate_s < 0.0) throw Error("partition", "negative stage time");
      if (i > 0 && c.detect_s < p->per_resolution[i - 1].detect_s) {
        throw Error("partition", "detect time must not decrease with resolution");
      }
    }
  }
}

ComputeModel ComputeModel::defaults(const std::vector<Resolution>& ladder) {
  return {default_profile(ladder, kCameraDetectBase, kCameraAssociate, kCameraSelect),
          default_profile(ladder, kServerDetectBase, kServerAssociate, kServerSelect)};
}

ComputeModel ComputeModel::load(const std::string& path, const std::vector<Resolution>& ladder) {
  const auto cfg = KeyValueConfig::load(path);
  ComputeModel m = defaults(ladder);
  load_profile(cfg, "camera", ladder, m.camera);
  load_profile(cfg, "server", ladder, m.server);
  m.validate(ladder.size());
  return m;
}

std::size_t FrameBytesModel::at(const Resolution& r) const {
  if (r.index < 0 || r.index >= static_cast<int>(bytes.size())) {
    throw Error("partition", "no byte size for " + r.to_string());
  }
  return bytes[static_cast<std::size_t>(r.index)];
}

void FrameBytesModel::validate(const std::vector<Resolution>& ladder) const {
  if (bytes.size() != ladder.size()) throw Error("partition", "byte model does not cover the ladder");
  for (std::size_t i = 1; i < bytes.size(); ++i) {
    if (bytes[i] < bytes[i - 1]) throw Error("partition", "frame bytes must not decrease with resolution");
  }
}

FrameBytesModel FrameBytesModel::defaults(const std::vector<Resolution>& ladder,
                                          std::size_t full_bytes) {
  FrameBytesModel m;
  const double full_area = static_cast<double>(ladder.back().area());
  for (const auto& r : ladder) {
    m.bytes.push_back(static_cast<std::size_t>(std::llround(full_bytes * (r.area() / full_area))));
  }
  return m;
}

const char* to_string(Architecture a) {
  switch (a) {
    case Architecture::CO:
      return "CO";
    case Architecture::SO:
      return "SO";
    case Architecture::SOAT:
      return "SOAT";
    case Architecture::SAT:
      return "SAT";
  }
  return "?";
}

Architecture parse_architecture(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "co") return Architecture::CO;
  if (t == "so") return Architecture::SO;
  if (t == "soat") return Architecture::SOAT;
  if (t == "sat") return Architecture::SAT;
  throw Error("partition", "unknown architecture '" + text + "'");
}

SimulationResult simulate(Architecture arch, const SimulationInputs& in) {
  const auto& policy = in.policy;
  policy.validate();
  const auto& ladder = policy.ladder;
  in.link.validate();
  in.compute.validate(ladder.size());
  in.bytes.validate(ladder);

  const Detector* camera = in.detectors.camera;
  const Detector* server = in.detectors.server;
  const bool needs_camera = arch == Architecture::CO || arch == Architecture::SAT;
  const bool needs_server = arch != Architecture::CO;
  if (needs_camera && !camera) {
    throw Error("partition", std::string(to_string(arch)) + " requires a camera detector");
  }
  if (needs_server && !server) {
    throw Error("partition", std::string(to_string(arch)) + " requires a server detector");
  }
  if (needs_camera) check_ladder(camera, ladder, "camera");
  if (needs_server) check_ladder(server, ladder, "server");
  if (arch == Architecture::SAT && camera->info().embedding_dim != server->info().embedding_dim) {
    throw Error("partition", "camera and server embeddings differ in length");
  }

  const Detector& primary = needs_server ? *server : *camera;
  const NodeProfile& node = arch == Architecture::CO ? in.compute.camera : in.compute.server;
  const wire::Codec codec(primary.info().embedding_dim);
  TraceBuilder tb(in.link, codec);

  SimulationResult result;
  PartitionTrace& trace = result.trace;
  trace.architecture = arch;
  Tracker tracker(in.association);

  if (arch != Architecture::SAT) {
    Scheduler scheduler(policy);
    // SOAT: resolution the camera applies to non-decision frames
    Resolution camera_resolution = policy.full();
    for (const Frame& frame : in.frames) {
      const ScheduledFrame sf = scheduler.next(frame, primary);
      const auto outputs = tracker.step(sf.detections, frame.frame_index);
      record_tracks(result.tracks, tracker, outputs);

      FrameTrace f;
      f.frame_index = frame.frame_index;
      f.decision_frame = sf.decision_frame;
      f.working = sf.working;
      const auto& cost = node.at(sf.working);
      const double compute = cost.detect_s + cost.associate_s + (sf.decision_frame ? node.select_s : 0.0);
      if (arch == Architecture::CO) {
        f.camera_compute_s = compute;
      } else {
        f.server_compute_s = compute;
        const Resolution& sent = arch == Architecture::SO ? policy.full() : sf.working;
        tb.upload_frame(f, in.bytes.at(sent));
        // a directive is only sent when a following frame will use a new size
        if (arch == Architecture::SOAT && sf.decision_frame && policy.interval_k > 1 &&
            sf.decision->chosen.index != camera_resolution.index) {
          camera_resolution = sf.decision->chosen;
          tb.download(f, wire::ResolutionDirective{static_cast<std::uint32_t>(frame.frame_index),
                                                   static_cast<std::uint8_t>(camera_resolution.index)});
        }
        tb.download(f, track_update(frame.frame_index, outputs));
      }
      f.transmission_s = f.uplink_s + f.downlink_s;
      trace.frames.push_back(f);
    }
  } else {
    Resolution current = policy.full();
    long position = 0;
    for (const Frame& frame : in.frames) {
      FrameTrace f;
      f.frame_index = frame.frame_index;
      std::vector<Detection> dets;
      if (position % policy.interval_k == 0) {
        f.decision_frame = true;
        f.working = policy.full();
        const auto decision = select_resolution(server->predict_stack(frame), policy, frame.frame_index);
        wire::DetectionResult msg;
        msg.frame_index = static_cast<std::uint32_t>(frame.frame_index);
        for (const auto& d : server->detect(frame, policy.full())) msg.detections.push_back(wire::to_wire(d));
        // the camera associates what actually crossed the wire
        const auto received = std::get<wire::DetectionResult>(codec.decode(codec.encode(msg)));
        for (const auto& d : received.detections) dets.push_back(wire::from_wire(d));
        current = decision.chosen;

        const auto& scost = in.compute.server.at(policy.full());
        f.server_compute_s = scost.detect_s + in.compute.server.select_s;
        f.camera_compute_s = in.compute.camera.at(policy.full()).associate_s;
        tb.upload_frame(f, in.bytes.at(policy.full()));
        tb.download(f, msg);
        tb.download(f, wire::ResolutionDirective{static_cast<std::uint32_t>(frame.frame_index),
                                                 static_cast<std::uint8_t>(current.index)});
      } else {
        f.working = current;
        dets = camera->detect(frame, current);
        const auto& ccost = in.compute.camera.at(current);
        f.camera_compute_s = ccost.detect_s + ccost.associate_s;
      }
      const auto outputs = tracker.step(dets, frame.frame_index);
      record_tracks(result.tracks, tracker, outputs);
      f.transmission_s = f.uplink_s + f.downlink_s;
      trace.frames.push_back(f);
      ++position;
    }
  }

  double total = 0.0;
  for (const auto& f : trace.frames) {
    trace.camera_compute_s += f.camera_compute_s;
    trace.server_compute_s += f.server_compute_s;
    trace.transmission_s += f.transmission_s;
    trace.uplink_bytes += f.uplink_bytes;
    trace.downlink_bytes += f.downlink_bytes;
    total += f.total_s();
  }
  trace.effective_fps = total > 0.0 ? trace.frames.size() / total : 0.0;
  return result;
}

bool OrderingReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const OrderingCheck& c) { return c.passed; });
}

std::vector<std::string> OrderingReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(c.name);
  }
  return out;
}

OrderingReport qualitative_check(const std::map<Architecture, PartitionTrace>& traces) {
  for (auto a : kAllArchitectures) {
    if (!traces.count(a)) throw Error("partition", std::string("missing trace for ") + to_string(a));
  }
  const auto& co = traces.at(Architecture::CO);
  const auto& so = traces.at(Architecture::SO);
  const auto& soat = traces.at(Architecture::SOAT);
  const auto& sat = traces.at(Architecture::SAT);
  const std::size_t n = co.frame_count();
  for (const auto& [a, t] : traces) {
    if (t.frame_count() != n) throw Error("partition", "traces cover different frame counts");
  }

  OrderingReport rep;
  auto ms = [&](double total) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f ms", 1e3 * total / std::max<std::size_t>(n, 1));
    return std::string(buf);
  };
  auto kb = [&](std::size_t total) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f KB", total / 1024.0 / std::max<std::size_t>(n, 1));
    return std::string(buf);
  };
  auto close = [](double a, double b) {
    return std::fabs(a - b) <= 0.05 * std::max({std::fabs(a), std::fabs(b), 1e-12});
  };
  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  add("server compute: SO ~ SOAT", close(so.server_compute_s, soat.server_compute_s),
      "SO " + ms(so.server_compute_s) + ", SOAT " + ms(soat.server_compute_s));
  add("server compute: SOAT > SAT", soat.server_compute_s > sat.server_compute_s,
      "SOAT " + ms(soat.server_compute_s) + ", SAT " + ms(sat.server_compute_s));
  add("server compute: SAT > CO = 0", sat.server_compute_s > 0.0 && co.server_compute_s == 0.0,
      "SAT " + ms(sat.server_compute_s) + ", CO " + ms(co.server_compute_s));

  add("camera compute: CO >= SAT", co.camera_compute_s >= sat.camera_compute_s,
      "CO " + ms(co.camera_compute_s) + ", SAT " + ms(sat.camera_compute_s));
  add("camera compute: SAT > SOAT", sat.camera_compute_s > soat.camera_compute_s,
      "SAT " + ms(sat.camera_compute_s) + ", SOAT " + ms(soat.camera_compute_s));
  add("camera compute: SOAT ~ SO ~ 0", so.camera_compute_s == 0.0 && soat.camera_compute_s == 0.0,
      "SO " + ms(so.camera_compute_s) + ", SOAT " + ms(soat.camera_compute_s));

  // SO uploads every frame at full size
  bool soat_all_full = true;
  for (std::size_t i = 0; i < n; ++i) {
    soat_all_full = soat_all_full && soat.frames[i].uplink_bytes == so.frames[i].uplink_bytes;
  }
  const bool so_vs_soat = soat_all_full ? so.uplink_bytes == soat.uplink_bytes
                                        : so.uplink_bytes > soat.uplink_bytes;
  add(soat_all_full ? "camera->server traffic: SO = SOAT (all frames full size)"
                    : "camera->server traffic: SO > SOAT",
      so_vs_soat, "SO " + kb(so.uplink_bytes) + ", SOAT " + kb(soat.uplink_bytes));
  add("camera->server traffic: SOAT >= SAT", soat.uplink_bytes >= sat.uplink_bytes,
      "SOAT " + kb(soat.uplink_bytes) + ", SAT " + kb(sat.uplink_bytes));
  add("camera->server traffic: SAT > CO = 0", sat.uplink_bytes > 0 && co.uplink_bytes == 0,
      "SAT " + kb(sat.uplink_bytes) + ", CO " + kb(co.uplink_bytes));

  rep.notes.push_back(
      "transmission times are serialization + half-RTT only; the testbed-measured SO figure "
      "of 87.4 ms/frame includes network-stack overhead outside this model and is not compared");
  return rep;
}

void write_report(std::ostream& out, const OrderingReport& report) {
  for (const auto& c : report.checks) {
    out << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  (" << c.detail << ")\n";
  }
  for (const auto& n : report.notes) out << "note: " << n << '\n';
}

void write_trace_csv(std::ostream& out, const PartitionTrace& trace) {
  out << "frame_index,decision_frame,working_resolution,camera_compute_s,server_compute_s,"
         "uplink_s,downlink_s,transmission_s,uplink_bytes,downlink_bytes\n";
  char buf[256];
  for (const auto& f : trace.frames) {
    std::snprintf(buf, sizeof buf, "%d,%d,%s,%.9f,%.9f,%.9f,%.9f,%.9f,%zu,%zu\n", f.frame_index,
                  f.decision_frame ? 1 : 0, f.working.to_string().c_str(), f.camera_compute_s,
                  f.server_compute_s, f.uplink_s, f.downlink_s, f.transmission_s, f.uplink_bytes,
                  f.downlink_bytes);
    out << buf;
  }
}

}  // namespace resmot
