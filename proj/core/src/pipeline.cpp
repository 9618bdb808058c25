#include "resmot/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "resmot/config.hpp"
#include "resmot/scene.hpp"

namespace resmot {

namespace fs = std::filesystem;

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

bool is_preset(const std::string& name) { return name == "C1" || name == "C2" || name == "C3"; }

DetectorSpec read_detector(const KeyValueConfig& cfg, const std::string& section,
                           const std::string& base_dir, DetectorSpec spec) {
  auto key = [&](const char* k) { return section + "." + k; };
  const std::string kind = cfg.get(key("kind"), spec.kind == DetectorSpec::Kind::Replay ? "replay" : "synthetic");
  if (kind == "replay") {
    spec.kind = DetectorSpec::Kind::Replay;
    spec.replay_path = resolve(base_dir, cfg.get(key("replay")));
  } else if (kind == "synthetic") {
    spec.kind = DetectorSpec::Kind::Synthetic;
  } else {
    throw Error("config", cfg.origin() + ": unknown detector kind '" + kind + "'");
  }
  auto& s = spec.synthetic;
  s.min_detectable_height = cfg.get_double(key("min_detectable_height"), s.min_detectable_height);
  s.score_decay = cfg.get_double(key("score_decay"), s.score_decay);
  s.embedding_noise_sigma = cfg.get_double(key("embedding_noise_sigma"), s.embedding_noise_sigma);
  s.box_jitter = cfg.get_double(key("box_jitter"), s.box_jitter);
  s.seed = static_cast<std::uint64_t>(cfg.get_int(key("seed"), static_cast<long>(s.seed)));
  s.embedding_dim = static_cast<int>(cfg.get_int(key("embedding_dim"), s.embedding_dim));
  s.multires_floor_factor = cfg.get_double(key("multires_floor_factor"), s.multires_floor_factor);
  if (cfg.has(key("profile"))) s.profile = parse_quality_profile(cfg.get(key("profile")));
  return spec;
}

std::map<std::string, double> mix_of(const std::vector<Resolution>& ladder,
                                     const std::map<int, int>& counts, int total) {
  std::map<std::string, double> mix;
  for (const auto& r : ladder) {
    auto it = counts.find(r.index);
    mix[r.to_string()] = total == 0 || it == counts.end() ? 0.0 : static_cast<double>(it->second) / total;
  }
  return mix;
}

std::string fmt(double v, int precision) {
  if (std::isnan(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text, const std::string& base_dir) {
  const auto cfg = KeyValueConfig::parse(text, base_dir.empty() ? "<config>" : base_dir);
  RunConfig rc;
  rc.scene_path = resolve(base_dir, cfg.get("scene.path", ""));
  if (cfg.has("scene.native")) rc.scene_native = parse_resolution(cfg.get("scene.native"));
  rc.sequence_id = cfg.get("scene.sequence", rc.sequence_id);
  rc.detector = read_detector(cfg, "detector", base_dir, rc.detector);
  if (cfg.has_section("camera_detector")) {
    rc.camera_detector = read_detector(cfg, "camera_detector", base_dir, rc.detector);
  }
  rc.policy = cfg.get("policy.name", rc.policy);
  if (!is_preset(rc.policy)) rc.policy = resolve(base_dir, rc.policy);
  rc.k = static_cast<int>(cfg.get_int("policy.k", rc.k));
  auto& a = rc.association;
  a.appearance_gate = cfg.get_double("association.appearance_gate", a.appearance_gate);
  a.iou_gate = cfg.get_double("association.iou_gate", a.iou_gate);
  a.ema_alpha = cfg.get_double("association.ema_alpha", a.ema_alpha);
  a.max_miss = static_cast<int>(cfg.get_int("association.max_miss", a.max_miss));
  a.min_hits = static_cast<int>(cfg.get_int("association.min_hits", a.min_hits));
  a.validate();
  rc.link_path = resolve(base_dir, cfg.get("models.link", ""));
  rc.compute_path = resolve(base_dir, cfg.get("models.compute", ""));
  rc.full_frame_bytes = static_cast<std::size_t>(cfg.get_int("models.full_frame_bytes", static_cast<long>(rc.full_frame_bytes)));
  if (cfg.has("run.seed")) rc.seed = static_cast<std::uint64_t>(cfg.get_int("run.seed", 0));
  if (cfg.has("run.architecture")) rc.architecture = parse_architecture(cfg.get("run.architecture"));
  rc.output_dir = resolve(base_dir, cfg.get("run.output", rc.output_dir));
  return rc;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config", "cannot open run config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), fs::path(path).parent_path().string());
}

std::unique_ptr<Detector> make_detector(const DetectorSpec& spec,
                                        const std::vector<Resolution>& ladder) {
  if (spec.kind == DetectorSpec::Kind::Replay) return load_replay(spec.replay_path, ladder);
  return std::make_unique<SyntheticDetector>(spec.synthetic, ladder);
}

Experiment Experiment::from_config(const RunConfig& cfg) {
  Experiment ex;
  ex.policy = ResolutionPolicy::load(cfg.policy, cfg.k);
  const auto& ladder = ex.policy.ladder;
  if (cfg.scene_path.empty()) throw Error("config", "no scene path configured");
  ex.gt = load_mot_gt(cfg.scene_path);
  if (cfg.scene_native) ex.gt = rescale(ex.gt, *cfg.scene_native, ex.policy.full());
  ex.has_gt = true;
  ex.frames = frames_from_gt(ex.gt, ex.policy.full(), cfg.sequence_id);

  DetectorSpec server = cfg.detector;
  DetectorSpec camera = cfg.camera_detector.value_or(cfg.detector);
  if (cfg.seed) {
    server.synthetic.seed = *cfg.seed;
    camera.synthetic.seed = *cfg.seed;
  }
  ex.server = make_detector(server, ladder);
  ex.camera = make_detector(camera, ladder);
  ex.association = cfg.association;
  ex.link = cfg.link_path.empty() ? LinkModel{} : LinkModel::load(cfg.link_path);
  ex.compute = cfg.compute_path.empty() ? ComputeModel::defaults(ladder)
                                        : ComputeModel::load(cfg.compute_path, ladder);
  ex.bytes = FrameBytesModel::defaults(ladder, cfg.full_frame_bytes);
  ex.architecture = cfg.architecture;
  return ex;
}

Experiment Experiment::synthetic(const GtSequence& gt, ResolutionPolicy policy,
                                 SyntheticDetectorConfig server_cfg,
                                 std::optional<SyntheticDetectorConfig> camera_cfg) {
  Experiment ex;
  policy.validate();
  ex.policy = std::move(policy);
  const auto& ladder = ex.policy.ladder;
  ex.gt = gt;
  ex.has_gt = true;
  ex.frames = frames_from_gt(gt, ex.policy.full(), "synthetic");
  ex.server = std::make_shared<SyntheticDetector>(server_cfg, ladder);
  ex.camera = std::make_shared<SyntheticDetector>(camera_cfg.value_or(server_cfg), ladder);
  ex.compute = ComputeModel::defaults(ladder);
  ex.bytes = FrameBytesModel::defaults(ladder);
  return ex;
}

SimulationInputs Experiment::simulation_inputs() const {
  return {frames, policy, {camera.get(), server.get()}, link, compute, bytes, association};
}

TrackRun run_track(const Experiment& ex, const NodeProfile& timing) {
  const Detector& det = *ex.server;
  TrackRun run;
  Scheduler scheduler(ex.policy);
  Tracker tracker(ex.association);
  const auto& ladder = ex.policy.ladder;
  std::map<int, int> mix_counts;
  std::vector<std::vector<int>> rung_counts(ladder.size());
  double total_s = 0.0;

  for (const Frame& frame : ex.frames) {
    if (!det.covers(frame)) {
      run.log.push_back("detector: no replay records for frame " + std::to_string(frame.frame_index));
    }
    ScheduledFrame sf;
    std::vector<TrackOutput> outputs;
    try {
      sf = scheduler.next(frame, det);
      outputs = tracker.step(sf.detections, frame.frame_index);
    } catch (const Error& e) {
      throw Error(e.module(), "frame " + std::to_string(frame.frame_index) + ": " + e.what());
    }
    for (const auto& b : tracker.last_backfill()) {
      run.results[b.frame_index].push_back({b.track_id, b.box, b.score});
    }
    for (const auto& o : outputs) run.results[o.frame_index].push_back({o.track_id, o.box, o.score});

    const auto& cost = timing.at(sf.working);
    total_s += cost.detect_s + cost.associate_s + (sf.decision_frame ? timing.select_s : 0.0);
    ++mix_counts[sf.working.index];
    if (sf.decision_frame) ++run.decision_count;
    for (const auto& r : ladder) {
      rung_counts[static_cast<std::size_t>(r.index)].push_back(
          static_cast<int>(det.detect(frame, r).size()));
    }
    sf.detections.clear();
    run.schedule.push_back(std::move(sf));
  }

  const int n = static_cast<int>(ex.frames.size());
  run.simulated_fps = total_s > 0.0 ? n / total_s : 0.0;
  run.frame_mix = mix_of(ladder, mix_counts, n);

  if (ex.has_gt) {
    try {
      SequenceReport rep = evaluate_sequence(ex.gt, run.results);
      rep.fps = run.simulated_fps;
      rep.frame_mix = run.frame_mix;
      for (const auto& r : ladder) {
        const auto rates = detection_rate(rung_counts[static_cast<std::size_t>(r.index)], rung_counts.back());
        double mean = 1.0;
        if (!rates.empty()) {
          mean = 0.0;
          for (double v : rates) mean += v;
          mean /= static_cast<double>(rates.size());
        }
        rep.detection_rate_per_resolution[r.to_string()] = mean;
      }
      run.report = std::move(rep);
    } catch (const Error& e) {
      run.report_error = e.module() + ": " + e.what();
    }
  }
  return run;
}

TrackRun run_track(const Experiment& ex) { return run_track(ex, ex.compute.server); }

TrackRun run_track_to_disk(const RunConfig& cfg) {
  const Experiment ex = Experiment::from_config(cfg);
  TrackRun run = run_track(ex);
  fs::create_directories(cfg.output_dir);
  {
    std::ofstream out(fs::path(cfg.output_dir) / "results.txt");
    if (!out) throw Error("cli", "cannot write results under '" + cfg.output_dir + "'");
    write_mot_results(out, run.results);
  }
  if (run.report) {
    std::ofstream out(fs::path(cfg.output_dir) / "report.txt");
    write_report_text(out, *run.report);
    out << '\n';
    write_report_kv(out, *run.report);
  }
  return run;
}

SweepAxis parse_sweep_axis(const std::string& text) {
  if (text == "policy") return SweepAxis::Policy;
  if (text == "k" || text == "K") return SweepAxis::K;
  if (text == "arch" || text == "architecture") return SweepAxis::Architecture;
  throw Error("cli", "unknown sweep axis '" + text + "'");
}

SweepTable sweep(const Experiment& base, SweepAxis axis, const std::vector<std::string>& values) {
  SweepTable table;
  table.axis = axis;
  for (const auto& r : base.policy.ladder) table.resolutions.push_back(r.to_string());
  std::map<Architecture, PartitionTrace> traces;

  for (const auto& value : values) {
    SweepRow row;
    row.setting = value;
    if (axis == SweepAxis::Architecture) {
      const Architecture arch = parse_architecture(value);
      row.setting = to_string(arch);
      const auto sim = simulate(arch, base.simulation_inputs());
      const auto& t = sim.trace;
      row.partition = true;
      row.fps = t.effective_fps;
      row.server_ms = 1e3 * t.per_frame(t.server_compute_s);
      row.camera_ms = 1e3 * t.per_frame(t.camera_compute_s);
      row.transmission_ms = 1e3 * t.per_frame(t.transmission_s);
      row.uplink_kb = t.per_frame(static_cast<double>(t.uplink_bytes)) / 1024.0;
      std::map<int, int> counts;
      for (const auto& f : t.frames) {
        ++counts[f.working.index];
        if (f.decision_frame) ++row.decisions;
      }
      row.frame_mix = mix_of(base.policy.ladder, counts, static_cast<int>(t.frames.size()));
      row.mota = row.idf1 = std::nan("");
      if (base.has_gt) {
        try {
          const auto rep = evaluate_sequence(base.gt, sim.tracks);
          row.mota = rep.mota;
          row.idf1 = rep.idf1;
        } catch (const Error&) {
        }
      }
      traces[arch] = t;
    } else {
      Experiment ex = base;
      if (axis == SweepAxis::Policy) {
        ex.policy = ResolutionPolicy::load(value, is_preset(value) ? base.policy.interval_k : 0);
      } else {
        int k = 0;
        try {
          k = std::stoi(value);
        } catch (const std::exception&) {
          throw Error("cli", "bad K value '" + value + "'");
        }
        ex.policy.interval_k = k;
        ex.policy.validate();
      }
      const TrackRun run = run_track(ex);
      row.fps = run.simulated_fps;
      row.decisions = run.decision_count;
      row.frame_mix = run.frame_mix;
      row.mota = run.report ? run.report->mota : std::nan("");
      row.idf1 = run.report ? run.report->idf1 : std::nan("");
    }
    table.rows.push_back(std::move(row));
  }
  if (axis == SweepAxis::Architecture && traces.size() == std::size(kAllArchitectures)) {
    table.ordering = qualitative_check(traces);
  }
  return table;
}

void write_sweep_text(std::ostream& out, const SweepTable& t) {
  const bool part = !t.rows.empty() && t.rows.front().partition;
  out << std::left << std::setw(12) << "setting" << std::right << std::setw(9) << "MOTA"
      << std::setw(9) << "IDF1" << std::setw(10) << "FPS(sim)" << std::setw(11) << "decisions";
  for (const auto& r : t.resolutions) out << std::setw(11) << r;
  if (part) {
    out << std::setw(12) << "server_ms" << std::setw(12) << "camera_ms" << std::setw(12) << "trans_ms"
        << std::setw(12) << "uplink_KB";
  }
  out << '\n';
  for (const auto& row : t.rows) {
    out << std::left << std::setw(12) << row.setting << std::right << std::setw(9) << fmt(row.mota, 4)
        << std::setw(9) << fmt(row.idf1, 4) << std::setw(10) << fmt(row.fps, 2) << std::setw(11)
        << row.decisions;
    for (const auto& r : t.resolutions) {
      auto it = row.frame_mix.find(r);
      out << std::setw(11) << (fmt(100.0 * (it == row.frame_mix.end() ? 0.0 : it->second), 1) + "%");
    }
    if (part) {
      out << std::setw(12) << fmt(row.server_ms, 3) << std::setw(12) << fmt(row.camera_ms, 3)
          << std::setw(12) << fmt(row.transmission_ms, 3) << std::setw(12) << fmt(row.uplink_kb, 2);
    }
    out << '\n';
  }
  if (t.ordering) {
    out << '\n';
    write_report(out, *t.ordering);
  }
}

void write_sweep_csv(std::ostream& out, const SweepTable& t) {
  out << "setting,mota,idf1,fps_sim,decisions";
  for (const auto& r : t.resolutions) out << ",mix_" << r;
  out << ",server_ms,camera_ms,transmission_ms,uplink_kb\n";
  for (const auto& row : t.rows) {
    out << row.setting << ',' << fmt(row.mota, 6) << ',' << fmt(row.idf1, 6) << ',' << fmt(row.fps, 4)
        << ',' << row.decisions;
    for (const auto& r : t.resolutions) {
      auto it = row.frame_mix.find(r);
      out << ',' << fmt(it == row.frame_mix.end() ? 0.0 : it->second, 6);
    }
    out << ',' << fmt(row.server_ms, 4) << ',' << fmt(row.camera_ms, 4) << ','
        << fmt(row.transmission_ms, 4) << ',' << fmt(row.uplink_kb, 4) << '\n';
  }
}

}  // namespace resmot
