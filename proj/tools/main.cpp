#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "resmot/pipeline.hpp"
#include "resmot/scene.hpp"

namespace fs = std::filesystem;
using namespace resmot;

namespace {

struct CommonOptions {
  std::string config;
  std::string scene;
  std::string native;
  std::string policy;
  int k = 0;
  std::string link;
  std::string compute;
  std::string arch;
  long long seed = -1;
  double floor = 0.0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Run config (sectioned key=value)")->check(CLI::ExistingFile);
  cmd->add_option("--scene", o.scene, "Scene file, MOTChallenge ground-truth format");
  cmd->add_option("--native", o.native, "Coordinate frame of the scene file, WxH");
  cmd->add_option("--policy", o.policy, "C1, C2, C3 or a policy file");
  cmd->add_option("--k", o.k, "Adaptation interval")->check(CLI::PositiveNumber);
  cmd->add_option("--link", o.link, "Link model file");
  cmd->add_option("--compute", o.compute, "Compute model file");
  cmd->add_option("--seed", o.seed, "Seed for synthetic detectors");
  cmd->add_option("--floor", o.floor, "Synthetic detectability floor in pixels");
}

RunConfig build_config(const CommonOptions& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : RunConfig::load(o.config);
  if (!o.scene.empty()) cfg.scene_path = o.scene;
  if (!o.native.empty()) cfg.scene_native = parse_resolution(o.native);
  if (!o.policy.empty()) cfg.policy = o.policy;
  if (o.k > 0) cfg.k = o.k;
  if (!o.link.empty()) cfg.link_path = o.link;
  if (!o.compute.empty()) cfg.compute_path = o.compute;
  if (!o.arch.empty()) cfg.architecture = parse_architecture(o.arch);
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  if (o.floor > 0.0) {
    cfg.detector.synthetic.min_detectable_height = o.floor;
    if (cfg.camera_detector) cfg.camera_detector->synthetic.min_detectable_height = o.floor;
  }
  if (cfg.scene_path.empty()) throw Error("cli", "no scene given (use --scene or a config)");
  return cfg;
}

std::ofstream open_out(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error("cli", "cannot write '" + path + "'");
  return out;
}

int cmd_track(const CommonOptions& o, const std::string& out_dir) {
  RunConfig cfg = build_config(o);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  const TrackRun run = run_track_to_disk(cfg);
  for (const auto& line : run.log) std::cerr << line << '\n';
  std::cout << "results: " << (fs::path(cfg.output_dir) / "results.txt").string() << '\n';
  std::cout << "decision frames: " << run.decision_count << '\n';
  if (!run.report) throw Error("metrics", run.report_error.empty() ? "no report" : run.report_error);
  write_report_text(std::cout, *run.report);
  return 0;
}

int cmd_simulate(const CommonOptions& o, const std::string& out, const std::string& tracks_out) {
  const RunConfig cfg = build_config(o);
  const Experiment ex = Experiment::from_config(cfg);
  const SimulationResult sim = simulate(ex.architecture, ex.simulation_inputs());
  const auto& t = sim.trace;
  if (!out.empty()) {
    auto f = open_out(out);
    write_trace_csv(f, t);
  }
  if (!tracks_out.empty()) {
    auto f = open_out(tracks_out);
    write_mot_results(f, sim.tracks);
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "architecture      %s\nframes            %zu\nserver_ms/frame   %.3f\n"
                "camera_ms/frame   %.3f\ntransmit_ms/frame %.3f\nuplink_KB/frame   %.3f\n"
                "effective_fps     %.3f\n",
                to_string(t.architecture), t.frame_count(), 1e3 * t.per_frame(t.server_compute_s),
                1e3 * t.per_frame(t.camera_compute_s), 1e3 * t.per_frame(t.transmission_s),
                t.per_frame(static_cast<double>(t.uplink_bytes)) / 1024.0, t.effective_fps);
  std::cout << buf;
  return 0;
}

int cmd_eval(const std::string& gt_path, const std::string& res_path, double iou_thr,
             const std::string& format) {
  const GtSequence gt = load_mot_gt(gt_path);
  const ResultSequence res = load_mot_results(res_path);
  const SequenceReport rep = evaluate_sequence(gt, res, iou_thr);
  if (format == "text" || format == "both") write_report_text(std::cout, rep);
  if (format == "both") std::cout << '\n';
  if (format == "kv" || format == "both") write_report_kv(std::cout, rep);
  return 0;
}

int cmd_select(const std::string& stack_path, const std::string& policy_name, int k, int frame) {
  std::ifstream in(stack_path);
  if (!in) throw Error("cli", "cannot open stack '" + stack_path + "'");
  const HeatmapStack stack = read_stack(in);
  const ResolutionPolicy policy = ResolutionPolicy::load(policy_name, k);
  const SelectionDecision d = select_resolution(stack, policy, frame);
  std::cout << "chosen " << d.chosen.to_string() << " (index " << d.chosen.index << ")\n";
  std::cout << "valid frames " << d.frame_index << ".." << d.valid_until << '\n';
  char buf[128];
  for (std::size_t i = 0; i < d.ratios.size(); ++i) {
    const auto& th = policy.thresholds[i];
    std::snprintf(buf, sizeof buf, "%-10s ratio=%.6f threshold=%s\n",
                  policy.ladder[i].to_string().c_str(), d.ratios[i],
                  th ? std::to_string(*th).c_str() : "excluded");
    std::cout << buf;
  }
  return 0;
}

int cmd_render(const std::string& scene, const std::string& native, const std::string& res_text,
               const std::string& ladder_text, int frame, bool predicted, double floor,
               const std::string& out_dir) {
  const auto ladder = ladder_text.empty() ? default_ladder() : parse_ladder(ladder_text);
  const Resolution& full = ladder.back();
  GtSequence gt = load_mot_gt(scene);
  if (!native.empty()) gt = rescale(gt, parse_resolution(native), full);
  Resolution res = full;
  if (!res_text.empty()) res = parse_resolution(res_text);
  SyntheticDetectorConfig dc;
  if (floor > 0.0) dc.min_detectable_height = floor;
  const SyntheticDetector det(dc, ladder);

  fs::create_directories(out_dir);
  int written = 0;
  for (const Frame& fr : frames_from_gt(gt, full, "scene")) {
    if (frame > 0 && fr.frame_index != frame) continue;
    char name[64];
    std::snprintf(name, sizeof name, predicted ? "frame_%06d.stack" : "frame_%06d.hm", fr.frame_index);
    auto out = open_out((fs::path(out_dir) / name).string());
    if (predicted) {
      write_stack(out, det.predict_stack(fr));
    } else {
      std::vector<BoundingBox> boxes;
      for (const auto& o : fr.objects) boxes.push_back(o.box);
      write_heatmap(out, render_gt_heatmap(boxes, res, full));
    }
    ++written;
  }
  if (written == 0) throw Error("heatmap", "no frames to render");
  std::cout << "wrote " << written << " file(s) to " << out_dir << '\n';
  return 0;
}

int cmd_sweep(const CommonOptions& o, const std::string& axis_text,
              const std::vector<std::string>& values, const std::string& csv) {
  const RunConfig cfg = build_config(o);
  const Experiment ex = Experiment::from_config(cfg);
  const SweepAxis axis = parse_sweep_axis(axis_text);
  std::vector<std::string> vals = values;
  if (vals.empty()) {
    if (axis == SweepAxis::Policy) vals = {"C1", "C2", "C3"};
    if (axis == SweepAxis::K) vals = {"2", "10", "20", "40"};
    if (axis == SweepAxis::Architecture) vals = {"co", "so", "soat", "sat"};
  }
  const SweepTable table = sweep(ex, axis, vals);
  write_sweep_text(std::cout, table);
  if (!csv.empty()) {
    auto f = open_out(csv);
    write_sweep_csv(f, table);
  }
  return 0;
}

int cmd_synth(const std::string& kind, int frames, int segment, std::uint64_t seed,
              double floor, const std::string& out) {
  const auto ladder = default_ladder();
  SceneSpec spec;
  if (kind == "near-far") {
    spec = near_far_scene(ladder, frames, segment, seed);
  } else if (kind == "mixed") {
    spec = mixed_scene(ladder, frames, segment, seed);
  } else {
    spec.ladder = ladder;
    spec.seed = seed;
    spec.segments.push_back({parse_segment_kind(kind), frames});
  }
  if (floor > 0.0) spec.floor = floor;
  auto f = open_out(out);
  write_mot_gt(f, generate_scene(spec));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resolution-adaptive multi-object tracking toolkit"};
  app.require_subcommand(1);

  CommonOptions track_o, sim_o, sweep_o;
  std::string track_out;
  auto* track = app.add_subcommand("track", "Track a scene and write results + report");
  add_common(track, track_o);
  track->add_option("--out", track_out, "Output directory");

  std::string sim_out, sim_tracks;
  auto* sim = app.add_subcommand("simulate", "Simulate one camera/server partition");
  add_common(sim, sim_o);
  sim->add_option("--arch", sim_o.arch, "co, so, soat or sat");
  sim->add_option("--out", sim_out, "Per-frame trace CSV");
  sim->add_option("--tracks", sim_tracks, "Tracking results file");

  std::string gt_path, res_path, format = "both";
  double iou_thr = 0.5;
  auto* ev = app.add_subcommand("eval", "Evaluate tracking results against ground truth");
  ev->add_option("--gt", gt_path, "Ground truth")->required()->check(CLI::ExistingFile);
  ev->add_option("--results", res_path, "Tracker results")->required()->check(CLI::ExistingFile);
  ev->add_option("--iou", iou_thr, "Match threshold")->check(CLI::Range(0.0, 1.0));
  ev->add_option("--format", format, "text, kv or both")
      ->check(CLI::IsMember({"text", "kv", "both"}));

  std::string stack_path, sel_policy = "C2";
  int sel_k = 0, sel_frame = 0;
  auto* sel = app.add_subcommand("select-res", "Choose a resolution from a heatmap stack");
  sel->add_option("--stack", stack_path, "Heatmap stack file")->required()->check(CLI::ExistingFile);
  sel->add_option("--policy", sel_policy, "C1, C2, C3 or a policy file");
  sel->add_option("--k", sel_k, "Adaptation interval override");
  sel->add_option("--frame", sel_frame, "Frame index of the decision");

  std::string r_scene, r_native, r_res, r_ladder, r_out = "heatmaps";
  int r_frame = 0;
  bool r_pred = false;
  double r_floor = 0.0;
  auto* ren = app.add_subcommand("render-heatmap", "Render ground-truth heatmaps for a scene");
  ren->add_option("--scene", r_scene, "Scene file")->required()->check(CLI::ExistingFile);
  ren->add_option("--native", r_native, "Coordinate frame of the scene file, WxH");
  ren->add_option("--resolution", r_res, "Rendering resolution for sigma, WxH (default full)");
  ren->add_option("--ladder", r_ladder, "Comma-separated ladder");
  ren->add_option("--frame", r_frame, "Only this frame");
  ren->add_flag("--stack", r_pred, "Write the synthetic detector's per-rung stack instead");
  ren->add_option("--floor", r_floor, "Synthetic detectability floor for --stack");
  ren->add_option("--out", r_out, "Output directory");

  std::string axis = "policy", sweep_csv;
  std::vector<std::string> sweep_values;
  auto* sw = app.add_subcommand("sweep", "Sweep policy, K or architecture");
  add_common(sw, sweep_o);
  sw->add_option("--axis", axis, "policy, k or arch")->check(CLI::IsMember({"policy", "k", "arch"}));
  sw->add_option("--values", sweep_values, "Axis values")->delimiter(',');
  sw->add_option("--csv", sweep_csv, "Also write the table as CSV");

  std::string s_kind = "mixed", s_out;
  int s_frames = 300, s_segment = 30;
  std::uint64_t s_seed = 7;
  double s_floor = 0.0;
  auto* syn = app.add_subcommand("synth-scene", "Generate a synthetic ground-truth scene");
  syn->add_option("--kind", s_kind, "near-far, mixed, near, mid, far or empty");
  syn->add_option("--frames", s_frames)->check(CLI::NonNegativeNumber);
  syn->add_option("--segment", s_segment)->check(CLI::PositiveNumber);
  syn->add_option("--seed", s_seed);
  syn->add_option("--floor", s_floor);
  syn->add_option("--out", s_out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "cli: error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*track) return cmd_track(track_o, track_out);
    if (*sim) return cmd_simulate(sim_o, sim_out, sim_tracks);
    if (*ev) return cmd_eval(gt_path, res_path, iou_thr, format);
    if (*sel) return cmd_select(stack_path, sel_policy, sel_k, sel_frame);
    if (*ren) return cmd_render(r_scene, r_native, r_res, r_ladder, r_frame, r_pred, r_floor, r_out);
    if (*sw) return cmd_sweep(sweep_o, axis, sweep_values, sweep_csv);
    if (*syn) return cmd_synth(s_kind, s_frames, s_segment, s_seed, s_floor, s_out);
  } catch (const Error& e) {
    std::cerr << e.module() << ": error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
