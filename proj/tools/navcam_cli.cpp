// navcam command line: calibrate a camera from planar correspondences,
// analyze one overhead frame, or run the closed-loop simulator.
//
// Exit codes, shared by all subcommands:
//   0 success / goal reached
//   1 malformed input or bad invocation
//   2 degenerate geometry (calibration cannot proceed)
//   3 detection failure (robot or target not found)
//   4 planning failure (no waypoint / step limit)
//   5 collision
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "navcam/calib.hpp"
#include "navcam/errors.hpp"
#include "navcam/image.hpp"
#include "navcam/measure.hpp"
#include "navcam/planner.hpp"
#include "navcam/segment.hpp"
#include "navcam/sim_config.hpp"
#include "navcam/synth.hpp"

namespace {

using namespace navcam;

constexpr int kOk = 0;
constexpr int kBadInput = 1;
constexpr int kDegenerate = 2;
constexpr int kDetectionFailure = 3;
constexpr int kPlanFailure = 4;
constexpr int kCollision = 5;

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

// Options common to analyze and simulate. A value is applied only when the
// flag was given, so config-file settings are not clobbered by defaults.
struct TuningFlags {
  int margin = 0;
  int min_value = 0;
  int min_blob_area = 0;
  double clearance = 0.0;
  double goal_tolerance = 0.0;
  double max_step = 0.0;
  CLI::Option* margin_opt = nullptr;
  CLI::Option* min_value_opt = nullptr;
  CLI::Option* min_blob_area_opt = nullptr;
  CLI::Option* clearance_opt = nullptr;
  CLI::Option* goal_tolerance_opt = nullptr;
  CLI::Option* max_step_opt = nullptr;

  void attach(CLI::App* cmd) {
    margin_opt = cmd->add_option("--margin", margin, "Dominance margin for color classification");
    min_value_opt = cmd->add_option("--min-value", min_value, "Minimum winning channel value");
    min_blob_area_opt =
        cmd->add_option("--min-blob-area", min_blob_area, "Smallest blob kept, in pixels");
    clearance_opt = cmd->add_option("--clearance", clearance, "Obstacle clearance for planning");
    goal_tolerance_opt =
        cmd->add_option("--goal-tolerance", goal_tolerance, "Stop radius around the goal");
    max_step_opt = cmd->add_option("--max-step", max_step, "Longest single FORWARD move");
  }

  void apply(ClassifierParams* classifier, int* blob_area, PlannerParams* planner) const {
    if (margin_opt->count()) classifier->dominance_margin = margin;
    if (min_value_opt->count()) classifier->min_value = min_value;
    if (min_blob_area_opt->count()) *blob_area = min_blob_area;
    if (clearance_opt->count()) planner->clearance = clearance;
    if (goal_tolerance_opt->count()) planner->goal_tolerance = goal_tolerance;
    if (max_step_opt->count()) planner->max_step = max_step;
  }
};

PpmFormat parse_format(const std::string& name) {
  return name == "p3" ? PpmFormat::P3 : PpmFormat::P6;
}

void warn_tolerance(const PlannerParams& p) {
  if (p.goal_tolerance >= p.clearance) {
    std::fprintf(stderr,
                 "warning: goal_tolerance (%g) >= clearance (%g); the stop radius "
                 "can overlap inflated obstacles\n",
                 p.goal_tolerance, p.clearance);
  }
}

// --- calibrate ---------------------------------------------------------------

int cmd_calibrate(const std::string& corr_path, const std::string& out_path) {
  const std::vector<PlanarCorrespondences> views = parse_correspondences(read_text(corr_path));
  const CalibrationResult result = calibrate(views);
  write_text(out_path, format_calibration(result));
  std::printf("rms= %.9g\n", result.rms_px);
  if (!result.converged) std::fprintf(stderr, "warning: refinement hit the iteration cap\n");
  return kOk;
}

// --- analyze -----------------------------------------------------------------

// Report for a frame where detection failed: positions for whatever was
// found, MISSING markers for the rest. Distances need the robot, so OBST
// rows fall back to position-only when it is absent.
std::string missing_report(const std::vector<Blob>& blobs, const GroundMap* map) {
  const Blob* robot = nullptr;
  const Blob* target = nullptr;
  std::vector<const Blob*> obstacles;
  for (const Blob& b : blobs) {
    if (b.color == ColorClass::RobotGreen && !robot) robot = &b;
    if (b.color == ColorClass::TargetRed && !target) target = &b;
    if (b.color == ColorClass::ObstacleBlue) obstacles.push_back(&b);
  }

  char buf[160];
  std::string out = "FRAME 0\n";
  if (robot) {
    std::snprintf(buf, sizeof buf, "ROBOT %.3f %.3f\n", robot->centroid.x, robot->centroid.y);
    out += buf;
  } else {
    out += "ROBOT MISSING\n";
  }
  if (target) {
    std::snprintf(buf, sizeof buf, "TARGET %.3f %.3f", target->centroid.x, target->centroid.y);
    out += buf;
    if (robot) {
      std::snprintf(buf, sizeof buf, " DIST_PX %.3f",
                    euclidean_px(robot->centroid, target->centroid));
      out += buf;
      if (map) {
        std::snprintf(buf, sizeof buf, " DIST_CM %.3f",
                      euclidean_cm(*map, robot->centroid, target->centroid));
        out += buf;
      }
    }
    out += '\n';
  } else {
    out += "TARGET MISSING\n";
  }
  int k = 1;
  for (const Blob* o : obstacles) {
    std::snprintf(buf, sizeof buf, "OBST %d %.3f %.3f", k, o->centroid.x, o->centroid.y);
    out += buf;
    if (robot) {
      std::snprintf(buf, sizeof buf, " DIST_PX %.3f", euclidean_px(robot->centroid, o->centroid));
      out += buf;
      if (map) {
        std::snprintf(buf, sizeof buf, " DIST_CM %.3f",
                      euclidean_cm(*map, robot->centroid, o->centroid));
        out += buf;
      }
      std::snprintf(buf, sizeof buf, " BEARING_DEG %.3f",
                    bearing_deg(robot->centroid, o->centroid));
      out += buf;
    }
    out += '\n';
    ++k;
  }
  return out;
}

struct AnalyzeArgs {
  std::string image_path;
  std::string prefix;
  std::string calib_path;
  int floor_view = 0;
  bool floor_view_given = false;
  ClassifierParams classifier;
  int min_blob_area = 20;
  PlannerParams planner;
  PpmFormat format = PpmFormat::P6;
};

int cmd_analyze(const AnalyzeArgs& a) {
  const ImageRGB img = read_ppm_file(a.image_path);
  const LabelMap labels = label_image(img, a.classifier);
  const std::vector<Blob> blobs = extract_blobs(labels, a.min_blob_area);
  write_ppm_file(render_label_map(labels, blobs), a.prefix + "_labels.ppm", a.format);

  std::optional<GroundMap> map;
  if (!a.calib_path.empty()) {
    const CalibrationResult calib = parse_calibration(read_text(a.calib_path));
    if (calib.view_ids.empty())
      throw std::runtime_error("calibration file " + a.calib_path + " carries no views");
    std::size_t pick = 0;
    if (a.floor_view_given) {
      const auto it = std::find(calib.view_ids.begin(), calib.view_ids.end(), a.floor_view);
      if (it == calib.view_ids.end())
        throw std::runtime_error("view " + std::to_string(a.floor_view) + " not in " +
                                 a.calib_path);
      pick = std::size_t(it - calib.view_ids.begin());
    }  // views are stored in ascending id order, so index 0 is the lowest id
    map.emplace(calib.intrinsics, calib.poses[pick]);
  }

  const std::string report_path = a.prefix + "_report.txt";
  ArenaObservation obs;
  try {
    obs = scene_from_blobs(blobs, 0);
  } catch (const DetectionError&) {
    const std::string text = missing_report(blobs, map ? &*map : nullptr);
    write_text(report_path, text);
    std::fputs(text.c_str(), stdout);
    return kDetectionFailure;
  }

  const GroundMap* mp = map ? &*map : nullptr;
  std::string text = format_report(build_report(obs, mp));

  // Advisory command for the frame. With a ground map the planner works in
  // centimetres on the floor, otherwise in raw pixels with the same numbers.
  warn_tolerance(a.planner);
  const Vec2 robot = mp ? mp->to_floor(obs.robot.centroid) : obs.robot.centroid;
  const Vec2 goal = mp ? mp->to_floor(obs.target.centroid) : obs.target.centroid;
  std::vector<ObstacleDisk> disks;
  for (const ObstacleObservation& o : obs.obstacles) {
    if (mp) {
      const Vec2 c = mp->to_floor(o.blob.centroid);
      const Vec2 edge = mp->to_floor(o.blob.centroid + Vec2{o.radius_px, 0.0});
      disks.push_back({c, (edge - c).norm()});
    } else {
      disks.push_back({o.blob.centroid, o.radius_px});
    }
  }

  bool no_waypoint = false;
  MotionCommand cmd{CommandKind::Stop, 0.0};
  if ((robot - goal).norm() > a.planner.goal_tolerance) {
    try {
      const Vec2 waypoint = choose_waypoint(robot, goal, disks, a.planner);
      cmd = next_command({robot, 0.0}, waypoint, goal, a.planner);
    } catch (const PlanningError&) {
      no_waypoint = true;
    }
  }
  text += no_waypoint ? "PLANNER NO_WAYPOINT\n" : "CMD " + format_command(cmd) + "\n";

  write_text(report_path, text);
  std::fputs(text.c_str(), stdout);
  return no_waypoint ? kPlanFailure : kOk;
}

// --- simulate ----------------------------------------------------------------

struct SimulateArgs {
  std::string config_path;
  std::string prefix;
  std::uint64_t seed = 0;
  bool seed_given = false;
  const TuningFlags* tuning = nullptr;
  PpmFormat format = PpmFormat::P6;
};

int cmd_simulate(const SimulateArgs& s) {
  SimConfig cfg = parse_sim_config(read_text(s.config_path));
  s.tuning->apply(&cfg.classifier, &cfg.min_blob_area, &cfg.planner);
  if (s.seed_given) {
    cfg.seed = s.seed;
    cfg.render_noise.seed = s.seed;
  }
  warn_tolerance(cfg.planner);

  const TrajectoryLog log = run_closed_loop(cfg);
  write_text(s.prefix + "_trajectory.txt", format_trajectory(log));

  // Annotated view of the final state: what the camera would see after the
  // last command, segmented with the run's own settings.
  ArenaSpec final_arena = cfg.arena;
  final_arena.robot.center_cm = log.final_true_pos_cm;
  RenderNoise rn = cfg.render_noise;
  rn.seed = frame_render_seed(cfg.seed, int(log.steps.size()));
  const RenderedArena rendered = render_arena(final_arena, cfg.camera, rn);
  const LabelMap labels = label_image(rendered.image, cfg.classifier);
  const std::vector<Blob> blobs = extract_blobs(labels, cfg.min_blob_area);
  write_ppm_file(render_label_map(labels, blobs), s.prefix + "_final.ppm", s.format);

  if (log.collided) return kCollision;
  switch (log.status) {
    case RunStatus::Goal: return kOk;
    case RunStatus::DetectionFailure: return kDetectionFailure;
    case RunStatus::StepLimit:
    case RunStatus::NoWaypoint: return kPlanFailure;
  }
  return kPlanFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overhead-camera robot navigation toolkit"};
  app.require_subcommand(1);

  // calibrate
  std::string corr_path, calib_out;
  CLI::App* calibrate_cmd =
      app.add_subcommand("calibrate", "Estimate camera intrinsics from correspondence files");
  calibrate_cmd->add_option("correspondences", corr_path, "Planar correspondence file")
      ->required();
  calibrate_cmd->add_option("output", calib_out, "Calibration file to write")->required();

  // analyze
  AnalyzeArgs an;
  std::string an_format = "p6";
  TuningFlags an_tuning;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Segment and measure one overhead frame");
  analyze_cmd->add_option("image", an.image_path, "PPM frame to analyze")->required();
  analyze_cmd->add_option("prefix", an.prefix, "Output prefix for _labels.ppm and _report.txt")
      ->required();
  analyze_cmd->add_option("--calib", an.calib_path,
                          "Calibration file; enables centimetre measurements");
  CLI::Option* floor_view_opt = analyze_cmd->add_option(
      "--floor-view", an.floor_view, "Calibration view lying on the floor (default: lowest id)");
  an_tuning.attach(analyze_cmd);
  analyze_cmd->add_option("--format", an_format, "PPM flavor for written images")
      ->check(CLI::IsMember({"p3", "p6"}));

  // simulate
  SimulateArgs sim;
  std::string sim_format = "p6";
  TuningFlags sim_tuning;
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Run the closed perceive-plan-act loop");
  simulate_cmd->add_option("config", sim.config_path, "Simulation config file")->required();
  simulate_cmd
      ->add_option("prefix", sim.prefix, "Output prefix for _trajectory.txt and _final.ppm")
      ->required();
  CLI::Option* seed_opt =
      simulate_cmd->add_option("--seed", sim.seed, "Override the config's random seed");
  sim_tuning.attach(simulate_cmd);
  simulate_cmd->add_option("--format", sim_format, "PPM flavor for written images")
      ->check(CLI::IsMember({"p3", "p6"}));

  try {
    app.parse(argc, argv);

    if (calibrate_cmd->parsed()) return cmd_calibrate(corr_path, calib_out);
    if (analyze_cmd->parsed()) {
      an.floor_view_given = floor_view_opt->count() > 0;
      an_tuning.apply(&an.classifier, &an.min_blob_area, &an.planner);
      an.format = parse_format(an_format);
      return cmd_analyze(an);
    }
    if (simulate_cmd->parsed()) {
      sim.seed_given = seed_opt->count() > 0;
      sim.tuning = &sim_tuning;
      sim.format = parse_format(sim_format);
      return cmd_simulate(sim);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  } catch (const navcam::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadInput;
  } catch (const navcam::GeometryError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDegenerate;
  } catch (const navcam::DetectionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDetectionFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadInput;
  }
  return kOk;
}
