#pragma once

#include <string>
#include <vector>

#include "navcam/measure.hpp"
#include "navcam/planner.hpp"
#include "navcam/synth.hpp"

namespace navcam {

// Full closed-loop setup. The file form carries the [arena] [camera] [noise]
// [planner] sections; classifier settings arrive via CLI flags only and ride
// along here with their defaults.
struct SimConfig {
  ArenaSpec arena;
  double robot_heading_deg = 0.0;
  CameraSpec camera;
  RenderNoise render_noise;  // per-frame seeds are derived from `seed`
  ActuationNoise actuation;
  std::uint64_t seed = 1;
  PlannerParams planner;
  int max_steps = 200;
  ClassifierParams classifier;
  int min_blob_area = 20;
};

// Plain-text config: `key = value` lines under `[arena] [camera] [noise]
// [planner]` headers, '#' comments, unknown sections or keys rejected.
// The [camera] section accepts either an explicit pose (`r = <9>`,
// `t = <3>`) or `height = <cm>` for an overhead camera above the floor
// centre; omitting the section entirely means overhead at 200 cm.
SimConfig parse_sim_config(const std::string& text);

// Canonical form: fixed section and key order, nine significant digits,
// explicit pose. write -> read -> write is byte-stable.
std::string format_sim_config(const SimConfig& config);

// Render seed for one frame of a run; frame 0 renders with the base seed.
std::uint64_t frame_render_seed(std::uint64_t base_seed, int frame);

enum class RunStatus { Goal, StepLimit, NoWaypoint, DetectionFailure };

struct TrajectoryStep {
  int frame_id = 0;
  Vec2 true_pos_cm;
  double true_heading_deg = 0.0;
  bool has_report = false;
  DistanceReport report;
  Vec2 perceived_pos_cm;
  std::string note;  // "ROBOT MISSING", "TARGET MISSING", "PLANNER NO_WAYPOINT"
  bool has_cmd = false;
  MotionCommand cmd;
  bool collided = false;  // latched collision flag after acting
};

struct TrajectoryLog {
  std::vector<TrajectoryStep> steps;
  RunStatus status = RunStatus::StepLimit;
  bool collided = false;
  Vec2 final_true_pos_cm;
  double final_true_heading_deg = 0.0;
};

// Perceive -> plan -> act loop: render, label, extract blobs, observe,
// report, plan, step, until STOP or max_steps. Detection failures and
// planner dead-ends end the run with their status; they do not throw.
TrajectoryLog run_closed_loop(const SimConfig& config);

// Per step: the frame's report record, a CMD line, and one STEP line with
// true pose, perceived position and the latched collision flag; then FINAL
// and RESULT lines. Three decimals throughout.
std::string format_trajectory(const TrajectoryLog& log);

}  // namespace navcam
