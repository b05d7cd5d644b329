#include "navcam/sim_config.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "navcam/errors.hpp"

namespace navcam {

namespace {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string strip_comment(const std::string& line) {
  const std::size_t hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail_line(std::size_t lineno, const std::string& detail) {
  throw ParseError("config: line " + std::to_string(lineno) + ": " + detail, lineno);
}

std::vector<double> parse_numbers(const std::string& value, std::size_t lineno,
                                  std::size_t expect) {
  std::istringstream iss(value);
  std::vector<double> out;
  double v;
  while (iss >> v) out.push_back(v);
  std::string extra;
  if (!iss.eof() && iss.fail()) {
    iss.clear();
    iss >> extra;
    fail_line(lineno, "not a number: '" + extra + "'");
  }
  if (out.size() != expect)
    fail_line(lineno, "expected " + std::to_string(expect) + " value(s), got " +
                          std::to_string(out.size()));
  return out;
}

Rgb8 parse_color(const std::string& value, std::size_t lineno) {
  const std::vector<double> v = parse_numbers(value, lineno, 3);
  for (double c : v)
    if (c < 0.0 || c > 255.0 || c != std::floor(c))
      fail_line(lineno, "color channels must be integers in [0,255]");
  return {std::uint8_t(v[0]), std::uint8_t(v[1]), std::uint8_t(v[2])};
}

}  // namespace

SimConfig parse_sim_config(const std::string& text) {
  SimConfig cfg;
  enum Section { None, Arena, Camera, Noise, Planner } section = None;
  bool have_rt = false, have_height = false;
  double height_cm = 200.0;

  std::istringstream lines(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(lines, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line == "[arena]") section = Arena;
      else if (line == "[camera]") section = Camera;
      else if (line == "[noise]") section = Noise;
      else if (line == "[planner]") section = Planner;
      else fail_line(lineno, "unknown section " + line);
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail_line(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail_line(lineno, "empty key");
    if (value.empty()) fail_line(lineno, "empty value for '" + key + "'");

    switch (section) {
      case None:
        fail_line(lineno, "key '" + key + "' outside any section");
      case Arena: {
        if (key == "floor") {
          const auto v = parse_numbers(value, lineno, 2);
          cfg.arena.floor_w_cm = v[0];
          cfg.arena.floor_h_cm = v[1];
        } else if (key == "background") {
          cfg.arena.background = parse_color(value, lineno);
        } else if (key == "robot") {
          const auto v = parse_numbers(value, lineno, 3);
          cfg.arena.robot = {{v[0], v[1]}, v[2]};
        } else if (key == "robot_color") {
          cfg.arena.robot_color = parse_color(value, lineno);
        } else if (key == "robot_heading") {
          cfg.robot_heading_deg = parse_numbers(value, lineno, 1)[0];
        } else if (key == "target") {
          const auto v = parse_numbers(value, lineno, 3);
          cfg.arena.target = {{v[0], v[1]}, v[2]};
        } else if (key == "target_color") {
          cfg.arena.target_color = parse_color(value, lineno);
        } else if (key == "obstacle") {
          const auto v = parse_numbers(value, lineno, 3);
          cfg.arena.obstacles.push_back({{v[0], v[1]}, v[2]});
        } else if (key == "obstacle_color") {
          cfg.arena.obstacle_color = parse_color(value, lineno);
        } else {
          fail_line(lineno, "unknown [arena] key '" + key + "'");
        }
        break;
      }
      case Camera: {
        if (key == "fx") cfg.camera.intrinsics.fx = parse_numbers(value, lineno, 1)[0];
        else if (key == "fy") cfg.camera.intrinsics.fy = parse_numbers(value, lineno, 1)[0];
        else if (key == "skew") cfg.camera.intrinsics.skew = parse_numbers(value, lineno, 1)[0];
        else if (key == "cx") cfg.camera.intrinsics.cx = parse_numbers(value, lineno, 1)[0];
        else if (key == "cy") cfg.camera.intrinsics.cy = parse_numbers(value, lineno, 1)[0];
        else if (key == "size") {
          const auto v = parse_numbers(value, lineno, 2);
          if (v[0] < 1.0 || v[1] < 1.0 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]))
            fail_line(lineno, "size must be two positive integers");
          cfg.camera.width = int(v[0]);
          cfg.camera.height = int(v[1]);
        } else if (key == "height") {
          height_cm = parse_numbers(value, lineno, 1)[0];
          have_height = true;
        } else if (key == "r") {
          const auto v = parse_numbers(value, lineno, 9);
          for (int i = 0; i < 9; ++i) cfg.camera.pose.r.m[std::size_t(i)] = v[std::size_t(i)];
          have_rt = true;
        } else if (key == "t") {
          const auto v = parse_numbers(value, lineno, 3);
          cfg.camera.pose.t = {v[0], v[1], v[2]};
          have_rt = true;
        } else {
          fail_line(lineno, "unknown [camera] key '" + key + "'");
        }
        if (have_height && have_rt)
          fail_line(lineno, "give either 'height' or an explicit 'r'/'t' pose, not both");
        break;
      }
      case Noise: {
        if (key == "color_sigma") cfg.render_noise.color_sigma = parse_numbers(value, lineno, 1)[0];
        else if (key == "illumination") cfg.render_noise.illumination = parse_numbers(value, lineno, 1)[0];
        else if (key == "turn_sigma") cfg.actuation.turn_sigma_deg = parse_numbers(value, lineno, 1)[0];
        else if (key == "step_sigma") cfg.actuation.step_sigma_cm = parse_numbers(value, lineno, 1)[0];
        else if (key == "seed") {
          const double v = parse_numbers(value, lineno, 1)[0];
          if (v < 0.0 || v != std::floor(v)) fail_line(lineno, "seed must be a non-negative integer");
          cfg.seed = std::uint64_t(v);
        } else {
          fail_line(lineno, "unknown [noise] key '" + key + "'");
        }
        break;
      }
      case Planner: {
        if (key == "clearance") cfg.planner.clearance = parse_numbers(value, lineno, 1)[0];
        else if (key == "goal_tolerance") cfg.planner.goal_tolerance = parse_numbers(value, lineno, 1)[0];
        else if (key == "max_step") cfg.planner.max_step = parse_numbers(value, lineno, 1)[0];
        else if (key == "turn_deadband") cfg.planner.turn_deadband_deg = parse_numbers(value, lineno, 1)[0];
        else if (key == "max_steps") {
          const double v = parse_numbers(value, lineno, 1)[0];
          if (v < 1.0 || v != std::floor(v)) fail_line(lineno, "max_steps must be a positive integer");
          cfg.max_steps = int(v);
        } else {
          fail_line(lineno, "unknown [planner] key '" + key + "'");
        }
        break;
      }
    }
  }

  if (!have_rt) {
    // Overhead rig above the floor centre; 200 cm unless [camera] height says
    // otherwise.
    cfg.camera = overhead_camera(cfg.camera.intrinsics, cfg.camera.width, cfg.camera.height,
                                 {cfg.arena.floor_w_cm / 2.0, cfg.arena.floor_h_cm / 2.0},
                                 height_cm);
  }
  cfg.render_noise.seed = cfg.seed;
  return cfg;
}

std::string format_sim_config(const SimConfig& cfg) {
  std::string out;
  const auto color = [](Rgb8 c) {
    return std::to_string(c[0]) + " " + std::to_string(c[1]) + " " + std::to_string(c[2]);
  };
  out += "[arena]\n";
  out += "floor = " + fmt9(cfg.arena.floor_w_cm) + " " + fmt9(cfg.arena.floor_h_cm) + "\n";
  out += "background = " + color(cfg.arena.background) + "\n";
  out += "robot = " + fmt9(cfg.arena.robot.center_cm.x) + " " + fmt9(cfg.arena.robot.center_cm.y) +
         " " + fmt9(cfg.arena.robot.radius_cm) + "\n";
  out += "robot_color = " + color(cfg.arena.robot_color) + "\n";
  out += "robot_heading = " + fmt9(cfg.robot_heading_deg) + "\n";
  out += "target = " + fmt9(cfg.arena.target.center_cm.x) + " " +
         fmt9(cfg.arena.target.center_cm.y) + " " + fmt9(cfg.arena.target.radius_cm) + "\n";
  out += "target_color = " + color(cfg.arena.target_color) + "\n";
  for (const ArenaDisk& o : cfg.arena.obstacles)
    out += "obstacle = " + fmt9(o.center_cm.x) + " " + fmt9(o.center_cm.y) + " " +
           fmt9(o.radius_cm) + "\n";
  out += "obstacle_color = " + color(cfg.arena.obstacle_color) + "\n";

  out += "[camera]\n";
  out += "fx = " + fmt9(cfg.camera.intrinsics.fx) + "\n";
  out += "fy = " + fmt9(cfg.camera.intrinsics.fy) + "\n";
  out += "skew = " + fmt9(cfg.camera.intrinsics.skew) + "\n";
  out += "cx = " + fmt9(cfg.camera.intrinsics.cx) + "\n";
  out += "cy = " + fmt9(cfg.camera.intrinsics.cy) + "\n";
  out += "size = " + std::to_string(cfg.camera.width) + " " + std::to_string(cfg.camera.height) + "\n";
  out += "r =";
  for (double v : cfg.camera.pose.r.m) out += " " + fmt9(v);
  out += "\n";
  out += "t = " + fmt9(cfg.camera.pose.t.x) + " " + fmt9(cfg.camera.pose.t.y) + " " +
         fmt9(cfg.camera.pose.t.z) + "\n";

  out += "[noise]\n";
  out += "color_sigma = " + fmt9(cfg.render_noise.color_sigma) + "\n";
  out += "illumination = " + fmt9(cfg.render_noise.illumination) + "\n";
  out += "turn_sigma = " + fmt9(cfg.actuation.turn_sigma_deg) + "\n";
  out += "step_sigma = " + fmt9(cfg.actuation.step_sigma_cm) + "\n";
  out += "seed = " + std::to_string(cfg.seed) + "\n";

  out += "[planner]\n";
  out += "clearance = " + fmt9(cfg.planner.clearance) + "\n";
  out += "goal_tolerance = " + fmt9(cfg.planner.goal_tolerance) + "\n";
  out += "max_step = " + fmt9(cfg.planner.max_step) + "\n";
  out += "turn_deadband = " + fmt9(cfg.planner.turn_deadband_deg) + "\n";
  out += "max_steps = " + std::to_string(cfg.max_steps) + "\n";
  return out;
}

std::uint64_t frame_render_seed(std::uint64_t base_seed, int frame) {
  // Stride by a large odd constant so nearby frames never share generator state.
  return base_seed + 0x100000001b3ULL * std::uint64_t(frame);
}

TrajectoryLog run_closed_loop(const SimConfig& cfg) {
  validate_arena(cfg.arena);
  const GroundMap map(cfg.camera.intrinsics, cfg.camera.pose);

  SimState state;
  state.arena = cfg.arena;
  state.heading_deg = normalize_deg(cfg.robot_heading_deg);
  Rng act_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  TrajectoryLog log;
  bool done = false;
  for (int frame = 0; frame < cfg.max_steps && !done; ++frame) {
    RenderNoise rn = cfg.render_noise;
    rn.seed = frame_render_seed(cfg.seed, frame);

    const RenderedArena rendered = render_arena(state.arena, cfg.camera, rn);
    const LabelMap labels = label_image(rendered.image, cfg.classifier);
    const std::vector<Blob> blobs = extract_blobs(labels, cfg.min_blob_area);

    TrajectoryStep step;
    step.frame_id = frame;
    step.true_pos_cm = state.arena.robot.center_cm;
    step.true_heading_deg = state.heading_deg;

    ArenaObservation obs;
    try {
      obs = scene_from_blobs(blobs, frame);
    } catch (const DetectionError& e) {
      step.note = std::string(e.what()).find("robot") != std::string::npos ? "ROBOT MISSING"
                                                                           : "TARGET MISSING";
      step.collided = state.collided;
      log.steps.push_back(step);
      log.status = RunStatus::DetectionFailure;
      done = true;
      break;
    }

    step.has_report = true;
    step.report = build_report(obs, &map);
    step.perceived_pos_cm = map.to_floor(obs.robot.centroid);
    const Vec2 goal = map.to_floor(obs.target.centroid);

    std::vector<ObstacleDisk> obstacles;
    for (const ObstacleObservation& o : obs.obstacles) {
      const Vec2 c = map.to_floor(o.blob.centroid);
      const Vec2 edge = map.to_floor(o.blob.centroid + Vec2{o.radius_px, 0.0});
      obstacles.push_back({c, (edge - c).norm()});
    }

    const RobotPose pose{step.perceived_pos_cm, state.heading_deg};
    MotionCommand cmd{CommandKind::Stop, 0.0};
    if ((pose.position - goal).norm() > cfg.planner.goal_tolerance) {
      try {
        const Vec2 waypoint = choose_waypoint(pose.position, goal, obstacles, cfg.planner);
        cmd = next_command(pose, waypoint, goal, cfg.planner);
      } catch (const PlanningError&) {
        step.note = "PLANNER NO_WAYPOINT";
        step.collided = state.collided;
        log.steps.push_back(step);
        log.status = RunStatus::NoWaypoint;
        done = true;
        break;
      }
    }

    step.has_cmd = true;
    step.cmd = cmd;
    state = step_simulation(state, cmd, cfg.actuation, act_rng);
    step.collided = state.collided;
    log.steps.push_back(step);
    if (cmd.kind == CommandKind::Stop) {
      log.status = RunStatus::Goal;
      done = true;
    }
  }

  log.collided = state.collided;
  log.final_true_pos_cm = state.arena.robot.center_cm;
  log.final_true_heading_deg = state.heading_deg;
  return log;
}

std::string format_trajectory(const TrajectoryLog& log) {
  std::string out;
  char buf[128];
  for (const TrajectoryStep& s : log.steps) {
    if (s.has_report) {
      out += format_report(s.report);
    } else {
      std::snprintf(buf, sizeof buf, "FRAME %d\n", s.frame_id);
      out += buf;
    }
    if (!s.note.empty()) out += s.note + "\n";
    if (s.has_cmd) out += "CMD " + format_command(s.cmd) + "\n";
    std::snprintf(buf, sizeof buf, "STEP %d TRUE %.3f %.3f %.3f", s.frame_id, s.true_pos_cm.x,
                  s.true_pos_cm.y, s.true_heading_deg);
    out += buf;
    if (s.has_report) {
      std::snprintf(buf, sizeof buf, " PERCEIVED %.3f %.3f", s.perceived_pos_cm.x,
                    s.perceived_pos_cm.y);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, " COLLIDED %d\n", s.collided ? 1 : 0);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "FINAL TRUE %.3f %.3f %.3f\n", log.final_true_pos_cm.x,
                log.final_true_pos_cm.y, log.final_true_heading_deg);
  out += buf;
  out += "RESULT ";
  if (log.collided) {
    out += "COLLISION";
  } else {
    switch (log.status) {
      case RunStatus::Goal: out += "GOAL"; break;
      case RunStatus::StepLimit: out += "STEP_LIMIT"; break;
      case RunStatus::NoWaypoint: out += "NO_WAYPOINT"; break;
      case RunStatus::DetectionFailure: out += "DETECTION_FAILURE"; break;
    }
  }
  out += "\n";
  return out;
}

}  // namespace navcam
