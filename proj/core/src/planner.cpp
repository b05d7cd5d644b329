#include "navcam/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "navcam/errors.hpp"
#include "navcam/measure.hpp"

namespace navcam {

std::string format_command(const MotionCommand& cmd) {
  char buf[48];
  switch (cmd.kind) {
    case CommandKind::Turn:
      std::snprintf(buf, sizeof buf, "TURN %.3f", cmd.value);
      return buf;
    case CommandKind::Forward:
      std::snprintf(buf, sizeof buf, "FORWARD %.3f", cmd.value);
      return buf;
    case CommandKind::Stop:
      return "STOP";
  }
  return "STOP";
}

namespace {

// Parameter of the closest point on segment robot->goal to c, without
// clamping.
double segment_parameter(Vec2 robot, Vec2 goal, Vec2 c) {
  const Vec2 d = goal - robot;
  return (c - robot).dot(d) / d.dot(d);
}

}  // namespace

bool path_blocked(Vec2 robot, Vec2 goal, const ObstacleDisk& obstacle, double clearance) {
  if (robot == goal) throw std::invalid_argument("path_blocked: robot and goal coincide");
  const double t = segment_parameter(robot, goal, obstacle.center);
  if (t <= 0.0 || t >= 1.0) return false;
  const Vec2 closest = robot + t * (goal - robot);
  return (obstacle.center - closest).norm() < obstacle.radius + clearance;
}

Vec2 choose_waypoint(Vec2 robot, Vec2 goal, std::span<const ObstacleDisk> obstacles,
                     const PlannerParams& params) {
  if (robot == goal) throw std::invalid_argument("choose_waypoint: robot and goal coincide");

  // First blocking obstacle along the path.
  const ObstacleDisk* blocking = nullptr;
  double blocking_t = 0.0;
  for (const ObstacleDisk& o : obstacles) {
    if (!path_blocked(robot, goal, o, params.clearance)) continue;
    const double t = segment_parameter(robot, goal, o.center);
    if (!blocking || t < blocking_t) {
      blocking = &o;
      blocking_t = t;
    }
  }
  if (!blocking) return goal;

  const Vec2 d = goal - robot;
  const double len = d.norm();
  const Vec2 dir{d.x / len, d.y / len};
  const Vec2 left{-dir.y, dir.x};

  const auto admissible = [&](Vec2 w) {
    for (const ObstacleDisk& o : obstacles)
      if ((w - o.center).norm() < o.radius + params.clearance) return false;
    return true;
  };

  const double base = (blocking->radius + params.clearance) * 1.2;
  const auto total_path = [&](Vec2 n) {
    const Vec2 w = blocking->center + base * n;
    return (w - robot).norm() + (goal - w).norm();
  };
  const Vec2 first = total_path(left) <= total_path(-left) ? left : -left;

  for (const Vec2 side : {first, -first}) {
    double offset = base;
    for (int attempt = 0; attempt <= 5; ++attempt) {
      const Vec2 w = blocking->center + offset * side;
      if (admissible(w)) return w;
      offset *= 1.2;
    }
  }
  throw PlanningError("no admissible waypoint around the blocking obstacle");
}

MotionCommand next_command(const RobotPose& pose, Vec2 waypoint, Vec2 goal,
                           const PlannerParams& params) {
  if ((pose.position - goal).norm() <= params.goal_tolerance)
    return {CommandKind::Stop, 0.0};
  const double want = bearing_deg(pose.position, waypoint);
  const double delta = normalize_deg(want - pose.heading_deg);
  if (std::abs(delta) > params.turn_deadband_deg) return {CommandKind::Turn, delta};
  const double dist = (waypoint - pose.position).norm();
  return {CommandKind::Forward, std::min(params.max_step, dist)};
}

}  // namespace navcam
