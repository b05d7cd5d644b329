#pragma once

#include <span>
#include <string>
#include <vector>

#include "navcam/linalg.hpp"

namespace navcam {

// Planner geometry is unit-agnostic: centimetres on the floor when a ground
// map is available, raw pixels otherwise, with the parameters read in the
// same unit.
struct ObstacleDisk {
  Vec2 center;
  double radius = 0.0;
};

struct PlannerParams {
  double clearance = 8.0;
  double goal_tolerance = 3.0;
  double max_step = 10.0;
  double turn_deadband_deg = 5.0;
};

struct RobotPose {
  Vec2 position;
  double heading_deg = 0.0;  // 0 along +x, positive toward +y
};

enum class CommandKind { Turn, Forward, Stop };

struct MotionCommand {
  CommandKind kind = CommandKind::Stop;
  double value = 0.0;  // degrees for Turn, distance for Forward

  bool operator==(const MotionCommand&) const = default;
};

// "TURN 12.500" / "FORWARD 10.000" / "STOP", three decimals.
std::string format_command(const MotionCommand& cmd);

// True when the obstacle disk inflated by clearance intersects the open
// segment between robot and goal (endpoint containment alone does not
// block). robot and goal must differ.
bool path_blocked(Vec2 robot, Vec2 goal, const ObstacleDisk& obstacle, double clearance);

// Straight shot to the goal when nothing blocks; otherwise a detour point
// beside the first blocking obstacle: center + n * (radius + clearance) * 1.2
// with n perpendicular to the direction of travel, on the side giving the
// shorter total path (ties go left, n = (-dy, dx)). If the candidate lies
// inside another inflated obstacle the offset grows by 20% up to five times,
// then the other side is tried; throws PlanningError when both sides fail.
Vec2 choose_waypoint(Vec2 robot, Vec2 goal, std::span<const ObstacleDisk> obstacles,
                     const PlannerParams& params);

// One reactive step: STOP inside goal_tolerance of the goal, otherwise TURN
// by the heading error to the waypoint when outside the deadband, otherwise
// FORWARD by at most max_step toward the waypoint.
MotionCommand next_command(const RobotPose& pose, Vec2 waypoint, Vec2 goal,
                           const PlannerParams& params);

}  // namespace navcam
