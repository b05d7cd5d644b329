#pragma once

#include <optional>
#include <string>
#include <vector>

#include "navcam/calib.hpp"
#include "navcam/segment.hpp"

namespace navcam {

// Angles are degrees in image-plane axes: 0 along +x (rightward), positive
// toward +y. With v growing downward that makes positive angles clockwise on
// screen.
double normalize_deg(double deg);              // into (-180, 180]
double bearing_deg(Vec2 from, Vec2 to);        // direction of (to - from)

double euclidean_px(Vec2 a, Vec2 b);

// Pixel pair mapped through the ground plane, distance in centimetres.
double euclidean_cm(const GroundMap& map, Vec2 a_px, Vec2 b_px);

struct ObstacleDistance {
  Vec2 centroid_px;
  double dist_px = 0.0;
  std::optional<double> dist_cm;
  double bearing_deg = 0.0;  // from robot centroid, pixel axes
};

struct DistanceReport {
  int frame_id = 0;
  Vec2 robot_px;
  Vec2 target_px;
  double robot_to_target_px = 0.0;
  std::optional<double> robot_to_target_cm;
  std::vector<ObstacleDistance> obstacles;
};

// Distances from the robot to the target and every obstacle. Metric fields
// are filled only when a ground map is supplied.
DistanceReport build_report(const ArenaObservation& obs, const GroundMap* map);

// Report lines as written to the .txt record: FRAME / ROBOT / TARGET /
// OBST k / optional CMD appended by the caller. Three decimals, fixed.
std::string format_report(const DistanceReport& report);

}  // namespace navcam
