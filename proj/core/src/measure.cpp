#include "navcam/measure.hpp"

#include <cmath>
#include <cstdio>

namespace navcam {

double normalize_deg(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

double bearing_deg(Vec2 from, Vec2 to) {
  const Vec2 d = to - from;
  return normalize_deg(std::atan2(d.y, d.x) * (180.0 / 3.14159265358979323846));
}

double euclidean_px(Vec2 a, Vec2 b) { return (a - b).norm(); }

double euclidean_cm(const GroundMap& map, Vec2 a_px, Vec2 b_px) {
  return (map.to_floor(a_px) - map.to_floor(b_px)).norm();
}

DistanceReport build_report(const ArenaObservation& obs, const GroundMap* map) {
  DistanceReport rep;
  rep.frame_id = obs.frame_id;
  rep.robot_px = obs.robot.centroid;
  rep.target_px = obs.target.centroid;
  rep.robot_to_target_px = euclidean_px(obs.robot.centroid, obs.target.centroid);
  if (map) rep.robot_to_target_cm = euclidean_cm(*map, obs.robot.centroid, obs.target.centroid);

  for (const ObstacleObservation& o : obs.obstacles) {
    ObstacleDistance d;
    d.centroid_px = o.blob.centroid;
    d.dist_px = euclidean_px(obs.robot.centroid, o.blob.centroid);
    if (map) d.dist_cm = euclidean_cm(*map, obs.robot.centroid, o.blob.centroid);
    d.bearing_deg = bearing_deg(obs.robot.centroid, o.blob.centroid);
    rep.obstacles.push_back(d);
  }
  return rep;
}

std::string format_report(const DistanceReport& report) {
  char buf[160];
  std::string out;

  std::snprintf(buf, sizeof buf, "FRAME %d\n", report.frame_id);
  out += buf;
  std::snprintf(buf, sizeof buf, "ROBOT %.3f %.3f\n", report.robot_px.x, report.robot_px.y);
  out += buf;

  std::snprintf(buf, sizeof buf, "TARGET %.3f %.3f DIST_PX %.3f", report.target_px.x,
                report.target_px.y, report.robot_to_target_px);
  out += buf;
  if (report.robot_to_target_cm) {
    std::snprintf(buf, sizeof buf, " DIST_CM %.3f", *report.robot_to_target_cm);
    out += buf;
  }
  out += '\n';

  int k = 1;
  for (const ObstacleDistance& o : report.obstacles) {
    std::snprintf(buf, sizeof buf, "OBST %d %.3f %.3f DIST_PX %.3f", k, o.centroid_px.x,
                  o.centroid_px.y, o.dist_px);
    out += buf;
    if (o.dist_cm) {
      std::snprintf(buf, sizeof buf, " DIST_CM %.3f", *o.dist_cm);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, " BEARING_DEG %.3f", o.bearing_deg);
    out += buf;
    out += '\n';
    ++k;
  }
  return out;
}

}  // namespace navcam
