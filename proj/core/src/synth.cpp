#include "navcam/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "navcam/errors.hpp"

namespace navcam {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool disk_on_floor(const ArenaDisk& d, double w, double h) {
  return d.center_cm.x - d.radius_cm >= 0.0 && d.center_cm.x + d.radius_cm <= w &&
         d.center_cm.y - d.radius_cm >= 0.0 && d.center_cm.y + d.radius_cm <= h;
}

bool disks_overlap(const ArenaDisk& a, const ArenaDisk& b) {
  return (a.center_cm - b.center_cm).norm() < a.radius_cm + b.radius_cm;
}

}  // namespace

void validate_arena(const ArenaSpec& arena) {
  if (arena.floor_w_cm <= 0.0 || arena.floor_h_cm <= 0.0)
    throw std::invalid_argument("arena: floor dimensions must be positive");
  std::vector<const ArenaDisk*> disks{&arena.robot, &arena.target};
  for (const ArenaDisk& o : arena.obstacles) disks.push_back(&o);
  for (const ArenaDisk* d : disks) {
    if (d->radius_cm <= 0.0) throw std::invalid_argument("arena: disk radius must be positive");
    if (!disk_on_floor(*d, arena.floor_w_cm, arena.floor_h_cm))
      throw std::invalid_argument("arena: disk leaves the floor bounds");
  }
  for (std::size_t i = 0; i < disks.size(); ++i)
    for (std::size_t j = i + 1; j < disks.size(); ++j)
      if (disks_overlap(*disks[i], *disks[j]))
        throw std::invalid_argument("arena: disks overlap at spawn");
}

CameraSpec overhead_camera(const CameraIntrinsics& k, int width, int height,
                           Vec2 floor_center_cm, double height_cm) {
  CameraSpec cam;
  cam.intrinsics = k;
  cam.width = width;
  cam.height = height;
  cam.pose.r = Mat3::identity();
  cam.pose.t = {-floor_center_cm.x, -floor_center_cm.y, height_cm};
  return cam;
}

RenderedArena render_arena(const ArenaSpec& arena, const CameraSpec& cam,
                           const RenderNoise& noise) {
  const GroundMap map(cam.intrinsics, cam.pose);  // rejects degenerate cameras
  const Mat3& hinv = map.floor_from_pixel();

  RenderedArena out;
  out.image = ImageRGB(cam.width, cam.height, arena.background);
  out.truth.mask.width = cam.width;
  out.truth.mask.height = cam.height;
  out.truth.mask.labels.assign(std::size_t(cam.width) * std::size_t(cam.height),
                               ColorClass::Background);

  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      const Vec3 q = hinv * Vec3{double(u), double(v), 1.0};
      // The hit is on the visible side of the plane only when the scale is
      // positive; at the horizon it degenerates to background.
      const double mag = std::abs(q.x) + std::abs(q.y) + std::abs(q.z);
      if (!(q.z > 1e-12 * mag)) continue;
      const Vec2 f{q.x / q.z, q.y / q.z};

      ColorClass role = ColorClass::Background;
      if ((f - arena.robot.center_cm).norm() <= arena.robot.radius_cm) {
        role = ColorClass::RobotGreen;
      } else if ((f - arena.target.center_cm).norm() <= arena.target.radius_cm) {
        role = ColorClass::TargetRed;
      } else {
        for (const ArenaDisk& o : arena.obstacles) {
          if ((f - o.center_cm).norm() <= o.radius_cm) {
            role = ColorClass::ObstacleBlue;
            break;
          }
        }
      }
      if (role == ColorClass::Background) continue;
      out.truth.mask.at(u, v) = role;
      out.image.at(u, v) = role == ColorClass::RobotGreen  ? arena.robot_color
                           : role == ColorClass::TargetRed ? arena.target_color
                                                           : arena.obstacle_color;
    }
  }

  out.truth.robot = {arena.robot.center_cm, map.to_pixel(arena.robot.center_cm)};
  out.truth.target = {arena.target.center_cm, map.to_pixel(arena.target.center_cm)};
  for (const ArenaDisk& o : arena.obstacles)
    out.truth.obstacles.push_back({o.center_cm, map.to_pixel(o.center_cm)});

  if (noise.color_sigma > 0.0) {
    Rng rng(noise.seed);
    for (Rgb8& p : out.image.pixels) {
      for (int c = 0; c < 3; ++c) {
        const double noisy = std::round(double(p[std::size_t(c)]) +
                                        rng.gaussian(noise.color_sigma));
        p[std::size_t(c)] = std::uint8_t(std::clamp(noisy, 0.0, 255.0));
      }
    }
  }
  if (noise.illumination != 1.0)
    out.image = scale_illumination(out.image, noise.illumination);
  return out;
}

PlanarCorrespondences render_checkerboard_corners(const BoardSpec& board,
                                                  const CameraSpec& cam,
                                                  const ExtrinsicPose& pose,
                                                  double noise_px, Rng& rng,
                                                  int view_id) {
  if (board.corners_x() < 2 || board.corners_y() < 2 || board.square_cm <= 0.0)
    throw std::invalid_argument("board: need at least a 2x2 corner grid");

  PlanarCorrespondences corr;
  corr.view_id = view_id;
  for (int j = 0; j < board.corners_y(); ++j) {
    for (int i = 0; i < board.corners_x(); ++i) {
      const Vec2 model{i * board.square_cm, j * board.square_cm};
      const Vec2 px = project(cam.intrinsics, pose, {model.x, model.y, 0.0});
      if (px.x < 0.0 || px.x > cam.width - 1.0 || px.y < 0.0 || px.y > cam.height - 1.0)
        throw GeometryError("board clipped: corner leaves the image in view " +
                            std::to_string(view_id));
      corr.model_cm.push_back(model);
      corr.image_px.push_back(px);
    }
  }
  if (noise_px > 0.0) {
    for (Vec2& px : corr.image_px) {
      px.x += rng.gaussian(noise_px);
      px.y += rng.gaussian(noise_px);
    }
  }
  return corr;
}

namespace {

Mat3 rot_z(double a) {
  Mat3 r = Mat3::identity();
  r(0, 0) = std::cos(a);
  r(0, 1) = -std::sin(a);
  r(1, 0) = std::sin(a);
  r(1, 1) = std::cos(a);
  return r;
}

Mat3 rot_axis(const Vec3& axis, double a) {
  Mat3 k;
  k.m = {0, -axis.z, axis.y, axis.z, 0, -axis.x, -axis.y, axis.x, 0};
  return Mat3::identity() + k * std::sin(a) + (k * k) * (1.0 - std::cos(a));
}

}  // namespace

std::vector<ExtrinsicPose> sample_board_poses(const BoardSpec& board, const CameraSpec& cam,
                                              int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_board_poses: count must be >= 1");
  const Vec2 center{board.square_cm * (board.corners_x() - 1) / 2.0,
                    board.square_cm * (board.corners_y() - 1) / 2.0};
  const double half_diag = center.norm();

  // Closest distance at which the tilted board still fits with margin.
  const double f = std::max(cam.intrinsics.fx, cam.intrinsics.fy);
  const double limit = 0.85 * std::min({cam.intrinsics.cx, cam.width - 1.0 - cam.intrinsics.cx,
                                        cam.intrinsics.cy, cam.height - 1.0 - cam.intrinsics.cy});
  if (limit <= 0.0)
    throw GeometryError("sample_board_poses: principal point leaves no field of view");
  const double z_lo = half_diag * (f / limit + std::sin(35.0 * kPi / 180.0));

  Rng rng(seed);
  std::vector<ExtrinsicPose> poses;
  while (int(poses.size()) < count) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const double azimuth = rng.uniform(0.0, 2.0 * kPi);
      const double tilt = rng.uniform(10.0 * kPi / 180.0, 35.0 * kPi / 180.0);
      const double roll = rng.uniform(0.0, 2.0 * kPi);
      const double z = rng.uniform(1.15 * z_lo, 1.55 * z_lo);
      const double jx = rng.uniform(-0.03, 0.03) * z;
      const double jy = rng.uniform(-0.03, 0.03) * z;

      ExtrinsicPose pose;
      pose.r = rot_z(roll) * rot_axis({std::cos(azimuth), std::sin(azimuth), 0.0}, tilt);
      // Board centre lands at camera-frame (jx, jy, z).
      const Vec3 rc = pose.r * Vec3{center.x, center.y, 0.0};
      pose.t = Vec3{jx, jy, z} - rc;

      bool inside = true;
      for (int j = 0; j < board.corners_y() && inside; ++j) {
        for (int i = 0; i < board.corners_x() && inside; ++i) {
          Vec2 px;
          try {
            px = project(cam.intrinsics, pose,
                         {i * board.square_cm, j * board.square_cm, 0.0});
          } catch (const GeometryError&) {
            inside = false;
            break;
          }
          if (px.x < 2.0 || px.x > cam.width - 3.0 || px.y < 2.0 || px.y > cam.height - 3.0)
            inside = false;
        }
      }
      if (inside) {
        poses.push_back(pose);
        placed = true;
      }
    }
    if (!placed)
      throw GeometryError("sample_board_poses: no admissible pose found (camera too tight)");
  }
  return poses;
}

SimState step_simulation(const SimState& state, const MotionCommand& cmd,
                         const ActuationNoise& noise, Rng& rng) {
  SimState next = state;
  switch (cmd.kind) {
    case CommandKind::Stop:
      break;
    case CommandKind::Turn: {
      double delta = cmd.value;
      if (noise.turn_sigma_deg > 0.0) delta += rng.gaussian(noise.turn_sigma_deg);
      next.heading_deg = std::fmod(next.heading_deg + delta, 360.0);
      if (next.heading_deg <= -180.0) next.heading_deg += 360.0;
      if (next.heading_deg > 180.0) next.heading_deg -= 360.0;
      break;
    }
    case CommandKind::Forward: {
      double dist = cmd.value;
      if (noise.step_sigma_cm > 0.0) dist += rng.gaussian(noise.step_sigma_cm);
      const double h = next.heading_deg * kPi / 180.0;
      Vec2 p = next.arena.robot.center_cm + Vec2{std::cos(h), std::sin(h)} * dist;
      const double r = next.arena.robot.radius_cm;
      p.x = std::clamp(p.x, r, next.arena.floor_w_cm - r);
      p.y = std::clamp(p.y, r, next.arena.floor_h_cm - r);
      next.arena.robot.center_cm = p;
      break;
    }
  }
  for (const ArenaDisk& o : next.arena.obstacles)
    if (disks_overlap(next.arena.robot, o)) next.collided = true;
  return next;
}

}  // namespace navcam
