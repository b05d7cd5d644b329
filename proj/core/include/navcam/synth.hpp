#pragma once

#include <cstdint>
#include <vector>

#include "navcam/calib.hpp"
#include "navcam/image.hpp"
#include "navcam/planner.hpp"
#include "navcam/rng.hpp"
#include "navcam/segment.hpp"

namespace navcam {

struct ArenaDisk {
  Vec2 center_cm;
  double radius_cm = 0.0;
};

// Flat-disk arena on the floor plane. Coordinates are centimetres in the
// floor frame (origin at one corner, x right, y down in the overhead view).
struct ArenaSpec {
  double floor_w_cm = 120.0;
  double floor_h_cm = 90.0;
  Rgb8 background{190, 190, 190};
  ArenaDisk robot{{30.0, 45.0}, 6.0};
  Rgb8 robot_color{40, 210, 40};
  ArenaDisk target{{90.0, 45.0}, 5.0};
  Rgb8 target_color{210, 40, 40};
  std::vector<ArenaDisk> obstacles;
  Rgb8 obstacle_color{40, 40, 210};
};

// Throws std::invalid_argument when a disk leaves the floor bounds or two
// disks overlap (spawn-time arena invariant).
void validate_arena(const ArenaSpec& arena);

struct CameraSpec {
  CameraIntrinsics intrinsics{400.0, 400.0, 0.0, 320.0, 240.0};
  ExtrinsicPose pose{Mat3::identity(), {-60.0, -45.0, 200.0}};
  int width = 640;
  int height = 480;
};

// Camera straight above floor_center_cm at height_cm, axes aligned with the
// floor (R = I), so the centre projects to the principal point.
CameraSpec overhead_camera(const CameraIntrinsics& k, int width, int height,
                           Vec2 floor_center_cm, double height_cm);

struct RenderNoise {
  double color_sigma = 0.0;       // gaussian per channel, clamped to [0,255]
  double illumination = 1.0;      // scale factor applied after color noise
  std::uint64_t seed = 0;
};

struct ObjectTruth {
  Vec2 floor_cm;
  Vec2 pixel;
};

struct GroundTruth {
  ObjectTruth robot;
  ObjectTruth target;
  std::vector<ObjectTruth> obstacles;
  LabelMap mask;  // noiseless role of every pixel
};

struct RenderedArena {
  ImageRGB image;
  GroundTruth truth;
};

// Ray-casts every pixel to the floor plane through the inverse ground
// homography, colors it by the disk containing the hit (robot, then target,
// then obstacles), applies seeded color noise and illumination scaling.
// No anti-aliasing: edges are hard and the mask is exact.
RenderedArena render_arena(const ArenaSpec& arena, const CameraSpec& cam,
                           const RenderNoise& noise);

struct BoardSpec {
  int squares_x = 14;
  int squares_y = 13;
  double square_cm = 3.0;

  int corners_x() const { return squares_x - 1; }
  int corners_y() const { return squares_y - 1; }
};

// Inner-corner grid of the board under the given pose: model point
// (i, j) -> (i * square, j * square) cm, row-major over j then i, projected
// and perturbed with gaussian pixel noise. Throws GeometryError ("board
// clipped") when the noiseless projection of any corner leaves the image.
PlanarCorrespondences render_checkerboard_corners(const BoardSpec& board,
                                                  const CameraSpec& cam,
                                                  const ExtrinsicPose& pose,
                                                  double noise_px, Rng& rng,
                                                  int view_id);

// Seeded rejection sampler for calibration poses: oblique tilts, varied
// roll and distance, every corner strictly inside the image.
std::vector<ExtrinsicPose> sample_board_poses(const BoardSpec& board, const CameraSpec& cam,
                                              int count, std::uint64_t seed);

struct ActuationNoise {
  double turn_sigma_deg = 0.0;
  double step_sigma_cm = 0.0;
};

struct SimState {
  ArenaSpec arena;
  double heading_deg = 0.0;
  bool collided = false;
};

// Applies one command: TURN adds to the heading, FORWARD advances along it
// (clipped so the robot disk stays on the floor), STOP is identity. A robot
// disk intersecting an obstacle disk latches `collided`; the simulation
// continues.
SimState step_simulation(const SimState& state, const MotionCommand& cmd,
                         const ActuationNoise& noise, Rng& rng);

}  // namespace navcam
