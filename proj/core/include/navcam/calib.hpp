#pragma once

#include <string>
#include <vector>

#include "navcam/linalg.hpp"

namespace navcam {

// Pinhole intrinsics. Pixel coordinates follow the raster convention:
// u to the right, v downward.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double skew = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  Mat3 matrix() const {
    Mat3 k;
    k.m = {fx, skew, cx, 0, fy, cy, 0, 0, 1};
    return k;
  }
};

// Rigid transform from model coordinates to camera coordinates.
struct ExtrinsicPose {
  Mat3 r = Mat3::identity();
  Vec3 t;
};

// One planar view: model points on the Z = 0 plane (centimetres) paired
// with their observed pixel positions, in file order.
struct PlanarCorrespondences {
  int view_id = 0;
  std::vector<Vec2> model_cm;
  std::vector<Vec2> image_px;
};

// Model-plane-to-pixel homography, canonical scale: unit Frobenius norm and
// h(2,2) >= 0 (first nonzero entry positive when h(2,2) is zero).
struct Homography {
  Mat3 h;

  Vec2 apply(Vec2 p) const;
};

struct CalibrationResult {
  CameraIntrinsics intrinsics;
  std::vector<int> view_ids;
  std::vector<ExtrinsicPose> poses;  // parallel to view_ids
  double rms_px = 0.0;
  bool converged = true;
};

// Direct linear transform with Hartley normalization (zero centroid, mean
// distance sqrt(2) in both point sets). Needs at least four points in a
// non-degenerate configuration.
Homography estimate_homography(const PlanarCorrespondences& corr);

// Closed-form intrinsics from at least three homographies via the image of
// the absolute conic.
CameraIntrinsics intrinsics_from_homographies(const std::vector<Homography>& hs);

// Pose of one view from its homography: r1 = lambda K^-1 h1,
// r2 = lambda K^-1 h2, r3 = r1 x r2, t = lambda K^-1 h3, with the sign of
// lambda chosen so t_z > 0 and [r1 r2 r3] projected to the nearest rotation.
ExtrinsicPose extrinsics_for_view(const CameraIntrinsics& k, const Homography& h);

// Projects a model-space point. Throws GeometryError when the point is not
// in front of the camera.
Vec2 project(const CameraIntrinsics& k, const ExtrinsicPose& pose, const Vec3& p);

// Root-mean-square reprojection error in pixels over all points.
double rms_reprojection(const CameraIntrinsics& k, const std::vector<ExtrinsicPose>& poses,
                        const std::vector<PlanarCorrespondences>& views);

// Levenberg-Marquardt refinement of intrinsics and all poses, minimizing the
// squared reprojection error. Accepts only cost-decreasing steps, so the
// returned rms never exceeds the initial one. `converged` is false when the
// iteration cap was hit first; the best iterate is still returned.
CalibrationResult refine_calibration(const CalibrationResult& initial,
                                     const std::vector<PlanarCorrespondences>& views);

// Full chain: homographies -> closed-form intrinsics -> per-view extrinsics
// -> refinement. Views are processed in ascending view_id order.
CalibrationResult calibrate(std::vector<PlanarCorrespondences> views);

// Pixel <-> floor-plane mapping for a fixed camera. Floor coordinates are
// centimetres on the Z = 0 plane of the calibration model frame.
class GroundMap {
 public:
  GroundMap(const CameraIntrinsics& k, const ExtrinsicPose& floor_pose);

  Vec2 to_floor(Vec2 pixel) const;
  Vec2 to_pixel(Vec2 floor_cm) const;
  const Mat3& pixel_from_floor() const { return h_; }

  const Mat3& floor_from_pixel() const { return hinv_; }

 private:
  Mat3 h_;
  Mat3 hinv_;
};

inline GroundMap ground_metric_map(const CameraIntrinsics& k, const ExtrinsicPose& floor_pose) {
  return GroundMap(k, floor_pose);
}

// --- text formats -----------------------------------------------------------

// Correspondence file: one "view_id X_cm Y_cm u_px v_px" line per point,
// '#' comments and blank lines allowed. Views are returned in ascending
// view_id order, points in file order.
std::vector<PlanarCorrespondences> parse_correspondences(const std::string& text);

// Canonical form: points grouped by ascending view_id, no comments, numbers
// with nine significant digits. write -> read -> write is byte-stable.
std::string format_correspondences(const std::vector<PlanarCorrespondences>& views);

// Calibration file: "fx= ..." style header lines followed by one
// "view <id> R <9 values> t <3 values>" line per view.
std::string format_calibration(const CalibrationResult& result);
CalibrationResult parse_calibration(const std::string& text);

}  // namespace navcam
