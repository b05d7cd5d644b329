#include <algorithm>
#include <cmath>
#include <numeric>

#include "navcam/calib.hpp"
#include "navcam/errors.hpp"

namespace navcam {

namespace {

// Constraint row v_ij on the image of the absolute conic, columns i and j of
// h (0-based). Pairs with b = (B11, B12, B22, B13, B23, B33).
std::array<double, 6> v_ij(const Mat3& h, int i, int j) {
  return {h(0, i) * h(0, j),
          h(0, i) * h(1, j) + h(1, i) * h(0, j),
          h(1, i) * h(1, j),
          h(2, i) * h(0, j) + h(0, i) * h(2, j),
          h(2, i) * h(1, j) + h(1, i) * h(2, j),
          h(2, i) * h(2, j)};
}

}  // namespace

CameraIntrinsics intrinsics_from_homographies(const std::vector<Homography>& hs) {
  const std::size_t n = hs.size();
  if (n < 3)
    throw GeometryError("insufficient views: need at least 3 homographies, got " +
                        std::to_string(n));

  MatX a(int(2 * n), 6);
  for (std::size_t k = 0; k < n; ++k) {
    const std::array<double, 6> v12 = v_ij(hs[k].h, 0, 1);
    const std::array<double, 6> v11 = v_ij(hs[k].h, 0, 0);
    const std::array<double, 6> v22 = v_ij(hs[k].h, 1, 1);
    for (int c = 0; c < 6; ++c) {
      a(int(2 * k), c) = v12[std::size_t(c)];
      a(int(2 * k + 1), c) = v11[std::size_t(c)] - v22[std::size_t(c)];
    }
  }

  const NullSpace ns = null_space(a);
  // The conic is only determined when the smallest singular value is uniquely
  // minimal; coplanar or repeated views collapse the gap.
  if (ns.sigma[4] - ns.sigma[5] <= 1e-8 * ns.sigma[0])
    throw GeometryError("degenerate view set: absolute conic not uniquely determined");

  std::array<double, 6> b;
  std::copy_n(ns.x.begin(), 6, b.begin());
  if (b[0] < 0.0)
    for (double& v : b) v = -v;

  const double b11 = b[0], b12 = b[1], b22 = b[2], b13 = b[3], b23 = b[4], b33 = b[5];
  const double denom = b11 * b22 - b12 * b12;
  if (b11 <= 0.0 || denom <= 0.0)
    throw GeometryError("inconsistent homographies: recovered conic is not positive definite");

  const double v0 = (b12 * b13 - b11 * b23) / denom;
  const double lambda = b33 - (b13 * b13 + v0 * (b12 * b13 - b11 * b23)) / b11;
  if (lambda <= 0.0)
    throw GeometryError("inconsistent homographies: recovered conic is not positive definite");

  CameraIntrinsics k;
  k.fx = std::sqrt(lambda / b11);
  k.fy = std::sqrt(lambda * b11 / denom);
  k.skew = -b12 * k.fx * k.fx * k.fy / lambda;
  k.cx = k.skew * v0 / k.fy - b13 * k.fx * k.fx / lambda;
  k.cy = v0;
  return k;
}

ExtrinsicPose extrinsics_for_view(const CameraIntrinsics& k, const Homography& h) {
  const Mat3 kinv = k.matrix().inverse();
  const Vec3 a1 = kinv * h.h.col(0);
  const Vec3 a2 = kinv * h.h.col(1);
  const Vec3 a3 = kinv * h.h.col(2);

  const double s = a1.norm();
  if (s == 0.0 || a3.norm() <= 1e-12 * std::max(s, a2.norm()))
    throw GeometryError("t_z sign unresolvable: homography maps the plane origin to the camera centre");

  double lambda = 1.0 / s;
  if (a3.z * lambda < 0.0) lambda = -lambda;
  if (a3.z * lambda == 0.0)
    throw GeometryError("t_z sign unresolvable: translation has no depth component");

  const Vec3 r1 = lambda * a1;
  const Vec3 r2 = lambda * a2;
  const Vec3 r3 = r1.cross(r2);
  const Vec3 t = lambda * a3;

  // Project [r1 r2 r3] onto the rotation group.
  MatX q(3, 3);
  const Vec3 cols[3] = {r1, r2, r3};
  for (int c = 0; c < 3; ++c) {
    q(0, c) = cols[c].x;
    q(1, c) = cols[c].y;
    q(2, c) = cols[c].z;
  }
  const SvdResult dec = svd(q);
  Mat3 u, v;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      u(i, j) = dec.u(i, j);
      v(i, j) = dec.v(i, j);
    }
  Mat3 r = u * v.transposed();
  if (r.det() < 0.0) {
    // Flip the weakest direction; r3 = r1 x r2 makes this unreachable for
    // sensible inputs but the projection must stay a rotation regardless.
    for (int i = 0; i < 3; ++i) u(i, 2) = -u(i, 2);
    r = u * v.transposed();
  }
  return {r, t};
}

Vec2 project(const CameraIntrinsics& k, const ExtrinsicPose& pose, const Vec3& p) {
  const Vec3 pc = pose.r * p + pose.t;
  if (pc.z <= 0.0) throw GeometryError("point does not project: behind the camera");
  const double xn = pc.x / pc.z;
  const double yn = pc.y / pc.z;
  return {k.fx * xn + k.skew * yn + k.cx, k.fy * yn + k.cy};
}

double rms_reprojection(const CameraIntrinsics& k, const std::vector<ExtrinsicPose>& poses,
                        const std::vector<PlanarCorrespondences>& views) {
  if (poses.size() != views.size())
    throw GeometryError("rms_reprojection: pose count does not match view count");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < views.size(); ++i) {
    const PlanarCorrespondences& view = views[i];
    for (std::size_t j = 0; j < view.model_cm.size(); ++j) {
      const Vec2 pred =
          project(k, poses[i], {view.model_cm[j].x, view.model_cm[j].y, 0.0});
      const Vec2 d = pred - view.image_px[j];
      sum += d.dot(d);
      ++count;
    }
  }
  if (count == 0) throw GeometryError("rms_reprojection: no points");
  return std::sqrt(sum / double(count));
}

CalibrationResult calibrate(std::vector<PlanarCorrespondences> views) {
  std::sort(views.begin(), views.end(),
            [](const PlanarCorrespondences& a, const PlanarCorrespondences& b) {
              return a.view_id < b.view_id;
            });

  std::vector<Homography> hs;
  hs.reserve(views.size());
  for (const PlanarCorrespondences& v : views) hs.push_back(estimate_homography(v));

  CalibrationResult initial;
  initial.intrinsics = intrinsics_from_homographies(hs);
  for (std::size_t i = 0; i < views.size(); ++i) {
    initial.view_ids.push_back(views[i].view_id);
    initial.poses.push_back(extrinsics_for_view(initial.intrinsics, hs[i]));
  }
  initial.rms_px = rms_reprojection(initial.intrinsics, initial.poses, views);
  return refine_calibration(initial, views);
}

GroundMap::GroundMap(const CameraIntrinsics& k, const ExtrinsicPose& floor_pose) {
  Mat3 rt;
  for (int i = 0; i < 3; ++i) {
    rt(i, 0) = floor_pose.r(i, 0);
    rt(i, 1) = floor_pose.r(i, 1);
    rt(i, 2) = i == 0 ? floor_pose.t.x : (i == 1 ? floor_pose.t.y : floor_pose.t.z);
  }
  h_ = k.matrix() * rt;

  const double scale = h_.frobenius() / std::sqrt(3.0);
  if (scale == 0.0 || std::abs(h_.det()) < 1e-12 * scale * scale * scale)
    throw GeometryError("floor mapping is singular: camera does not see the plane");
  hinv_ = h_.inverse();
}

Vec2 GroundMap::to_floor(Vec2 pixel) const {
  const Vec3 q = hinv_ * Vec3{pixel.x, pixel.y, 1.0};
  const double mag = std::abs(q.x) + std::abs(q.y) + std::abs(q.z);
  if (mag == 0.0 || std::abs(q.z) <= 1e-14 * mag)
    throw GeometryError("pixel maps to the plane at infinity");
  return {q.x / q.z, q.y / q.z};
}

Vec2 GroundMap::to_pixel(Vec2 floor_cm) const {
  const Vec3 q = h_ * Vec3{floor_cm.x, floor_cm.y, 1.0};
  const double mag = std::abs(q.x) + std::abs(q.y) + std::abs(q.z);
  if (mag == 0.0 || std::abs(q.z) <= 1e-14 * mag)
    throw GeometryError("floor point maps to infinity in the image");
  return {q.x / q.z, q.y / q.z};
}

}  // namespace navcam
