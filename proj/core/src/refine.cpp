#include <algorithm>
#include <cmath>
#include <limits>

#include "navcam/calib.hpp"
#include "navcam/errors.hpp"

namespace navcam {

namespace {

Mat3 cross_matrix(const Vec3& w) {
  Mat3 k;
  k.m = {0, -w.z, w.y, w.z, 0, -w.x, -w.y, w.x, 0};
  return k;
}

Mat3 rodrigues(const Vec3& w) {
  const double theta = w.norm();
  if (theta < 1e-12) return Mat3::identity() + cross_matrix(w);
  const Vec3 axis = w * (1.0 / theta);
  const Mat3 k = cross_matrix(axis);
  return Mat3::identity() + k * std::sin(theta) + (k * k) * (1.0 - std::cos(theta));
}

Vec3 rotation_log(const Mat3& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double theta = std::acos(c);
  const Vec3 skew_part{(r(2, 1) - r(1, 2)) / 2.0, (r(0, 2) - r(2, 0)) / 2.0,
                       (r(1, 0) - r(0, 1)) / 2.0};
  if (theta < 1e-7) return skew_part;
  if (theta > 3.14159265358979323846 - 1e-6) {
    // Near a half turn the skew part vanishes; recover the axis from R + I.
    int best = 0;
    for (int i = 1; i < 3; ++i)
      if (r(i, i) > r(best, best)) best = i;
    Vec3 axis{r(0, best), r(1, best), r(2, best)};
    if (best == 0) axis.x += 1.0;
    if (best == 1) axis.y += 1.0;
    if (best == 2) axis.z += 1.0;
    const double norm = axis.norm();
    if (norm == 0.0) return {theta, 0.0, 0.0};
    axis = axis * (1.0 / norm);
    // Align the sign with the (possibly tiny) skew part for continuity.
    if (axis.dot(skew_part) < 0.0) axis = -axis;
    return axis * theta;
  }
  return skew_part * (theta / std::sin(theta));
}

constexpr int kIntrinsicCount = 5;
constexpr int kPoseCount = 6;
constexpr int kMaxIterations = 200;

int pose_offset(int view) { return kIntrinsicCount + kPoseCount * view; }

CameraIntrinsics unpack_intrinsics(const std::vector<double>& p) {
  return {p[0], p[1], p[2], p[3], p[4]};
}

ExtrinsicPose unpack_pose(const std::vector<double>& p, int view) {
  const int o = pose_offset(view);
  ExtrinsicPose pose;
  pose.r = rodrigues({p[std::size_t(o)], p[std::size_t(o + 1)], p[std::size_t(o + 2)]});
  pose.t = {p[std::size_t(o + 3)], p[std::size_t(o + 4)], p[std::size_t(o + 5)]};
  return pose;
}

// Residuals (predicted - observed) for one view. False when a point falls
// behind the camera; out is not usable then.
bool view_residuals(const std::vector<double>& p, int view,
                    const PlanarCorrespondences& corr, double* out) {
  const CameraIntrinsics k = unpack_intrinsics(p);
  const ExtrinsicPose pose = unpack_pose(p, view);
  for (std::size_t j = 0; j < corr.model_cm.size(); ++j) {
    const Vec3 pc = pose.r * Vec3{corr.model_cm[j].x, corr.model_cm[j].y, 0.0} + pose.t;
    if (pc.z <= 1e-9) return false;
    const double xn = pc.x / pc.z;
    const double yn = pc.y / pc.z;
    out[2 * j] = k.fx * xn + k.skew * yn + k.cx - corr.image_px[j].x;
    out[2 * j + 1] = k.fy * yn + k.cy - corr.image_px[j].y;
  }
  return true;
}

bool all_residuals(const std::vector<double>& p,
                   const std::vector<PlanarCorrespondences>& views,
                   const std::vector<int>& offsets, std::vector<double>& out) {
  for (std::size_t i = 0; i < views.size(); ++i)
    if (!view_residuals(p, int(i), views[i], out.data() + offsets[i])) return false;
  return true;
}

double cost_of(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

// 1e-6 relative, floored at 1e-8 absolute.
double fd_step(double value) { return std::max(1e-6 * std::abs(value), 1e-8); }

}  // namespace

CalibrationResult refine_calibration(const CalibrationResult& initial,
                                     const std::vector<PlanarCorrespondences>& views) {
  const int nviews = int(views.size());
  if (nviews == 0) throw GeometryError("refine_calibration: no views");
  if (initial.poses.size() != std::size_t(nviews) ||
      initial.view_ids.size() != std::size_t(nviews))
    throw GeometryError("refine_calibration: initial result inconsistent with views");

  // Process ascending view_id regardless of input order; the pose for each
  // view is looked up through view_ids.
  std::vector<int> order(static_cast<std::size_t>(nviews));
  for (int i = 0; i < nviews; ++i) order[std::size_t(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return views[std::size_t(a)].view_id < views[std::size_t(b)].view_id; });

  std::vector<PlanarCorrespondences> sorted;
  std::vector<int> pose_of_view;
  sorted.reserve(std::size_t(nviews));
  for (int idx : order) {
    const PlanarCorrespondences& v = views[std::size_t(idx)];
    if (v.model_cm.size() != v.image_px.size() || v.model_cm.empty())
      throw GeometryError("refine_calibration: malformed view " + std::to_string(v.view_id));
    const auto it = std::find(initial.view_ids.begin(), initial.view_ids.end(), v.view_id);
    if (it == initial.view_ids.end())
      throw GeometryError("refine_calibration: no initial pose for view " +
                          std::to_string(v.view_id));
    pose_of_view.push_back(int(it - initial.view_ids.begin()));
    sorted.push_back(v);
  }

  const int nparams = kIntrinsicCount + kPoseCount * nviews;
  std::vector<double> p(std::size_t(nparams), 0.0);
  p[0] = initial.intrinsics.fx;
  p[1] = initial.intrinsics.fy;
  p[2] = initial.intrinsics.skew;
  p[3] = initial.intrinsics.cx;
  p[4] = initial.intrinsics.cy;
  for (int i = 0; i < nviews; ++i) {
    const ExtrinsicPose& pose = initial.poses[std::size_t(pose_of_view[std::size_t(i)])];
    const Vec3 w = rotation_log(pose.r);
    const int o = pose_offset(i);
    p[std::size_t(o)] = w.x;
    p[std::size_t(o + 1)] = w.y;
    p[std::size_t(o + 2)] = w.z;
    p[std::size_t(o + 3)] = pose.t.x;
    p[std::size_t(o + 4)] = pose.t.y;
    p[std::size_t(o + 5)] = pose.t.z;
  }

  std::vector<int> offsets;
  int total = 0;
  for (const PlanarCorrespondences& v : sorted) {
    offsets.push_back(total);
    total += int(2 * v.model_cm.size());
  }
  const int npoints = total / 2;

  std::vector<double> r(static_cast<std::size_t>(total));
  if (!all_residuals(p, sorted, offsets, r))
    throw GeometryError("refine_calibration: initial pose places points behind the camera");
  double cost = cost_of(r);

  std::vector<double> rp(static_cast<std::size_t>(total)), rm(static_cast<std::size_t>(total));
  // Per-view blocks of the Jacobian: a = d r_view / d intrinsics (2P x 5),
  // b = d r_view / d pose (2P x 6). Pose parameters touch a single view, so
  // one Jacobian costs ~22 per-view evaluations instead of 2 * nparams.
  std::vector<MatX> ja(static_cast<std::size_t>(nviews)), jb(static_cast<std::size_t>(nviews));
  for (int i = 0; i < nviews; ++i) {
    const int rows = int(2 * sorted[std::size_t(i)].model_cm.size());
    ja[std::size_t(i)] = MatX(rows, kIntrinsicCount);
    jb[std::size_t(i)] = MatX(rows, kPoseCount);
  }

  double mu = 1e-3;
  bool converged = false;
  std::vector<double> g(static_cast<std::size_t>(nparams)), trial_p, d, neg_g;
  std::vector<double> rt(static_cast<std::size_t>(total));

  for (int iter = 0; iter < kMaxIterations && !converged; ++iter) {
    // Central-difference Jacobian blocks.
    std::vector<double> q = p;
    for (int c = 0; c < kIntrinsicCount; ++c) {
      const double h = fd_step(p[std::size_t(c)]);
      q[std::size_t(c)] = p[std::size_t(c)] + h;
      const bool okp = all_residuals(q, sorted, offsets, rp);
      q[std::size_t(c)] = p[std::size_t(c)] - h;
      const bool okm = all_residuals(q, sorted, offsets, rm);
      q[std::size_t(c)] = p[std::size_t(c)];
      if (!okp || !okm)
        throw GeometryError("refine_calibration: finite-difference step left the valid domain");
      for (int i = 0; i < nviews; ++i) {
        MatX& a = ja[std::size_t(i)];
        for (int row = 0; row < a.rows(); ++row)
          a(row, c) = (rp[std::size_t(offsets[std::size_t(i)] + row)] -
                       rm[std::size_t(offsets[std::size_t(i)] + row)]) /
                      (2.0 * h);
      }
    }
    for (int i = 0; i < nviews; ++i) {
      MatX& b = jb[std::size_t(i)];
      const int o = pose_offset(i);
      for (int c = 0; c < kPoseCount; ++c) {
        const double h = fd_step(p[std::size_t(o + c)]);
        q[std::size_t(o + c)] = p[std::size_t(o + c)] + h;
        const bool okp = view_residuals(q, i, sorted[std::size_t(i)], rp.data());
        q[std::size_t(o + c)] = p[std::size_t(o + c)] - h;
        const bool okm = view_residuals(q, i, sorted[std::size_t(i)], rm.data());
        q[std::size_t(o + c)] = p[std::size_t(o + c)];
        if (!okp || !okm)
          throw GeometryError("refine_calibration: finite-difference step left the valid domain");
        for (int row = 0; row < b.rows(); ++row)
          b(row, c) = (rp[std::size_t(row)] - rm[std::size_t(row)]) / (2.0 * h);
      }
    }

    // Normal equations, assembled block-sparse: pose blocks only couple with
    // themselves and the intrinsics.
    MatX jtj(nparams, nparams);
    std::fill(g.begin(), g.end(), 0.0);
    for (int i = 0; i < nviews; ++i) {
      const MatX& a = ja[std::size_t(i)];
      const MatX& b = jb[std::size_t(i)];
      const int o = pose_offset(i);
      const double* rv = r.data() + offsets[std::size_t(i)];
      for (int row = 0; row < a.rows(); ++row) {
        for (int x = 0; x < kIntrinsicCount; ++x) {
          const double ax = a(row, x);
          if (ax == 0.0) continue;
          for (int y = x; y < kIntrinsicCount; ++y) jtj(x, y) += ax * a(row, y);
          for (int y = 0; y < kPoseCount; ++y) jtj(x, o + y) += ax * b(row, y);
          g[std::size_t(x)] += ax * rv[row];
        }
        for (int x = 0; x < kPoseCount; ++x) {
          const double bx = b(row, x);
          if (bx == 0.0) continue;
          for (int y = x; y < kPoseCount; ++y) jtj(o + x, o + y) += bx * b(row, y);
          g[std::size_t(o + x)] += bx * rv[row];
        }
      }
    }
    for (int x = 0; x < nparams; ++x)
      for (int y = 0; y < x; ++y) jtj(x, y) = jtj(y, x);

    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax < 1e-10) {
      converged = true;
      break;
    }

    neg_g.assign(g.begin(), g.end());
    for (double& v : neg_g) v = -v;

    bool stepped = false;
    for (int attempt = 0; attempt < 50; ++attempt) {
      MatX damped = jtj;
      for (int i = 0; i < nparams; ++i)
        damped(i, i) += mu * std::max(jtj(i, i), 1e-12);
      if (!solve_spd(damped, neg_g, d)) {
        mu *= 10.0;
        continue;
      }
      trial_p = p;
      for (int i = 0; i < nparams; ++i) trial_p[std::size_t(i)] += d[std::size_t(i)];
      double trial_cost = std::numeric_limits<double>::infinity();
      if (all_residuals(trial_p, sorted, offsets, rt)) trial_cost = cost_of(rt);
      if (trial_cost < cost) {
        const double decrease = cost - trial_cost;
        p.swap(trial_p);
        r.swap(rt);
        const double prev = cost;
        cost = trial_cost;
        mu = std::max(mu / 10.0, 1e-12);
        stepped = true;
        if (decrease < 1e-12 * std::max(prev, 1e-300)) converged = true;
        break;
      }
      mu *= 10.0;
      if (mu > 1e14) break;
    }
    if (!stepped) {
      // No descent direction improves the cost: the iterate is at the
      // numerical optimum.
      converged = true;
    }
  }

  CalibrationResult out;
  out.intrinsics = unpack_intrinsics(p);
  for (int i = 0; i < nviews; ++i) {
    out.view_ids.push_back(sorted[std::size_t(i)].view_id);
    out.poses.push_back(unpack_pose(p, i));
  }
  out.rms_px = std::sqrt(cost / double(npoints));
  out.converged = converged;
  return out;
}

}  // namespace navcam
