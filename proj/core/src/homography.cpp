#include <cmath>

#include "navcam/calib.hpp"
#include "navcam/errors.hpp"

namespace navcam {

namespace {

// Similarity moving the set to zero centroid and mean distance sqrt(2).
Mat3 normalizing_transform(const std::vector<Vec2>& pts) {
  Vec2 centroid{0, 0};
  for (Vec2 p : pts) centroid = centroid + p;
  centroid = centroid * (1.0 / double(pts.size()));
  double mean_dist = 0.0;
  for (Vec2 p : pts) mean_dist += (p - centroid).norm();
  mean_dist /= double(pts.size());
  if (mean_dist == 0.0)
    throw GeometryError("degenerate correspondences: all points coincide");
  const double s = std::sqrt(2.0) / mean_dist;
  Mat3 t;
  t.m = {s, 0, -s * centroid.x, 0, s, -s * centroid.y, 0, 0, 1};
  return t;
}

Mat3 canonicalize(Mat3 h) {
  const double norm = h.frobenius();
  if (norm == 0.0) throw GeometryError("degenerate homography: zero matrix");
  for (double& v : h.m) v /= norm;
  double lead = h(2, 2);
  if (lead == 0.0) {
    for (double v : h.m) {
      if (v != 0.0) {
        lead = v;
        break;
      }
    }
  }
  if (lead < 0.0)
    for (double& v : h.m) v = -v;
  return h;
}

}  // namespace

Vec2 Homography::apply(Vec2 p) const {
  const Vec3 q = h * Vec3{p.x, p.y, 1.0};
  if (q.z == 0.0) throw GeometryError("homography maps point to infinity");
  return {q.x / q.z, q.y / q.z};
}

Homography estimate_homography(const PlanarCorrespondences& corr) {
  const std::size_t n = corr.model_cm.size();
  if (corr.image_px.size() != n)
    throw GeometryError("correspondence arrays differ in length (view " +
                        std::to_string(corr.view_id) + ")");
  if (n < 4)
    throw GeometryError("too few correspondences: view " + std::to_string(corr.view_id) +
                        " has " + std::to_string(n) + ", need at least 4");

  const Mat3 t_model = normalizing_transform(corr.model_cm);
  const Mat3 t_image = normalizing_transform(corr.image_px);

  MatX a(int(2 * n), 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 mp = t_model * Vec3{corr.model_cm[i].x, corr.model_cm[i].y, 1.0};
    const Vec3 ip = t_image * Vec3{corr.image_px[i].x, corr.image_px[i].y, 1.0};
    const double x = mp.x, y = mp.y, u = ip.x, v = ip.y;
    const int r = int(2 * i);
    a(r, 0) = x;
    a(r, 1) = y;
    a(r, 2) = 1;
    a(r, 6) = -u * x;
    a(r, 7) = -u * y;
    a(r, 8) = -u;
    a(r + 1, 3) = x;
    a(r + 1, 4) = y;
    a(r + 1, 5) = 1;
    a(r + 1, 6) = -v * x;
    a(r + 1, 7) = -v * y;
    a(r + 1, 8) = -v;
  }

  const NullSpace ns = null_space(a);
  // A unique null direction needs rank 8: the second-smallest singular value
  // must be clearly nonzero.
  if (ns.sigma[7] <= 1e-9 * ns.sigma[0])
    throw GeometryError("degenerate correspondences: view " +
                        std::to_string(corr.view_id) +
                        " does not determine a homography");

  Mat3 hn;
  for (int i = 0; i < 9; ++i) hn.m[std::size_t(i)] = ns.x[std::size_t(i)];
  const Mat3 h = t_image.inverse() * hn * t_model;

  Homography out{canonicalize(h)};
  if (std::abs(out.h.det()) < 1e-12)
    throw GeometryError("degenerate correspondences: singular homography (view " +
                        std::to_string(corr.view_id) + ")");
  return out;
}

}  // namespace navcam
