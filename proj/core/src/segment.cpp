#include "navcam/segment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "navcam/errors.hpp"

namespace navcam {

ColorClass classify_pixel(Rgb8 p, const ClassifierParams& params) {
  const int r = p[0], g = p[1], b = p[2];
  const int m = params.dominance_margin;
  const int floor = params.min_value;
  if (r >= floor && r >= g + m && r >= b + m) return ColorClass::TargetRed;
  if (g >= floor && g >= r + m && g >= b + m) return ColorClass::RobotGreen;
  if (b >= floor && b >= r + m && b >= g + m) return ColorClass::ObstacleBlue;
  return ColorClass::Background;
}

LabelMap label_image(const ImageRGB& img, const ClassifierParams& params) {
  LabelMap out;
  out.width = img.width;
  out.height = img.height;
  out.labels.resize(img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    out.labels[i] = classify_pixel(img.pixels[i], params);
  return out;
}

namespace {

struct UnionFind {
  std::vector<std::int32_t> parent;

  std::int32_t make() {
    parent.push_back(std::int32_t(parent.size()));
    return parent.back();
  }
  std::int32_t find(std::int32_t i) {
    while (parent[std::size_t(i)] != i) {
      parent[std::size_t(i)] = parent[std::size_t(parent[std::size_t(i)])];
      i = parent[std::size_t(i)];
    }
    return i;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::size_t(std::max(a, b))] = std::min(a, b);
  }
};

}  // namespace

std::vector<Blob> extract_blobs(const LabelMap& labels, int min_area) {
  if (min_area < 1) throw std::invalid_argument("extract_blobs: min_area must be >= 1");
  const int w = labels.width;
  const int h = labels.height;

  // Provisional component ids, merged through left/up neighbours of the same
  // class (4-connectivity).
  std::vector<std::int32_t> id(std::size_t(w) * std::size_t(h), -1);
  UnionFind uf;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const ColorClass c = labels.at(u, v);
      if (c == ColorClass::Background) continue;
      const std::size_t idx = std::size_t(v) * w + u;
      std::int32_t left = u > 0 && labels.at(u - 1, v) == c ? id[idx - 1] : -1;
      std::int32_t up = v > 0 && labels.at(u, v - 1) == c ? id[idx - std::size_t(w)] : -1;
      if (left < 0 && up < 0) {
        id[idx] = uf.make();
      } else if (left >= 0 && up >= 0) {
        uf.unite(left, up);
        id[idx] = uf.find(left);
      } else {
        id[idx] = left >= 0 ? left : up;
      }
    }
  }

  struct Acc {
    ColorClass color = ColorClass::Background;
    std::int64_t count = 0;
    double sum_u = 0.0, sum_v = 0.0;
    int u_min = 0, u_max = 0, v_min = 0, v_max = 0;
  };
  std::vector<Acc> acc(uf.parent.size());
  std::vector<bool> seen(uf.parent.size(), false);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const std::size_t idx = std::size_t(v) * w + u;
      if (id[idx] < 0) continue;
      const std::int32_t root = uf.find(id[idx]);
      Acc& a = acc[std::size_t(root)];
      if (!seen[std::size_t(root)]) {
        seen[std::size_t(root)] = true;
        a.color = labels.at(u, v);
        a.u_min = a.u_max = u;
        a.v_min = a.v_max = v;
      } else {
        a.u_min = std::min(a.u_min, u);
        a.u_max = std::max(a.u_max, u);
        a.v_min = std::min(a.v_min, v);
        a.v_max = std::max(a.v_max, v);
      }
      ++a.count;
      a.sum_u += u;
      a.sum_v += v;
    }
  }

  std::vector<Blob> blobs;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (!seen[i] || acc[i].count < min_area) continue;
    Blob b;
    b.color = acc[i].color;
    b.pixel_count = acc[i].count;
    b.centroid = {acc[i].sum_u / double(acc[i].count), acc[i].sum_v / double(acc[i].count)};
    b.u_min = acc[i].u_min;
    b.u_max = acc[i].u_max;
    b.v_min = acc[i].v_min;
    b.v_max = acc[i].v_max;
    blobs.push_back(b);
  }
  std::sort(blobs.begin(), blobs.end(), [](const Blob& a, const Blob& b) {
    if (a.color != b.color) return a.color < b.color;
    if (a.pixel_count != b.pixel_count) return a.pixel_count > b.pixel_count;
    if (a.u_min != b.u_min) return a.u_min < b.u_min;
    return a.v_min < b.v_min;
  });
  return blobs;
}

ArenaObservation scene_from_blobs(const std::vector<Blob>& blobs, int frame_id) {
  ArenaObservation obs;
  obs.frame_id = frame_id;

  auto better = [](const Blob& a, const Blob& b) {
    if (a.pixel_count != b.pixel_count) return a.pixel_count > b.pixel_count;
    if (a.u_min != b.u_min) return a.u_min < b.u_min;
    return a.v_min < b.v_min;
  };
  const Blob* robot = nullptr;
  const Blob* target = nullptr;
  for (const Blob& b : blobs) {
    if (b.color == ColorClass::RobotGreen && (!robot || better(b, *robot))) robot = &b;
    if (b.color == ColorClass::TargetRed && (!target || better(b, *target))) target = &b;
  }
  if (!robot) throw DetectionError("robot not detected: no green blob");
  if (!target) throw DetectionError("target not detected: no red blob");

  obs.robot = *robot;
  obs.target = *target;
  for (const Blob& b : blobs) {
    if (b.color != ColorClass::ObstacleBlue) continue;
    const double radius = std::sqrt(double(b.pixel_count) / 3.14159265358979323846);
    obs.obstacles.push_back({b, radius});
  }
  return obs;
}

ImageRGB render_label_map(const LabelMap& labels, const std::vector<Blob>& blobs) {
  static constexpr Rgb8 kPalette[4] = {
      {0, 0, 0},      // background
      {0, 255, 0},    // robot
      {255, 0, 0},    // target
      {0, 0, 255},    // obstacle
  };
  ImageRGB out(labels.width, labels.height);
  for (std::size_t i = 0; i < labels.labels.size(); ++i)
    out.pixels[i] = kPalette[std::size_t(labels.labels[i])];

  const Rgb8 white{255, 255, 255};
  for (const Blob& b : blobs) {
    const int cu = int(std::lround(b.centroid.x));
    const int cv = int(std::lround(b.centroid.y));
    for (int d = -2; d <= 2; ++d) {
      if (out.in_bounds(cu + d, cv)) out.at(cu + d, cv) = white;
      if (out.in_bounds(cu, cv + d)) out.at(cu, cv + d) = white;
    }
  }
  return out;
}

}  // namespace navcam
