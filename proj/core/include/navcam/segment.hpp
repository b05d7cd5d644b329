#pragma once

#include <cstdint>
#include <vector>

#include "navcam/image.hpp"
#include "navcam/linalg.hpp"

namespace navcam {

// Enumerator order doubles as the sort order of extract_blobs.
enum class ColorClass : std::uint8_t {
  Background = 0,
  RobotGreen = 1,
  TargetRed = 2,
  ObstacleBlue = 3,
};

struct ClassifierParams {
  int dominance_margin = 40;
  int min_value = 60;
};

// A channel claims a pixel when it reaches min_value and exceeds both other
// channels by dominance_margin. Checked red, green, blue; with margin zero
// the first match wins.
ColorClass classify_pixel(Rgb8 p, const ClassifierParams& params);

struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<ColorClass> labels;

  ColorClass& at(int u, int v) { return labels[std::size_t(v) * width + u]; }
  ColorClass at(int u, int v) const { return labels[std::size_t(v) * width + u]; }
  bool operator==(const LabelMap&) const = default;
};

LabelMap label_image(const ImageRGB& img, const ClassifierParams& params);

struct Blob {
  ColorClass color = ColorClass::Background;
  std::int64_t pixel_count = 0;
  Vec2 centroid;  // mean pixel position
  int u_min = 0, u_max = 0, v_min = 0, v_max = 0;
};

// 4-connected components of the non-background classes, components below
// min_area dropped. Sorted by (color, pixel_count descending, u_min
// ascending, v_min ascending).
std::vector<Blob> extract_blobs(const LabelMap& labels, int min_area = 20);

struct ObstacleObservation {
  Blob blob;
  double radius_px = 0.0;  // disk-equivalent: sqrt(pixel_count / pi)
};

struct ArenaObservation {
  int frame_id = 0;
  Blob robot;
  Blob target;
  std::vector<ObstacleObservation> obstacles;
};

// Picks the largest robot and target blobs (ties: smaller u_min, then
// v_min). All obstacle blobs are kept in the given order. Throws
// DetectionError when robot or target is missing.
ArenaObservation scene_from_blobs(const std::vector<Blob>& blobs, int frame_id);

// Annotated map: BACKGROUND (0,0,0), ROBOT_GREEN (0,255,0), TARGET_RED
// (255,0,0), OBSTACLE_BLUE (0,0,255), plus a white 5-pixel crosshair at each
// blob centroid.
ImageRGB render_label_map(const LabelMap& labels, const std::vector<Blob>& blobs);

}  // namespace navcam
