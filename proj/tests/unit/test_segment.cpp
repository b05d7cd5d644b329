#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "doctest.h"
#include "navcam/errors.hpp"
#include "navcam/rng.hpp"
#include "navcam/segment.hpp"

using navcam::Blob;
using navcam::ClassifierParams;
using navcam::ColorClass;
using navcam::DetectionError;
using navcam::ImageRGB;
using navcam::LabelMap;
using navcam::Rgb8;
using navcam::Rng;
using navcam::Vec2;

namespace {

// ---- oracle -----------------------------------------------------------------
// Naive flood-fill grouping, written directly from the blob definition:
// maximal 4-connected sets of one non-background class, then the same
// filter and sort contract as the unit under test.

std::vector<Blob> naive_blobs(const LabelMap& labels, int min_area) {
  const int w = labels.width, h = labels.height;
  std::vector<char> seen(std::size_t(w) * std::size_t(h), 0);
  std::vector<Blob> out;

  for (int v0 = 0; v0 < h; ++v0)
    for (int u0 = 0; u0 < w; ++u0) {
      const std::size_t start = std::size_t(v0) * w + u0;
      if (seen[start]) continue;
      const ColorClass c = labels.at(u0, v0);
      if (c == ColorClass::Background) {
        seen[start] = 1;
        continue;
      }
      // BFS flood fill.
      std::deque<std::pair<int, int>> queue{{u0, v0}};
      seen[start] = 1;
      std::int64_t count = 0;
      double su = 0.0, sv = 0.0;
      int umin = u0, umax = u0, vmin = v0, vmax = v0;
      while (!queue.empty()) {
        const auto [u, v] = queue.front();
        queue.pop_front();
        ++count;
        su += u;
        sv += v;
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
        const int du[4] = {1, -1, 0, 0};
        const int dv[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nu = u + du[k], nv = v + dv[k];
          if (nu < 0 || nu >= w || nv < 0 || nv >= h) continue;
          const std::size_t idx = std::size_t(nv) * w + nu;
          if (seen[idx] || labels.at(nu, nv) != c) continue;
          seen[idx] = 1;
          queue.push_back({nu, nv});
        }
      }
      if (count < min_area) continue;
      Blob b;
      b.color = c;
      b.pixel_count = count;
      b.centroid = {su / double(count), sv / double(count)};
      b.u_min = umin;
      b.u_max = umax;
      b.v_min = vmin;
      b.v_max = vmax;
      out.push_back(b);
    }

  std::sort(out.begin(), out.end(), [](const Blob& a, const Blob& b) {
    if (a.color != b.color) return a.color < b.color;
    if (a.pixel_count != b.pixel_count) return a.pixel_count > b.pixel_count;
    if (a.u_min != b.u_min) return a.u_min < b.u_min;
    return a.v_min < b.v_min;
  });
  return out;
}

LabelMap random_labels(Rng& rng, int max_side = 64) {
  LabelMap m;
  m.width = 1 + int(rng.uniform() * max_side);
  m.height = 1 + int(rng.uniform() * max_side);
  m.labels.resize(std::size_t(m.width) * std::size_t(m.height));
  for (auto& l : m.labels) {
    const double r = rng.uniform();
    // Background-heavy mix produces a few dozen components per map.
    l = r < 0.55   ? ColorClass::Background
        : r < 0.72 ? ColorClass::RobotGreen
        : r < 0.88 ? ColorClass::TargetRed
                   : ColorClass::ObstacleBlue;
  }
  return m;
}

void check_blobs_equal(const std::vector<Blob>& got, const std::vector<Blob>& expect) {
  REQUIRE(got.size() == expect.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].color == expect[i].color);
    CHECK(got[i].pixel_count == expect[i].pixel_count);
    CHECK(got[i].centroid.x == doctest::Approx(expect[i].centroid.x).epsilon(1e-12));
    CHECK(got[i].centroid.y == doctest::Approx(expect[i].centroid.y).epsilon(1e-12));
    CHECK(got[i].u_min == expect[i].u_min);
    CHECK(got[i].u_max == expect[i].u_max);
    CHECK(got[i].v_min == expect[i].v_min);
    CHECK(got[i].v_max == expect[i].v_max);
  }
}

LabelMap paint(int w, int h) {
  LabelMap m;
  m.width = w;
  m.height = h;
  m.labels.assign(std::size_t(w) * std::size_t(h), ColorClass::Background);
  return m;
}

template <typename F>
std::string detection_message(F&& f) {
  try {
    f();
  } catch (const DetectionError& e) {
    return e.what();
  }
  return "<no exception>";
}

}  // namespace

TEST_SUITE("segment") {

TEST_CASE("classify_pixel hand examples") {
  ClassifierParams strict{50, 80};
  CHECK(navcam::classify_pixel({200, 30, 40}, strict) == ColorClass::TargetRed);

  ClassifierParams def;
  CHECK(navcam::classify_pixel({120, 120, 120}, def) == ColorClass::Background);
  CHECK(navcam::classify_pixel({40, 210, 40}, def) == ColorClass::RobotGreen);
  CHECK(navcam::classify_pixel({40, 40, 210}, def) == ColorClass::ObstacleBlue);
  CHECK(navcam::classify_pixel({210, 40, 40}, def) == ColorClass::TargetRed);
  CHECK(navcam::classify_pixel({0, 0, 0}, def) == ColorClass::Background);

  // Boundary: channel must reach min_value and lead both others by >= margin.
  ClassifierParams p{40, 60};
  CHECK(navcam::classify_pixel({60, 20, 20}, p) == ColorClass::TargetRed);   // exactly min_value
  CHECK(navcam::classify_pixel({59, 19, 19}, p) == ColorClass::Background);  // below min_value
  CHECK(navcam::classify_pixel({100, 60, 60}, p) == ColorClass::TargetRed);  // margin met exactly
  CHECK(navcam::classify_pixel({100, 61, 60}, p) == ColorClass::Background); // margin missed by 1
}

TEST_CASE("label_image marks exactly the classified pixels") {
  ImageRGB img(9, 6, {255, 255, 255});
  img.at(5, 3) = {0, 255, 0};
  const LabelMap m = navcam::label_image(img, ClassifierParams{});
  for (int v = 0; v < 6; ++v)
    for (int u = 0; u < 9; ++u)
      CHECK(m.at(u, v) == (u == 5 && v == 3 ? ColorClass::RobotGreen : ColorClass::Background));
}

TEST_CASE("every pixel gets exactly one label and counts add up") {
  Rng rng(17);
  ImageRGB img(40, 30);
  for (auto& p : img.pixels)
    for (int c = 0; c < 3; ++c) p[std::size_t(c)] = std::uint8_t(rng.next_u64() & 0xff);
  const LabelMap m = navcam::label_image(img, ClassifierParams{});
  std::int64_t counts[4] = {0, 0, 0, 0};
  for (ColorClass l : m.labels) ++counts[int(l)];
  CHECK(counts[0] + counts[1] + counts[2] + counts[3] == 40 * 30);

  // Pixel-wise purity: recomputing in reverse scan order changes nothing.
  for (int v = m.height - 1; v >= 0; --v)
    for (int u = m.width - 1; u >= 0; --u)
      CHECK(m.at(u, v) == navcam::classify_pixel(img.at(u, v), ClassifierParams{}));
}

TEST_CASE("10x10 square blob has centroid (4.5, 4.5)") {
  LabelMap m = paint(16, 16);
  for (int v = 0; v < 10; ++v)
    for (int u = 0; u < 10; ++u) m.at(u, v) = ColorClass::RobotGreen;
  const auto blobs = navcam::extract_blobs(m, 1);
  REQUIRE(blobs.size() == 1);
  CHECK(blobs[0].centroid.x == doctest::Approx(4.5));
  CHECK(blobs[0].centroid.y == doctest::Approx(4.5));
  CHECK(blobs[0].pixel_count == 100);
  CHECK(blobs[0].u_min == 0);
  CHECK(blobs[0].u_max == 9);
}

TEST_CASE("two disjoint blue squares become two blobs") {
  LabelMap m = paint(20, 8);
  for (int v = 2; v < 5; ++v)
    for (int u = 2; u < 5; ++u) m.at(u, v) = ColorClass::ObstacleBlue;
  for (int v = 2; v < 5; ++v)
    for (int u = 10; u < 13; ++u) m.at(u, v) = ColorClass::ObstacleBlue;
  const auto blobs = navcam::extract_blobs(m, 1);
  REQUIRE(blobs.size() == 2);
  CHECK(blobs[0].pixel_count == 9);
  CHECK(blobs[1].pixel_count == 9);
  CHECK(blobs[0].u_min == 2);   // equal counts tie-break on u_min
  CHECK(blobs[1].u_min == 10);
}

TEST_CASE("diagonal contact does not connect under 4-connectivity") {
  LabelMap m = paint(4, 4);
  m.at(0, 0) = ColorClass::TargetRed;
  m.at(1, 1) = ColorClass::TargetRed;
  const auto blobs = navcam::extract_blobs(m, 1);
  CHECK(blobs.size() == 2);
}

TEST_CASE("touching blobs of different classes stay separate") {
  LabelMap m = paint(6, 3);
  for (int u = 0; u < 3; ++u) m.at(u, 1) = ColorClass::RobotGreen;
  for (int u = 3; u < 6; ++u) m.at(u, 1) = ColorClass::TargetRed;
  const auto blobs = navcam::extract_blobs(m, 1);
  REQUIRE(blobs.size() == 2);
  CHECK(blobs[0].color == ColorClass::RobotGreen);
  CHECK(blobs[1].color == ColorClass::TargetRed);
  CHECK(blobs[0].pixel_count == 3);
}

TEST_CASE("min_area filter and validation") {
  LabelMap m = paint(10, 10);
  m.at(0, 0) = ColorClass::RobotGreen;
  for (int v = 0; v < 5; ++v)
    for (int u = 5; u < 10; ++u) m.at(u, v) = ColorClass::RobotGreen;
  CHECK(navcam::extract_blobs(m, 20).size() == 1);
  CHECK(navcam::extract_blobs(m, 1).size() == 2);
  CHECK_THROWS_AS((void)navcam::extract_blobs(m, 0), std::invalid_argument);
}

TEST_CASE("blobs match the brute-force oracle on random maps") {
  Rng rng(4242);
  for (int trial = 0; trial < 60; ++trial) {
    const LabelMap m = random_labels(rng);
    const int min_area = 1 + int(rng.uniform() * 6);
    check_blobs_equal(navcam::extract_blobs(m, min_area), naive_blobs(m, min_area));
  }
}

TEST_CASE("blob partition property against the oracle") {
  Rng rng(11);
  const LabelMap m = random_labels(rng, 48);
  const auto blobs = navcam::extract_blobs(m, 1);
  // With min_area 1 the blobs of each class partition that class's pixels.
  std::int64_t labeled = 0;
  for (ColorClass l : m.labels)
    if (l != ColorClass::Background) ++labeled;
  std::int64_t covered = 0;
  for (const Blob& b : blobs) covered += b.pixel_count;
  CHECK(covered == labeled);
}

TEST_CASE("centroid of a symmetric blob is its center") {
  LabelMap m = paint(31, 31);
  // Diamond |du| + |dv| <= 7 around (15, 15).
  for (int v = 0; v < 31; ++v)
    for (int u = 0; u < 31; ++u)
      if (std::abs(u - 15) + std::abs(v - 15) <= 7) m.at(u, v) = ColorClass::ObstacleBlue;
  const auto blobs = navcam::extract_blobs(m, 1);
  REQUIRE(blobs.size() == 1);
  CHECK(blobs[0].centroid.x == doctest::Approx(15.0));
  CHECK(blobs[0].centroid.y == doctest::Approx(15.0));
}

TEST_CASE("scene_from_blobs picks roles and derives obstacle radii") {
  LabelMap m = paint(64, 64);
  for (int v = 0; v < 8; ++v)
    for (int u = 0; u < 8; ++u) m.at(u, v) = ColorClass::RobotGreen;       // 64 px robot
  for (int v = 20; v < 24; ++v)
    for (int u = 0; u < 4; ++u) m.at(u, v) = ColorClass::RobotGreen;       // smaller green
  for (int v = 40; v < 46; ++v)
    for (int u = 10; u < 16; ++u) m.at(u, v) = ColorClass::TargetRed;      // 36 px target
  for (int v = 50; v < 60; ++v)
    for (int u = 30; u < 40; ++u) m.at(u, v) = ColorClass::ObstacleBlue;   // 100 px obstacle

  const auto obs = navcam::scene_from_blobs(navcam::extract_blobs(m, 1), 12);
  CHECK(obs.frame_id == 12);
  CHECK(obs.robot.pixel_count == 64);
  CHECK(obs.target.pixel_count == 36);
  REQUIRE(obs.obstacles.size() == 1);
  CHECK(obs.obstacles[0].blob.pixel_count == 100);
  CHECK(obs.obstacles[0].radius_px ==
        doctest::Approx(std::sqrt(100.0 / 3.14159265358979323846)).epsilon(1e-12));
}

TEST_CASE("missing robot and missing target are distinct detection failures") {
  LabelMap m = paint(32, 32);
  for (int v = 0; v < 8; ++v)
    for (int u = 0; u < 8; ++u) m.at(u, v) = ColorClass::TargetRed;
  const auto only_target = navcam::extract_blobs(m, 1);
  CHECK(detection_message([&] { (void)navcam::scene_from_blobs(only_target, 0); })
            .find("robot not detected") != std::string::npos);

  LabelMap m2 = paint(32, 32);
  for (int v = 0; v < 8; ++v)
    for (int u = 0; u < 8; ++u) m2.at(u, v) = ColorClass::RobotGreen;
  const auto only_robot = navcam::extract_blobs(m2, 1);
  CHECK(detection_message([&] { (void)navcam::scene_from_blobs(only_robot, 0); })
            .find("target not detected") != std::string::npos);
}

TEST_CASE("classification is stable under illumination 0.8 to 1.2 on the palette") {
  const Rgb8 palette[4] = {{190, 190, 190}, {40, 210, 40}, {210, 40, 40}, {40, 40, 210}};
  const ColorClass expect[4] = {ColorClass::Background, ColorClass::RobotGreen,
                                ColorClass::TargetRed, ColorClass::ObstacleBlue};
  ClassifierParams def;  // margin 40, min 60
  for (double f = 0.8; f <= 1.2001; f += 0.05) {
    ImageRGB img(4, 1);
    for (int i = 0; i < 4; ++i) img.at(i, 0) = palette[i];
    const ImageRGB lit = navcam::scale_illumination(img, f);
    for (int i = 0; i < 4; ++i) CHECK(navcam::classify_pixel(lit.at(i, 0), def) == expect[i]);
  }
}

TEST_CASE("render_label_map uses the fixed palette plus white crosshairs") {
  LabelMap m = paint(32, 32);
  for (int v = 10; v < 20; ++v)
    for (int u = 10; u < 20; ++u) m.at(u, v) = ColorClass::RobotGreen;
  const auto blobs = navcam::extract_blobs(m, 1);
  const ImageRGB img = navcam::render_label_map(m, blobs);

  REQUIRE(img.width == 32);
  REQUIRE(img.height == 32);
  CHECK(img.at(0, 0) == Rgb8{0, 0, 0});
  CHECK(img.at(10, 10) == Rgb8{0, 255, 0});

  // Centroid (14.5, 14.5) rounds to (14, 14) or (15, 15) depending on the
  // rounding rule; the crosshair center must be white either way.
  const Vec2 c = blobs[0].centroid;
  const int cu = int(std::lround(c.x)), cv = int(std::lround(c.y));
  CHECK(img.at(cu, cv) == Rgb8{255, 255, 255});
  // 5-pixel crosshair arms.
  CHECK(img.at(cu - 2, cv) == Rgb8{255, 255, 255});
  CHECK(img.at(cu + 2, cv) == Rgb8{255, 255, 255});
  CHECK(img.at(cu, cv - 2) == Rgb8{255, 255, 255});
  CHECK(img.at(cu, cv + 2) == Rgb8{255, 255, 255});

  // Every pixel is palette or white.
  for (const Rgb8& p : img.pixels) {
    const bool ok = p == Rgb8{0, 0, 0} || p == Rgb8{0, 255, 0} || p == Rgb8{255, 0, 0} ||
                    p == Rgb8{0, 0, 255} || p == Rgb8{255, 255, 255};
    CHECK(ok);
  }
}

}  // TEST_SUITE
