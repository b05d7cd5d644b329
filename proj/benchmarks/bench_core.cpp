// Microbenchmarks for the hot paths: the Jacobi SVD underneath every linear
// solve, homography estimation at full-board size, and the per-frame pixel
// pipeline (render, classify, extract).

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "navcam/calib.hpp"
#include "navcam/linalg.hpp"
#include "navcam/rng.hpp"
#include "navcam/segment.hpp"
#include "navcam/synth.hpp"

namespace {

using namespace navcam;

MatX gaussian_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  MatX a(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) a(r, c) = rng.gaussian();
  return a;
}

void BM_svd(benchmark::State& state) {
  const MatX a = gaussian_matrix(int(state.range(0)), int(state.range(1)), 7);
  for (auto _ : state) {
    SvdResult r = svd(a);
    benchmark::DoNotOptimize(r.sigma.data());
  }
}
// 312 x 9 is the homography DLT system of one full board view; the square
// case probes sweep convergence without the tall-matrix shortcut.
BENCHMARK(BM_svd)->Args({312, 9})->Args({40, 40});

const PlanarCorrespondences& board_view() {
  static const PlanarCorrespondences view = [] {
    BoardSpec board;
    CameraSpec cam;
    cam.intrinsics = {800.0, 780.0, 0.5, 320.0, 240.0};
    const std::vector<ExtrinsicPose> poses = sample_board_poses(board, cam, 1, 4242);
    Rng rng(99);
    return render_checkerboard_corners(board, cam, poses[0], 0.2, rng, 0);
  }();
  return view;
}

void BM_estimate_homography(benchmark::State& state) {
  const PlanarCorrespondences& view = board_view();
  for (auto _ : state) {
    Homography h = estimate_homography(view);
    benchmark::DoNotOptimize(h.h.m.data());
  }
}
BENCHMARK(BM_estimate_homography);

struct ArenaFixture {
  ArenaSpec arena;
  CameraSpec cam;
  RenderNoise noise{6.0, 1.0, 2026};
  RenderedArena rendered;
  LabelMap labels;
};

const ArenaFixture& arena_fixture() {
  static const ArenaFixture fx = [] {
    ArenaFixture f;
    f.arena.obstacles = {{{55.0, 25.0}, 5.0}, {{70.0, 60.0}, 6.0}, {{40.0, 65.0}, 4.0}};
    f.cam = overhead_camera({400.0, 400.0, 0.0, 320.0, 240.0}, 640, 480, {60.0, 45.0}, 200.0);
    f.rendered = render_arena(f.arena, f.cam, f.noise);
    f.labels = label_image(f.rendered.image, ClassifierParams{});
    return f;
  }();
  return fx;
}

void BM_render_arena(benchmark::State& state) {
  const ArenaFixture& fx = arena_fixture();
  for (auto _ : state) {
    RenderedArena r = render_arena(fx.arena, fx.cam, fx.noise);
    benchmark::DoNotOptimize(r.image.pixels.data());
  }
}
BENCHMARK(BM_render_arena);

void BM_label_image(benchmark::State& state) {
  const ArenaFixture& fx = arena_fixture();
  for (auto _ : state) {
    LabelMap m = label_image(fx.rendered.image, ClassifierParams{});
    benchmark::DoNotOptimize(m.labels.data());
  }
}
BENCHMARK(BM_label_image);

void BM_extract_blobs(benchmark::State& state) {
  const ArenaFixture& fx = arena_fixture();
  for (auto _ : state) {
    std::vector<Blob> blobs = extract_blobs(fx.labels, 20);
    benchmark::DoNotOptimize(blobs.data());
  }
}
BENCHMARK(BM_extract_blobs);

}  // namespace

BENCHMARK_MAIN();
