// Contract tests for the navcam binary: spawn argv[1] with crafted inputs
// and check exit codes, written files, and stdout against the documented
// behaviour. Inputs are generated with the library so the expected numbers
// are exact.
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "navcam/calib.hpp"
#include "navcam/image.hpp"
#include "navcam/rng.hpp"
#include "navcam/sim_config.hpp"
#include "navcam/synth.hpp"

namespace {

using namespace navcam;

int g_checks = 0;
int g_failures = 0;
std::string g_cli;
std::string g_tmp;

void check(bool ok, const std::string& what) {
  ++g_checks;
  if (!ok) {
    ++g_failures;
    std::printf("FAIL %s\n", what.c_str());
  }
}

std::string path_in_tmp(const std::string& name) { return g_tmp + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  const std::string err_path = path_in_tmp("stderr.txt");
  const std::string cmd = g_cli + " " + args + " 2>" + err_path;
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
  r.err = slurp(err_path);
  return r;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

// First DIST_CM figure in the report (the robot-to-target line), or -1.
double dist_cm_of(const std::string& report) {
  const std::size_t pos = report.find("DIST_CM ");
  return pos == std::string::npos ? -1.0 : std::stod(report.substr(pos + 8));
}

// --- input builders ----------------------------------------------------------

std::string make_correspondences(int n_views, double noise_px) {
  BoardSpec board;
  CameraSpec cam;
  cam.intrinsics = {800.0, 780.0, 0.5, 320.0, 240.0};
  const std::vector<ExtrinsicPose> poses = sample_board_poses(board, cam, n_views, 4242);
  Rng rng(99);
  std::vector<PlanarCorrespondences> views;
  for (std::size_t i = 0; i < poses.size(); ++i)
    views.push_back(
        render_checkerboard_corners(board, cam, poses[i], noise_px, rng, int(i)));
  return format_correspondences(views);
}

CameraSpec overhead_default() {
  return overhead_camera({400.0, 400.0, 0.0, 320.0, 240.0}, 640, 480, {60.0, 45.0}, 200.0);
}

void write_frame(const ArenaSpec& arena, const std::string& path) {
  write_ppm_file(render_arena(arena, overhead_default(), {}).image, path);
}

std::string straight_config(double color_sigma, double turn_sigma, double step_sigma,
                            std::uint64_t seed) {
  SimConfig cfg;
  cfg.arena.robot = {{30.0, 45.0}, 6.0};
  // Goal marker with more than twice the robot's area: the robot is painted
  // over it on arrival, and a smaller marker's perceived centroid would
  // retreat faster than the robot advances.
  cfg.arena.target = {{80.0, 45.0}, 12.0};
  cfg.camera = overhead_default();
  cfg.render_noise.color_sigma = color_sigma;
  cfg.actuation = {turn_sigma, step_sigma};
  cfg.seed = seed;
  return format_sim_config(cfg);
}

// Ring that exhausts every detour candidate: flanking disks inflated by the
// default clearance cover both candidate ladders of the center blocker.
std::string ring_config() {
  SimConfig cfg;
  cfg.arena.robot = {{20.0, 45.0}, 6.0};
  cfg.arena.target = {{100.0, 45.0}, 12.0};
  cfg.arena.obstacles = {{{60.0, 45.0}, 4.0}, {{60.0, 21.0}, 12.0}, {{60.0, 69.0}, 12.0}};
  cfg.camera = overhead_default();
  cfg.seed = 5;
  return format_sim_config(cfg);
}

// --- test groups -------------------------------------------------------------

void test_usage() {
  check(run_cli("").code == 1, "no arguments exits 1");
  check(run_cli("--help").code == 0, "--help exits 0");
  check(run_cli("frobnicate").code == 1, "unknown subcommand exits 1");
}

void test_calibrate() {
  const std::string corr = path_in_tmp("corr.txt");
  const std::string out = path_in_tmp("calib.txt");
  spit(corr, make_correspondences(6, 0.0));

  RunResult r = run_cli("calibrate " + corr + " " + out);
  check(r.code == 0, "calibrate exits 0 on clean input");
  check(r.out.rfind("rms= ", 0) == 0, "calibrate prints 'rms= ' to stdout");
  check(std::stod(r.out.substr(5)) < 1e-6, "noiseless rms below 1e-6, got " + r.out);

  const CalibrationResult parsed = parse_calibration(slurp(out));
  check(std::fabs(parsed.intrinsics.fx - 800.0) < 1e-3, "recovered fx near 800");
  check(parsed.view_ids.size() == 6, "calibration file carries all 6 views");

  const std::string out2 = path_in_tmp("calib2.txt");
  run_cli("calibrate " + corr + " " + out2);
  check(slurp(out) == slurp(out2), "calibrate output byte-stable across runs");

  const std::string two = path_in_tmp("two_views.txt");
  spit(two, make_correspondences(2, 0.0));
  r = run_cli("calibrate " + two + " " + out);
  check(r.code == 2, "two views exit 2");
  check(contains(r.err, "view"), "two-view error names the shortage: " + r.err);

  const std::string bad = path_in_tmp("bad_corr.txt");
  spit(bad, "0 0 0 100 100\nnot numbers at all\n");
  r = run_cli("calibrate " + bad + " " + out);
  check(r.code == 1, "malformed correspondence file exits 1");
  check(contains(r.err, "line 2"), "parse error names line 2: " + r.err);

  r = run_cli("calibrate " + path_in_tmp("absent.txt") + " " + out);
  check(r.code == 1, "missing input file exits 1");
}

void test_analyze() {
  ArenaSpec arena;  // defaults: robot (30,45) r6, target (90,45) r5
  arena.obstacles = {{{60.0, 25.0}, 5.5}};
  const std::string frame = path_in_tmp("frame.ppm");
  write_frame(arena, frame);

  // Pixel-only mode.
  const std::string prefix = path_in_tmp("an");
  RunResult r = run_cli("analyze " + frame + " " + prefix);
  check(r.code == 0, "analyze exits 0");
  const std::string report = slurp(prefix + "_report.txt");
  check(r.out == report, "stdout mirrors the report file");
  check(contains(report, "DIST_PX"), "report carries pixel distances");
  check(!contains(report, "DIST_CM"), "no cm figures without calibration");
  check(contains(report, "OBST 1 "), "obstacle row present");
  check(contains(report, "CMD "), "advisory command appended");
  check(slurp(prefix + "_labels.ppm").rfind("P6", 0) == 0, "labels written as P6 by default");

  // Calibrated mode: view 0 maps the floor at 4 px/cm, view 3 is the real
  // overhead rig at 2 px/cm. Default floor view is the lowest id.
  CalibrationResult calib;
  calib.intrinsics = {400.0, 400.0, 0.0, 320.0, 240.0};
  calib.view_ids = {0, 3};
  calib.poses = {{Mat3::identity(), {0.0, 0.0, 100.0}},
                 {Mat3::identity(), {-60.0, -45.0, 200.0}}};
  const std::string calib_path = path_in_tmp("ground.txt");
  spit(calib_path, format_calibration(calib));

  // Centroids sit within a hundredth of a pixel of the projected centers
  // (boundary lattice pixels can flip on FP noise), so the cm figures land
  // within a few hundredths of the exact 30 / 60.
  r = run_cli("analyze " + frame + " " + prefix + " --calib " + calib_path);
  check(r.code == 0, "calibrated analyze exits 0");
  check(std::fabs(dist_cm_of(r.out) - 30.0) < 0.1,
        "default floor view is the lowest id (4 px/cm)");

  r = run_cli("analyze " + frame + " " + prefix + " --calib " + calib_path + " --floor-view 3");
  check(r.code == 0, "explicit floor view accepted");
  check(std::fabs(dist_cm_of(r.out) - 60.0) < 0.2, "view 3 measures the true 60 cm");
  check(contains(r.out, "CMD FORWARD 10.000"), "clear straight path commands a full step");

  r = run_cli("analyze " + frame + " " + prefix + " --calib " + calib_path + " --floor-view 9");
  check(r.code == 1, "unknown floor view exits 1");

  // Detection failure: the robot painted in the background color vanishes.
  ArenaSpec hidden = arena;
  hidden.robot_color = hidden.background;
  const std::string ghost = path_in_tmp("ghost.ppm");
  write_frame(hidden, ghost);
  r = run_cli("analyze " + ghost + " " + path_in_tmp("gh"));
  check(r.code == 3, "missing robot exits 3");
  check(contains(r.out, "ROBOT MISSING"), "MISSING marker printed");
  check(contains(r.out, "TARGET 380.000 240.000"), "found objects keep their positions");
  check(!contains(r.out, "CMD "), "no command without a robot");
  check(r.out == slurp(path_in_tmp("gh") + "_report.txt"), "failure report still written");
  check(slurp(path_in_tmp("gh") + "_labels.ppm").rfind("P6", 0) == 0,
        "labels still written on failure");

  // Flag plumbing.
  r = run_cli("analyze " + frame + " " + path_in_tmp("mv") + " --min-value 250");
  check(r.code == 3, "--min-value 250 blanks the scene (exit 3)");
  r = run_cli("analyze " + frame + " " + path_in_tmp("mb") + " --min-blob-area 100000");
  check(r.code == 3, "--min-blob-area beyond every blob (exit 3)");
  r = run_cli("analyze " + frame + " " + path_in_tmp("p3") + " --format p3");
  check(r.code == 0 && slurp(path_in_tmp("p3") + "_labels.ppm").rfind("P3", 0) == 0,
        "--format p3 switches the labels encoding");
  r = run_cli("analyze " + frame + " " + prefix + " --format p9");
  check(r.code == 1, "bad --format value exits 1");

  const std::string junk = path_in_tmp("junk.ppm");
  spit(junk, "P9 nonsense");
  check(run_cli("analyze " + junk + " " + prefix).code == 1, "malformed image exits 1");
}

void test_simulate() {
  const std::string cfg_path = path_in_tmp("straight.cfg");
  spit(cfg_path, straight_config(0.0, 0.0, 0.0, 11));

  RunResult r = run_cli("simulate " + cfg_path + " " + path_in_tmp("s1"));
  check(r.code == 0, "straight run reaches the goal (exit 0)");
  const std::string traj = slurp(path_in_tmp("s1") + "_trajectory.txt");
  check(traj.size() > 12 && traj.substr(traj.size() - 12) == "RESULT GOAL\n",
        "trajectory ends with RESULT GOAL");
  check(contains(traj, "CMD FORWARD 10.000"), "full-length steps logged");
  check(contains(traj, "CMD STOP"), "STOP logged");
  check(slurp(path_in_tmp("s1") + "_final.ppm").rfind("P6", 0) == 0, "final frame written");

  // Determinism under render and actuation noise.
  const std::string noisy = path_in_tmp("noisy.cfg");
  spit(noisy, straight_config(6.0, 0.4, 0.3, 2026));
  check(run_cli("simulate " + noisy + " " + path_in_tmp("n1")).code == 0,
        "noisy run still reaches the goal");
  run_cli("simulate " + noisy + " " + path_in_tmp("n2"));
  check(slurp(path_in_tmp("n1") + "_trajectory.txt") ==
            slurp(path_in_tmp("n2") + "_trajectory.txt"),
        "seeded trajectories byte-identical");
  check(slurp(path_in_tmp("n1") + "_final.ppm") == slurp(path_in_tmp("n2") + "_final.ppm"),
        "seeded final frames byte-identical");
  run_cli("simulate " + noisy + " " + path_in_tmp("n3") + " --seed 2027");
  check(slurp(path_in_tmp("n1") + "_final.ppm") != slurp(path_in_tmp("n3") + "_final.ppm"),
        "--seed override changes the noise stream");

  // Collision: a small obstacle dead ahead with clearance too thin for the
  // robot's own radius. The run finishes but the latched flag wins.
  SimConfig graze;
  graze.arena.robot = {{20.0, 45.0}, 6.0};
  graze.arena.target = {{100.0, 45.0}, 12.0};
  graze.arena.obstacles = {{{55.0, 45.0}, 2.5}};
  graze.camera = overhead_default();
  graze.planner.clearance = 0.1;
  graze.seed = 3;
  const std::string graze_path = path_in_tmp("graze.cfg");
  spit(graze_path, format_sim_config(graze));
  r = run_cli("simulate " + graze_path + " " + path_in_tmp("gr"));
  check(r.code == 5, "collision exits 5");
  check(contains(slurp(path_in_tmp("gr") + "_trajectory.txt"), "RESULT COLLISION"),
        "collision overrides the result line");
  check(contains(r.err, "warning"), "tolerance >= clearance warns on stderr");

  // Boxed in: every candidate waypoint is covered.
  const std::string ring_path = path_in_tmp("ring.cfg");
  spit(ring_path, ring_config());
  r = run_cli("simulate " + ring_path + " " + path_in_tmp("ring"));
  check(r.code == 4, "boxed-in run exits 4");
  const std::string ring_traj = slurp(path_in_tmp("ring") + "_trajectory.txt");
  check(contains(ring_traj, "PLANNER NO_WAYPOINT"), "NO_WAYPOINT note logged");
  check(contains(ring_traj, "RESULT NO_WAYPOINT"), "NO_WAYPOINT result logged");
  // Shrinking the clearance opens a corridor that is still narrower than the
  // robot: the planner proceeds and the collision flag takes over.
  r = run_cli("simulate " + ring_path + " " + path_in_tmp("ring2") + " --clearance 0.5");
  check(r.code == 5, "--clearance override reaches the planner");

  // Step limit.
  SimConfig slow;
  slow.arena.robot = {{20.0, 45.0}, 6.0};
  slow.arena.target = {{100.0, 45.0}, 12.0};
  slow.camera = overhead_default();
  slow.max_steps = 3;
  const std::string slow_path = path_in_tmp("slow.cfg");
  spit(slow_path, format_sim_config(slow));
  r = run_cli("simulate " + slow_path + " " + path_in_tmp("sl"));
  check(r.code == 4, "step limit exits 4");
  check(contains(slurp(path_in_tmp("sl") + "_trajectory.txt"), "RESULT STEP_LIMIT"),
        "step limit logged");

  // Detection failure inside the loop.
  SimConfig blind;
  blind.arena.robot = {{30.0, 45.0}, 6.0};
  blind.arena.target = {{80.0, 45.0}, 12.0};
  blind.arena.target_color = blind.arena.background;
  blind.camera = overhead_default();
  const std::string blind_path = path_in_tmp("blind.cfg");
  spit(blind_path, format_sim_config(blind));
  r = run_cli("simulate " + blind_path + " " + path_in_tmp("bl"));
  check(r.code == 3, "invisible target exits 3");
  const std::string blind_traj = slurp(path_in_tmp("bl") + "_trajectory.txt");
  check(contains(blind_traj, "TARGET MISSING"), "MISSING note logged");
  check(contains(blind_traj, "RESULT DETECTION_FAILURE"), "failure result logged");

  // Config rejections.
  const std::string bad_cfg = path_in_tmp("bad.cfg");
  spit(bad_cfg, "[arena]\nrobot = 30 45\n");
  r = run_cli("simulate " + bad_cfg + " " + path_in_tmp("bc"));
  check(r.code == 1, "malformed config exits 1");
  check(contains(r.err, "line 2"), "config error names line 2: " + r.err);

  SimConfig overlap;
  overlap.arena.robot = {{30.0, 45.0}, 6.0};
  overlap.arena.obstacles = {{{33.0, 45.0}, 5.0}};
  overlap.camera = overhead_default();
  const std::string overlap_path = path_in_tmp("overlap.cfg");
  spit(overlap_path, format_sim_config(overlap));
  check(run_cli("simulate " + overlap_path + " " + path_in_tmp("ov")).code == 1,
        "overlapping spawn arena exits 1");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <navcam-binary>\n", argv[0]);
    return 2;
  }
  g_cli = argv[1];
  g_tmp = "/tmp/navcam_cli_test_" + std::to_string(getpid());
  std::filesystem::create_directories(g_tmp);

  test_usage();
  test_calibrate();
  test_analyze();
  test_simulate();

  std::printf("cli contract: %d checks, %d failures\n", g_checks, g_failures);
  if (g_failures == 0) std::filesystem::remove_all(g_tmp);
  return g_failures == 0 ? 0 : 1;
}
