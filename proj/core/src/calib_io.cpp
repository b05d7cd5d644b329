#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "navcam/calib.hpp"
#include "navcam/errors.hpp"

namespace navcam {

namespace {

// Nine significant digits: enough that write -> read -> write is byte-stable,
// short enough to stay readable.
std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string strip_comment(const std::string& line) {
  const std::size_t hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

[[noreturn]] void fail_line(const char* what, std::size_t lineno, const std::string& detail) {
  throw ParseError(std::string(what) + ": line " + std::to_string(lineno) + ": " + detail,
                   lineno);
}

}  // namespace

std::vector<PlanarCorrespondences> parse_correspondences(const std::string& text) {
  std::map<int, PlanarCorrespondences> by_id;
  std::istringstream lines(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(lines, raw)) {
    ++lineno;
    const std::string line = strip_comment(raw);
    if (blank(line)) continue;

    std::istringstream iss(line);
    long id;
    double x, y, u, v;
    if (!(iss >> id >> x >> y >> u >> v))
      fail_line("correspondences", lineno, "expected 'view_id X_cm Y_cm u_px v_px'");
    std::string extra;
    if (iss >> extra)
      fail_line("correspondences", lineno, "trailing data '" + extra + "'");

    PlanarCorrespondences& view = by_id[int(id)];
    view.view_id = int(id);
    view.model_cm.push_back({x, y});
    view.image_px.push_back({u, v});
  }
  if (by_id.empty())
    throw ParseError("correspondences: no data lines", lineno == 0 ? 1 : lineno);

  std::vector<PlanarCorrespondences> out;
  out.reserve(by_id.size());
  for (auto& [id, view] : by_id) out.push_back(std::move(view));
  return out;
}

std::string format_correspondences(const std::vector<PlanarCorrespondences>& views) {
  std::vector<const PlanarCorrespondences*> sorted;
  sorted.reserve(views.size());
  for (const PlanarCorrespondences& v : views) sorted.push_back(&v);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const PlanarCorrespondences* a, const PlanarCorrespondences* b) {
                     return a->view_id < b->view_id;
                   });
  std::string out;
  for (const PlanarCorrespondences* v : sorted) {
    for (std::size_t i = 0; i < v->model_cm.size(); ++i) {
      out += std::to_string(v->view_id);
      out += ' ';
      out += fmt9(v->model_cm[i].x);
      out += ' ';
      out += fmt9(v->model_cm[i].y);
      out += ' ';
      out += fmt9(v->image_px[i].x);
      out += ' ';
      out += fmt9(v->image_px[i].y);
      out += '\n';
    }
  }
  return out;
}

std::string format_calibration(const CalibrationResult& result) {
  std::vector<std::size_t> order(result.view_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.view_ids[a] < result.view_ids[b];
  });

  std::string out;
  out += "fx= " + fmt9(result.intrinsics.fx) + "\n";
  out += "fy= " + fmt9(result.intrinsics.fy) + "\n";
  out += "skew= " + fmt9(result.intrinsics.skew) + "\n";
  out += "cx= " + fmt9(result.intrinsics.cx) + "\n";
  out += "cy= " + fmt9(result.intrinsics.cy) + "\n";
  out += "rms= " + fmt9(result.rms_px) + "\n";
  for (std::size_t i : order) {
    const ExtrinsicPose& pose = result.poses[i];
    out += "view " + std::to_string(result.view_ids[i]) + " R";
    for (double v : pose.r.m) out += " " + fmt9(v);
    out += " t " + fmt9(pose.t.x) + " " + fmt9(pose.t.y) + " " + fmt9(pose.t.z) + "\n";
  }
  return out;
}

CalibrationResult parse_calibration(const std::string& text) {
  CalibrationResult result;
  bool seen[6] = {false, false, false, false, false, false};
  static const char* keys[6] = {"fx=", "fy=", "skew=", "cx=", "cy=", "rms="};

  std::istringstream lines(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(lines, raw)) {
    ++lineno;
    const std::string line = strip_comment(raw);
    if (blank(line)) continue;

    std::istringstream iss(line);
    std::string head;
    iss >> head;

    if (head == "view") {
      long id;
      std::string tag;
      ExtrinsicPose pose;
      if (!(iss >> id >> tag) || tag != "R")
        fail_line("calibration", lineno, "expected 'view <id> R ...'");
      for (double& v : pose.r.m)
        if (!(iss >> v)) fail_line("calibration", lineno, "expected 9 rotation values");
      if (!(iss >> tag) || tag != "t")
        fail_line("calibration", lineno, "expected 't' after rotation");
      if (!(iss >> pose.t.x >> pose.t.y >> pose.t.z))
        fail_line("calibration", lineno, "expected 3 translation values");
      std::string extra;
      if (iss >> extra) fail_line("calibration", lineno, "trailing data '" + extra + "'");
      result.view_ids.push_back(int(id));
      result.poses.push_back(pose);
      continue;
    }

    int key = -1;
    for (int i = 0; i < 6; ++i)
      if (head == keys[i]) key = i;
    if (key < 0) fail_line("calibration", lineno, "unknown directive '" + head + "'");
    if (seen[key]) fail_line("calibration", lineno, "duplicate '" + head + "'");
    double value;
    if (!(iss >> value)) fail_line("calibration", lineno, "expected a value after '" + head + "'");
    std::string extra;
    if (iss >> extra) fail_line("calibration", lineno, "trailing data '" + extra + "'");
    seen[key] = true;
    switch (key) {
      case 0: result.intrinsics.fx = value; break;
      case 1: result.intrinsics.fy = value; break;
      case 2: result.intrinsics.skew = value; break;
      case 3: result.intrinsics.cx = value; break;
      case 4: result.intrinsics.cy = value; break;
      case 5: result.rms_px = value; break;
    }
  }

  for (int i = 0; i < 6; ++i)
    if (!seen[i])
      throw ParseError(std::string("calibration: missing '") + keys[i] + "' line",
                       lineno == 0 ? 1 : lineno);
  return result;
}

}  // namespace navcam
