#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace navcam {

// Malformed input data. `where` is a 1-based line number for text formats
// and a byte offset for binary formats; which one applies is stated in the
// message.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t where)
      : std::runtime_error(msg), where_(where) {}

  std::size_t where() const noexcept { return where_; }

 private:
  std::size_t where_;
};

// Geometry the solvers cannot handle: too few views or points, degenerate
// configurations, singular mappings.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A required scene object is missing from the image.
class DetectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No admissible waypoint exists around a blocking obstacle.
class PlanningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace navcam
