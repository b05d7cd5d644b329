#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace navcam {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3&) const = default;

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// 3x3 matrix, row-major.
struct Mat3 {
  std::array<double, 9> m{};

  static Mat3 identity() {
    Mat3 r;
    r.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    return r;
  }

  double& operator()(int r, int c) { return m[std::size_t(3 * r + c)]; }
  double operator()(int r, int c) const { return m[std::size_t(3 * r + c)]; }
  bool operator==(const Mat3&) const = default;

  Vec3 row(int r) const { return {(*this)(r, 0), (*this)(r, 1), (*this)(r, 2)}; }
  Vec3 col(int c) const { return {(*this)(0, c), (*this)(1, c), (*this)(2, c)}; }

  Mat3 operator*(const Mat3& o) const;
  Vec3 operator*(const Vec3& v) const {
    return {row(0).dot(v), row(1).dot(v), row(2).dot(v)};
  }
  Mat3 operator*(double s) const;
  Mat3 operator+(const Mat3& o) const;

  Mat3 transposed() const;
  double trace() const { return m[0] + m[4] + m[8]; }
  double det() const;
  double frobenius() const;

  // Inverse by adjugate. Throws GeometryError when the determinant is zero.
  Mat3 inverse() const;
};

// Dense dynamic matrix, row-major.
class MatX {
 public:
  MatX() = default;
  MatX(int rows, int cols) : rows_(rows), cols_(cols), d_(std::size_t(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int c) { return d_[std::size_t(r) * cols_ + c]; }
  double operator()(int r, int c) const { return d_[std::size_t(r) * cols_ + c]; }

  double* data() { return d_.data(); }
  const double* data() const { return d_.data(); }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> d_;
};

// Thin singular value decomposition A = U diag(sigma) V^T computed by
// one-sided Jacobi rotations. With k = min(rows, cols): u is rows x k,
// sigma has k entries in descending order, v is cols x k. Accurate to a few
// ulps; the reconstruction error is far below 1e-9 * ||A||_F.
struct SvdResult {
  MatX u;
  std::vector<double> sigma;
  MatX v;
};

SvdResult svd(const MatX& a);

// Unit-norm direction spanning the (approximate) null space of a, together
// with all cols(a) singular values in descending order. Rows are zero-padded
// up to cols(a) when needed so the full right basis exists. The returned
// vector has its first nonzero component positive.
struct NullSpace {
  std::vector<double> x;
  std::vector<double> sigma;
};

NullSpace null_space(const MatX& a);

// Right singular vector of the smallest singular value (see null_space).
std::vector<double> solve_homogeneous(const MatX& a);

// Minimum-norm least-squares solution of a x = b via the pseudo-inverse.
std::vector<double> solve_least_squares(const MatX& a, const std::vector<double>& b);

// Cholesky solve of a symmetric positive definite system. Returns false when
// a is not positive definite; x is untouched in that case.
bool solve_spd(const MatX& a, const std::vector<double>& b, std::vector<double>& x);

}  // namespace navcam
