#include "navcam/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "navcam/errors.hpp"

namespace navcam {

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
      r(i, j) = s;
    }
  return r;
}

Mat3 Mat3::operator*(double s) const {
  Mat3 r = *this;
  for (double& v : r.m) v *= s;
  return r;
}

Mat3 Mat3::operator+(const Mat3& o) const {
  Mat3 r = *this;
  for (int i = 0; i < 9; ++i) r.m[std::size_t(i)] += o.m[std::size_t(i)];
  return r;
}

Mat3 Mat3::transposed() const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
  return r;
}

double Mat3::det() const {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

double Mat3::frobenius() const {
  double s = 0.0;
  for (double v : m) s += v * v;
  return std::sqrt(s);
}

Mat3 Mat3::inverse() const {
  const double d = det();
  if (d == 0.0) throw GeometryError("singular 3x3 matrix has no inverse");
  Mat3 r;
  r(0, 0) = (m[4] * m[8] - m[5] * m[7]) / d;
  r(0, 1) = (m[2] * m[7] - m[1] * m[8]) / d;
  r(0, 2) = (m[1] * m[5] - m[2] * m[4]) / d;
  r(1, 0) = (m[5] * m[6] - m[3] * m[8]) / d;
  r(1, 1) = (m[0] * m[8] - m[2] * m[6]) / d;
  r(1, 2) = (m[2] * m[3] - m[0] * m[5]) / d;
  r(2, 0) = (m[3] * m[7] - m[4] * m[6]) / d;
  r(2, 1) = (m[1] * m[6] - m[0] * m[7]) / d;
  r(2, 2) = (m[0] * m[4] - m[1] * m[3]) / d;
  return r;
}

namespace {

void check_finite(const MatX& a) {
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c)
      if (!std::isfinite(a(r, c)))
        throw std::invalid_argument("matrix has non-finite entries");
}

// One-sided Jacobi on a with rows >= cols. Orthogonalizes the columns of a
// working copy; the rotations accumulate into v.
SvdResult jacobi_svd_tall(const MatX& a) {
  const int m = a.rows();
  const int n = a.cols();
  MatX u = a;
  MatX v(n, n);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  const double eps = 1e-15;
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int r = 0; r < m; ++r) {
          app += u(r, p) * u(r, p);
          aqq += u(r, q) * u(r, q);
          apq += u(r, p) * u(r, q);
        }
        if (std::abs(apq) <= eps * std::sqrt(app * aqq)) continue;
        rotated = true;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int r = 0; r < m; ++r) {
          const double up = u(r, p), uq = u(r, q);
          u(r, p) = c * up - s * uq;
          u(r, q) = s * up + c * uq;
        }
        for (int r = 0; r < n; ++r) {
          const double vp = v(r, p), vq = v(r, q);
          v(r, p) = c * vp - s * vq;
          v(r, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(std::size_t(n), 0.0);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int r = 0; r < m; ++r) s += u(r, j) * u(r, j);
    s = std::sqrt(s);
    sigma[std::size_t(j)] = s;
    if (s > 0.0)
      for (int r = 0; r < m; ++r) u(r, j) /= s;
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return sigma[std::size_t(i)] > sigma[std::size_t(j)];
  });

  SvdResult out;
  out.u = MatX(m, n);
  out.v = MatX(n, n);
  out.sigma.resize(std::size_t(n));
  for (int j = 0; j < n; ++j) {
    const int src = order[std::size_t(j)];
    out.sigma[std::size_t(j)] = sigma[std::size_t(src)];
    for (int r = 0; r < m; ++r) out.u(r, j) = u(r, src);
    for (int r = 0; r < n; ++r) out.v(r, j) = v(r, src);
  }
  return out;
}

MatX transposed(const MatX& a) {
  MatX t(a.cols(), a.rows());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
  return t;
}

}  // namespace

SvdResult svd(const MatX& a) {
  if (a.rows() <= 0 || a.cols() <= 0)
    throw std::invalid_argument("svd of an empty matrix");
  check_finite(a);
  if (a.rows() >= a.cols()) return jacobi_svd_tall(a);
  SvdResult t = jacobi_svd_tall(transposed(a));
  return {t.v, std::move(t.sigma), t.u};
}

NullSpace null_space(const MatX& a) {
  if (a.rows() <= 0 || a.cols() <= 0)
    throw std::invalid_argument("null space of an empty matrix");
  check_finite(a);
  const int n = a.cols();
  MatX padded = a;
  if (a.rows() < n) {
    // Zero rows change nothing about A^T A but make the right basis square.
    padded = MatX(n, n);
    for (int r = 0; r < a.rows(); ++r)
      for (int c = 0; c < n; ++c) padded(r, c) = a(r, c);
  }
  SvdResult s = jacobi_svd_tall(padded);

  NullSpace out;
  out.sigma = std::move(s.sigma);
  out.x.resize(std::size_t(n));
  for (int r = 0; r < n; ++r) out.x[std::size_t(r)] = s.v(r, n - 1);
  for (double c : out.x) {
    if (c != 0.0) {
      if (c < 0.0)
        for (double& y : out.x) y = -y;
      break;
    }
  }
  return out;
}

std::vector<double> solve_homogeneous(const MatX& a) { return null_space(a).x; }

std::vector<double> solve_least_squares(const MatX& a, const std::vector<double>& b) {
  if (b.size() != std::size_t(a.rows()))
    throw std::invalid_argument("solve_least_squares: size mismatch");
  SvdResult s = svd(a);
  const int k = int(s.sigma.size());
  const double tol = 1e-12 * (k > 0 ? s.sigma[0] : 0.0);
  std::vector<double> utb(std::size_t(k), 0.0);
  for (int j = 0; j < k; ++j) {
    double acc = 0.0;
    for (int r = 0; r < a.rows(); ++r) acc += s.u(r, j) * b[std::size_t(r)];
    utb[std::size_t(j)] = s.sigma[std::size_t(j)] > tol ? acc / s.sigma[std::size_t(j)] : 0.0;
  }
  std::vector<double> x(std::size_t(a.cols()), 0.0);
  for (int r = 0; r < a.cols(); ++r) {
    double acc = 0.0;
    for (int j = 0; j < k; ++j) acc += s.v(r, j) * utb[std::size_t(j)];
    x[std::size_t(r)] = acc;
  }
  return x;
}

bool solve_spd(const MatX& a, const std::vector<double>& b, std::vector<double>& x) {
  const int n = a.rows();
  if (a.cols() != n || b.size() != std::size_t(n))
    throw std::invalid_argument("solve_spd: size mismatch");
  MatX l(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0 || !std::isfinite(s)) return false;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  std::vector<double> y(std::size_t(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = b[std::size_t(i)];
    for (int k = 0; k < i; ++k) s -= l(i, k) * y[std::size_t(k)];
    y[std::size_t(i)] = s / l(i, i);
  }
  x.assign(std::size_t(n), 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = y[std::size_t(i)];
    for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[std::size_t(k)];
    x[std::size_t(i)] = s / l(i, i);
  }
  return true;
}

}  // namespace navcam
