#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fscil/errors.hpp"

namespace fscil {

using Vec = std::vector<double>;

// dense row-major matrix
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

inline void check_dims(std::size_t a, std::size_t b, const char* where) {
  if (a != b) raise(ErrorCode::DimMismatch, where);
}

inline double dot(const Vec& a, const Vec& b) {
  check_dims(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec l2_normalize(const Vec& a) {
  double n = norm(a);
  if (n == 0.0) raise(ErrorCode::ZeroVector, "l2_normalize: zero vector");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / n;
  return out;
}

// y += a * x
inline void axpy(double a, const Vec& x, Vec& y) {
  check_dims(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline Vec scaled(const Vec& x, double a) {
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i];
  return out;
}

inline Vec vsub(const Vec& a, const Vec& b) {
  check_dims(a.size(), b.size(), "vsub");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Vec vadd(const Vec& a, const Vec& b) {
  check_dims(a.size(), b.size(), "vadd");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

// y = M x
inline Vec matvec(const Mat& m, const Vec& x) {
  check_dims(static_cast<std::size_t>(m.cols), x.size(), "matvec");
  Vec y(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    const double* row = m.data.data() + static_cast<std::size_t>(i) * m.cols;
    for (int j = 0; j < m.cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

// y = M^T x
inline Vec matvec_t(const Mat& m, const Vec& x) {
  check_dims(static_cast<std::size_t>(m.rows), x.size(), "matvec_t");
  Vec y(m.cols, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    const double* row = m.data.data() + static_cast<std::size_t>(i) * m.cols;
    for (int j = 0; j < m.cols; ++j) y[j] += row[j] * x[i];
  }
  return y;
}

// M += a * u v^T
inline void add_outer(Mat& m, double a, const Vec& u, const Vec& v) {
  check_dims(static_cast<std::size_t>(m.rows), u.size(), "add_outer rows");
  check_dims(static_cast<std::size_t>(m.cols), v.size(), "add_outer cols");
  for (int i = 0; i < m.rows; ++i) {
    double* row = m.data.data() + static_cast<std::size_t>(i) * m.cols;
    for (int j = 0; j < m.cols; ++j) row[j] += a * u[i] * v[j];
  }
}

// numerically stable softmax
inline Vec softmax(const Vec& z) {
  double zmax = z[0];
  for (double v : z) zmax = std::max(zmax, v);
  Vec p(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - zmax);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

inline double mean(const Vec& a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s / static_cast<double>(a.size());
}

}  // namespace fscil
