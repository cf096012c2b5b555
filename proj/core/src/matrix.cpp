// Copyright 2026 The hetsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetsim/matrix.hpp"

#include <cmath>

namespace hetsim {

namespace {
void require(bool ok, const char* what) {
  if (!ok) raise(ErrorCode::ShapeMismatch, what);
}
}  // namespace

Matrix matmul(const Matrix& x, const Matrix& y) {
  require(x.cols == y.rows, "matmul inner dimensions differ");
  Matrix out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const double v = x.at(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) out.at(i, j) += v * y.at(k, j);
    }
  return out;
}

Matrix matmul_transpose_a(const Matrix& x, const Matrix& y) {
  require(x.rows == y.rows, "matmul_transpose_a row counts differ");
  Matrix out(x.cols, y.cols);
  for (int k = 0; k < x.rows; ++k)
    for (int i = 0; i < x.cols; ++i) {
      const double v = x.at(k, i);
      if (v == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) out.at(i, j) += v * y.at(k, j);
    }
  return out;
}

Matrix matmul_transpose_b(const Matrix& x, const Matrix& y) {
  require(x.cols == y.cols, "matmul_transpose_b column counts differ");
  Matrix out(x.rows, y.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < y.rows; ++j) {
      double acc = 0.0;
      for (int k = 0; k < x.cols; ++k) acc += x.at(i, k) * y.at(j, k);
      out.at(i, j) = acc;
    }
  return out;
}

void add_in_place(Matrix& x, const Matrix& y) {
  require(x.same_shape(y), "add_in_place shapes differ");
  for (size_t i = 0; i < x.a.size(); ++i) x.a[i] += y.a[i];
}

void scale_in_place(Matrix& x, double s) {
  for (double& v : x.a) v *= s;
}

Matrix hadamard(const Matrix& x, const Matrix& y) {
  require(x.same_shape(y), "hadamard shapes differ");
  Matrix out(x.rows, x.cols);
  for (size_t i = 0; i < x.a.size(); ++i) out.a[i] = x.a[i] * y.a[i];
  return out;
}

Matrix column_slice(const Matrix& m, int parts, int part) {
  if (parts < 1 || part < 0 || part >= parts || m.cols % parts != 0)
    raise(ErrorCode::DivisibilityViolation, "column_slice parts do not divide cols");
  const int w = m.cols / parts;
  Matrix out(m.rows, w);
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < w; ++c) out.at(r, c) = m.at(r, part * w + c);
  return out;
}

Matrix row_slice(const Matrix& m, int parts, int part) {
  if (parts < 1 || part < 0 || part >= parts || m.rows % parts != 0)
    raise(ErrorCode::DivisibilityViolation, "row_slice parts do not divide rows");
  const int h = m.rows / parts;
  return row_range(m, part * h, h);
}

Matrix row_range(const Matrix& m, int begin, int count) {
  if (begin < 0 || count < 0 || begin + count > m.rows)
    raise(ErrorCode::ShapeMismatch, "row_range out of bounds");
  Matrix out(count, m.cols);
  for (int r = 0; r < count; ++r)
    for (int c = 0; c < m.cols; ++c) out.at(r, c) = m.at(begin + r, c);
  return out;
}

Matrix concat_columns(const std::vector<Matrix>& pieces) {
  require(!pieces.empty(), "concat_columns on empty list");
  int cols = 0;
  for (const auto& p : pieces) {
    require(p.rows == pieces[0].rows, "concat_columns row counts differ");
    cols += p.cols;
  }
  Matrix out(pieces[0].rows, cols);
  int off = 0;
  for (const auto& p : pieces) {
    for (int r = 0; r < p.rows; ++r)
      for (int c = 0; c < p.cols; ++c) out.at(r, off + c) = p.at(r, c);
    off += p.cols;
  }
  return out;
}

Matrix concat_rows(const std::vector<Matrix>& pieces) {
  require(!pieces.empty(), "concat_rows on empty list");
  int rows = 0;
  for (const auto& p : pieces) {
    require(p.cols == pieces[0].cols, "concat_rows column counts differ");
    rows += p.rows;
  }
  Matrix out(rows, pieces[0].cols);
  int off = 0;
  for (const auto& p : pieces) {
    for (int r = 0; r < p.rows; ++r)
      for (int c = 0; c < p.cols; ++c) out.at(off + r, c) = p.at(r, c);
    off += p.rows;
  }
  return out;
}

double max_abs_diff(const Matrix& x, const Matrix& y) {
  require(x.same_shape(y), "max_abs_diff shapes differ");
  double worst = 0.0;
  for (size_t i = 0; i < x.a.size(); ++i)
    worst = std::max(worst, std::abs(x.a[i] - y.a[i]));
  return worst;
}

namespace {
std::uint64_t fnv1a(std::uint64_t seed, const std::string& tag) {
  std::uint64_t h = 1469598103934665603ull ^ seed;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  // splitmix finalizer to spread low-entropy tags
  h += 0x9e3779b97f4a7c15ull;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
  return h ^ (h >> 31);
}
}  // namespace

GaussianStream::GaussianStream(std::uint64_t seed, const std::string& tag)
    : state_(fnv1a(seed, tag)) {}

double GaussianStream::next_uniform() {
  // splitmix64; uniform in (0, 1]
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z = z ^ (z >> 31);
  return (static_cast<double>(z >> 11) + 1.0) * (1.0 / 9007199254740992.0);
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

void GaussianStream::fill(Matrix& m, double scale) {
  for (double& v : m.a) v = next() * scale;
}

}  // namespace hetsim
