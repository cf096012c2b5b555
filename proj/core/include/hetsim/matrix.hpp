// Copyright 2026 The hetsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hetsim/error.hpp"

namespace hetsim {

/// Dense row-major matrix of doubles. All products run fixed-order loops so
/// results are bit-reproducible across runs on the same build.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
  size_t size() const { return a.size(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

Matrix matmul(const Matrix& x, const Matrix& y);             // x * y
Matrix matmul_transpose_a(const Matrix& x, const Matrix& y); // x^T * y
Matrix matmul_transpose_b(const Matrix& x, const Matrix& y); // x * y^T
void add_in_place(Matrix& x, const Matrix& y);
void scale_in_place(Matrix& x, double s);
Matrix hadamard(const Matrix& x, const Matrix& y);

/// Slice of full columns [part * cols/parts, ...) for column-parallel shards.
Matrix column_slice(const Matrix& m, int parts, int part);
/// Slice of full rows for row-parallel shards.
Matrix row_slice(const Matrix& m, int parts, int part);
/// Rows [begin, begin+count).
Matrix row_range(const Matrix& m, int begin, int count);

Matrix concat_columns(const std::vector<Matrix>& pieces);
Matrix concat_rows(const std::vector<Matrix>& pieces);

double max_abs_diff(const Matrix& x, const Matrix& y);

/// Deterministic standard-normal generator. Uses a fixed Box-Muller
/// transform over mt19937_64 so streams do not depend on the C++ library's
/// distribution implementation.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, const std::string& tag);
  double next();
  void fill(Matrix& m, double scale);

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
  double next_uniform();
};

}  // namespace hetsim
