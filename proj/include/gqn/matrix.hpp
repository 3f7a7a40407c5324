#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "gqn/rng.hpp"

namespace gqn {

// Dense row-major matrix of doubles. The only tensor type in this project;
// 24-node graphs keep everything small enough that dense storage wins.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

  void fill(double v) { data_.assign(data_.size(), v); }

  // Elementwise a += b; shape-checked.
  void add(const Matrix& other);
  void scale(double s);

  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Standard product; throws ShapeError naming both shapes on mismatch and
// NumericError if the result is not finite.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

// Throws NumericError mentioning `what` if any entry is NaN/Inf.
void require_finite(const Matrix& m, const char* what);

// Glorot/fan-balanced uniform init: entries in [-sqrt(6/(rows+cols)), +...].
// Deterministic for a given rng state.
Matrix xavier_init(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace gqn
