#include "gqn/matrix.hpp"

#include <cmath>
#include <string>

#include "gqn/errors.hpp"

namespace gqn {

namespace {
std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}
}  // namespace

Matrix Matrix::from(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != m.cols()) {
      throw ShapeError("Matrix::from: ragged rows");
    }
    std::size_t c = 0;
    for (double v : row) m.at(r, c++) = v;
    ++r;
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

void Matrix::add(const Matrix& other) {
  if (!same_shape(other)) {
    throw ShapeError("Matrix::add: shape mismatch, " + shape_str(*this) +
                     " += " + shape_str(other));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

void Matrix::scale(double s) {
  for (double& v : data_) v *= s;
}

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ, a is " + shape_str(a) +
                     ", b is " + shape_str(b));
  }
  Matrix out(a.rows(), b.cols());
  // ikj order: streams through b and out row-wise.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.data() + k * b.cols();
      double* orow = out.data() + i * out.cols();
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  require_finite(out, "matmul result");
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out.at(c, r) = m.at(r, c);
  }
  return out;
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.all_finite()) {
    throw NumericError(std::string(what) + ": non-finite value");
  }
}

Matrix xavier_init(std::size_t rows, std::size_t cols, Rng& rng) {
  if (rows < 1 || cols < 1) {
    throw ShapeError("xavier_init: rows and cols must be >= 1");
  }
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = rng.uniform(-bound, bound);
  return m;
}

}  // namespace gqn
