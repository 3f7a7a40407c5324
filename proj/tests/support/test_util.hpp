#pragma once

#include <cmath>
#include <cstddef>

#include "gqn/matrix.hpp"
#include "gqn/rng.hpp"

namespace gqn::testutil {

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                            double lo = -2.0, double hi = 2.0) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = rng.uniform(lo, hi);
  return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > worst) worst = d;
  }
  return worst;
}

// Relative error with a floor, the same convention the gradient checker
// pins: an absolute comparison below the floor, relative above it.
inline double rel_error(double analytic, double numeric) {
  const double denom =
      std::max({1e-4, std::fabs(analytic), std::fabs(numeric)});
  return std::fabs(analytic - numeric) / denom;
}

}  // namespace gqn::testutil
