#include "safel2o/rng.hpp"

#include <cmath>

namespace safel2o {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller on (0,1] x [0,1) so the log argument is never zero.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Vector Rng::normal_vector(int n, double mean, double stddev) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(mean, stddev);
  return v;
}

Vector Rng::sparse_normal_vector(int n, double density, double mean, double stddev) {
  Vector v = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    // Draw in a fixed order (mask first, then value) so the stream is stable.
    bool active = bernoulli(density);
    if (active) v[i] = normal(mean, stddev);
  }
  return v;
}

Matrix Rng::normal_matrix(int rows, int cols, double stddev) {
  Matrix a(rows, cols);
  // Row-major fill order, matching the on-disk layout of generated matrices.
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = stddev * normal();
  return a;
}

}  // namespace safel2o
