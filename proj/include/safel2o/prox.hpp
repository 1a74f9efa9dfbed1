#pragma once

#include "safel2o/types.hpp"

namespace safel2o {

// Componentwise shrinkage sign(v) * max(|v| - threshold, 0), the proximal map
// of threshold * ||.||_1. Negative thresholds are invalid (ConfigError).
double soft_threshold(double v, double threshold);
Vector soft_threshold(const Vector& v, double threshold);
// Per-component thresholds; sizes must match.
Vector soft_threshold(const Vector& v, const Vector& thresholds);

// Euclidean projection onto the nonnegative orthant.
Vector project_nonneg(const Vector& v);

}  // namespace safel2o
