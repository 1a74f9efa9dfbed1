#include "safel2o/prox.hpp"

#include <cmath>

#include "safel2o/errors.hpp"

namespace safel2o {

double soft_threshold(double v, double threshold) {
  if (threshold < 0.0) throw ConfigError("soft_threshold: negative threshold");
  if (v > threshold) return v - threshold;
  if (v < -threshold) return v + threshold;
  return 0.0;
}

Vector soft_threshold(const Vector& v, double threshold) {
  if (threshold < 0.0) throw ConfigError("soft_threshold: negative threshold");
  Vector out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = soft_threshold(v[i], threshold);
  return out;
}

Vector soft_threshold(const Vector& v, const Vector& thresholds) {
  if (v.size() != thresholds.size())
    throw ConfigError("soft_threshold: size mismatch between input and thresholds");
  Vector out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = soft_threshold(v[i], thresholds[i]);
  return out;
}

Vector project_nonneg(const Vector& v) { return v.cwiseMax(0.0); }

}  // namespace safel2o
