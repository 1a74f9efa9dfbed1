#pragma once

#include <cstdint>
#include <random>

#include "safel2o/types.hpp"

namespace safel2o {

// Deterministic random source for data generation and tests.
//
// The integer stream is std::mt19937_64, whose output is pinned by the C++
// standard, and the real-valued transforms below are written out explicitly
// (53-bit uniforms, Box-Muller normals) instead of going through
// std::uniform_real_distribution / std::normal_distribution, whose algorithms
// are implementation-defined. The same seed therefore reproduces the same
// doubles on any conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; generates pairs and caches the spare.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

  Vector normal_vector(int n, double mean = 0.0, double stddev = 1.0);

  // Entries are N(mean, stddev^2) with probability density, else exactly zero.
  Vector sparse_normal_vector(int n, double density, double mean, double stddev);

  Matrix normal_matrix(int rows, int cols, double stddev = 1.0);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace safel2o
