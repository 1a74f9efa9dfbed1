#pragma once

#include <string>
#include <vector>

#include "safel2o/problems.hpp"
#include "safel2o/safeguards.hpp"
#include "safel2o/schemes.hpp"
#include "safel2o/types.hpp"

namespace safel2o {

// km: plain fixed-point iteration with the canonical fallback operator.
// l2o: unsafeguarded learned updates (at most the scheme depth of them).
// safe: safeguarded learned updates with fallback extension.
enum class RunMode { Km, L2O, Safe };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

struct BenchOptions {
  RunMode mode = RunMode::Safe;
  SafeguardConfig safeguard{};  // consulted in safe mode only
  int total_iters = 100;
  double tol = 1e-10;
  int threads = 0;  // 0 = hardware concurrency
};

// One aggregated row per iterate index k (k = 1 is the start point; runs
// that stop early keep contributing their final values). rel_error is the
// batch relative objective gap; fallback_frequency is the fraction of
// instances whose iterate k came from the fallback operator (forced to 1
// for km and 0 for l2o by convention); extension marks rows past the
// learned depth of a safe run.
struct BenchRow {
  int k = 0;
  double rel_error = 0.0;
  double fallback_frequency = 0.0;
  double mean_residual = 0.0;
  double mean_mu = 0.0;
  int extension = 0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  int instances = 0;
  int depth = 0;  // scheme depth, 0 in km mode
};

// Minimizers for a batch of instances, via long canonical-fallback runs.
// When cache_path is nonempty the solutions are read from / written to that
// file; a cache whose dataset hash, count or size disagrees is recomputed
// and overwritten.
std::vector<Vector> load_or_solve_references(const std::vector<ProblemInstance>& split,
                                             const std::string& cache_path,
                                             const std::string& dataset_hash, int threads = 0);

// Runs every instance of the split from the zero start and aggregates the
// traces per iterate index. `params` drives the learned update and may be
// null in km mode; `reference_points` are the per-instance minimizers in
// split order.
BenchResult run_bench(const std::vector<ProblemInstance>& split, const SchemeParams* params,
                      const std::vector<Vector>& reference_points, const BenchOptions& opt);

}  // namespace safel2o
