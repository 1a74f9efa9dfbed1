#pragma once

#include <functional>
#include <vector>

#include "safel2o/operators.hpp"
#include "safel2o/safeguards.hpp"
#include "safel2o/types.hpp"

namespace safel2o {

// Iterate-indexed history: record k describes x^k, so record 1 is the start
// point. `used_fallback` says whether x^k was produced by the fallback
// operator (false at k = 1 and for accepted candidates). `mu` is the
// safeguard value in effect once x^k was current (NaN outside safeguarded
// runs); `objective` is NaN unless the run was given an objective callback.
struct TraceRecord {
  int k = 0;
  double objective = 0.0;
  double residual = 0.0;
  double mu = 0.0;
  bool used_fallback = false;
};

struct RunTrace {
  std::vector<TraceRecord> records;
  // Update index of the first pure-fallback step past the learned depth
  // (K + 1 when the run extends; update k produces record k + 1), or -1.
  int extension_start = -1;
  bool converged = false;  // stopped because the residual reached tol
  Vector final_point;
};

// A learned update: layer(point, k) for k = 1..depth.
struct L2OUpdate {
  int depth = 0;
  std::function<Vector(const Vector&, int)> layer;
};

struct RunOptions {
  int total_iters = 0;   // maximum number of update steps
  double tol = 1e-10;    // stop once the fixed-point residual is <= tol
  std::function<double(const Vector&)> objective;  // optional instrumentation
};

// Fixed-point iteration x <- T(x).
RunTrace run_km(const FallbackOperator& op, const Vector& start, const RunOptions& opts);

// Unsafeguarded learned updates, at most min(depth, total_iters) of them.
// Residuals are recorded through `instrument` when given (the run itself
// never consults it), NaN otherwise; tol stopping needs an instrument.
RunTrace run_l2o(const L2OUpdate& update, const Vector& start, const RunOptions& opts,
                 const FallbackOperator* instrument = nullptr);

// Safeguarded run: each learned candidate y is kept only if its residual
// passes the safeguard check, else the iterate falls back to op applied to
// the current point. Past `update.depth` the run extends with pure fallback
// steps. The fallback image of the current iterate is cached so each
// iteration costs one operator application plus one more on rejection.
RunTrace run_safe_l2o(const L2OUpdate& update, const FallbackOperator& op,
                      const SafeguardConfig& safeguard, const Vector& start,
                      const RunOptions& opts);

}  // namespace safel2o
