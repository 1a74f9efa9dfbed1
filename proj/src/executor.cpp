#include "safel2o/executor.hpp"

#include <cmath>
#include <limits>

#include "safel2o/errors.hpp"

namespace safel2o {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double eval_objective(const RunOptions& opts, const Vector& point) {
  return opts.objective ? opts.objective(point) : kNan;
}

void check_options(const RunOptions& opts) {
  if (opts.total_iters < 0) throw ConfigError("run: total_iters must be nonnegative");
  if (!(opts.tol >= 0.0)) throw ConfigError("run: tol must be nonnegative");
}

}  // namespace

RunTrace run_km(const FallbackOperator& op, const Vector& start, const RunOptions& opts) {
  check_options(opts);
  RunTrace trace;
  Vector x = start;
  Vector tx = op.apply(x);
  double r = op.residual(x, tx);
  trace.records.push_back({1, eval_objective(opts, x), r, kNan, false});
  for (int k = 1; k <= opts.total_iters; ++k) {
    if (r <= opts.tol) {
      trace.converged = true;
      break;
    }
    x = tx;
    tx = op.apply(x);
    r = op.residual(x, tx);
    trace.records.push_back({k + 1, eval_objective(opts, x), r, kNan, true});
  }
  if (r <= opts.tol) trace.converged = true;
  trace.final_point = std::move(x);
  return trace;
}

RunTrace run_l2o(const L2OUpdate& update, const Vector& start, const RunOptions& opts,
                 const FallbackOperator* instrument) {
  check_options(opts);
  if (update.depth > 0 && !update.layer) throw ConfigError("run_l2o: missing layer function");
  RunTrace trace;
  Vector x = start;
  double r = instrument ? instrument->residual(x) : kNan;
  trace.records.push_back({1, eval_objective(opts, x), r, kNan, false});
  int steps = std::min(update.depth, opts.total_iters);
  for (int k = 1; k <= steps; ++k) {
    if (instrument && r <= opts.tol) {
      trace.converged = true;
      break;
    }
    x = update.layer(x, k);
    r = instrument ? instrument->residual(x) : kNan;
    trace.records.push_back({k + 1, eval_objective(opts, x), r, kNan, false});
  }
  if (instrument && r <= opts.tol) trace.converged = true;
  trace.final_point = std::move(x);
  return trace;
}

RunTrace run_safe_l2o(const L2OUpdate& update, const FallbackOperator& op,
                      const SafeguardConfig& safeguard, const Vector& start,
                      const RunOptions& opts) {
  check_options(opts);
  if (update.depth > 0 && !update.layer) throw ConfigError("run_safe_l2o: missing layer function");
  RunTrace trace;
  Vector x = start;
  Vector tx = op.apply(x);
  double r = op.residual(x, tx);
  SafeguardState sg(safeguard, r);
  trace.records.push_back({1, eval_objective(opts, x), r, sg.mu(), false});
  for (int k = 1; k <= opts.total_iters; ++k) {
    if (r <= opts.tol) {
      trace.converged = true;
      break;
    }
    bool fallback;
    if (k <= update.depth) {
      Vector candidate = update.layer(x, k);
      Vector applied = op.apply(candidate);
      double candidate_r = op.residual(candidate, applied);
      if (sg.check(candidate_r)) {
        x = std::move(candidate);
        tx = std::move(applied);
        r = candidate_r;
        fallback = false;
      } else {
        x = std::move(tx);
        tx = op.apply(x);
        r = op.residual(x, tx);
        fallback = true;
      }
    } else {
      if (trace.extension_start < 0) trace.extension_start = k;
      x = std::move(tx);
      tx = op.apply(x);
      r = op.residual(x, tx);
      fallback = true;
    }
    sg.update(r);
    trace.records.push_back({k + 1, eval_objective(opts, x), r, sg.mu(), fallback});
  }
  if (r <= opts.tol) trace.converged = true;
  trace.final_point = std::move(x);
  return trace;
}

}  // namespace safel2o
