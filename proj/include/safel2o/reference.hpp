#pragma once

#include <vector>

#include "safel2o/operators.hpp"
#include "safel2o/problems.hpp"

namespace safel2o {

// High-accuracy solution obtained by running the canonical fallback from the
// zero start until the fixed-point residual reaches tol. `x` is the primal
// block, `point` the full iterate (packed for l1-l1), `value` the objective
// at x. `converged` is false when max_iters ran out first.
struct Reference {
  Vector x;
  Vector point;
  double value = 0.0;
  bool converged = false;
  long iters = 0;
};

// The default operator per family: prox gradient with step 1/||A^T A|| for
// lasso, projected gradient with the same step for nnls, liadmm with
// penalty 1 and the 0.99-scaled admissible steps for l1-l1.
FallbackOperator canonical_fallback(const ProblemInstance& p);

Reference solve_reference(const ProblemInstance& p, double tol = 1e-12, long max_iters = 1000000);

// References for a whole split, in order (computed once; reuse the result
// rather than re-solving).
std::vector<Reference> solve_references(const std::vector<ProblemInstance>& batch,
                                        double tol = 1e-12, long max_iters = 1000000);

}  // namespace safel2o
