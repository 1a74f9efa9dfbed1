#include "safel2o/reference.hpp"

#include "safel2o/errors.hpp"

namespace safel2o {

FallbackOperator canonical_fallback(const ProblemInstance& p) {
  switch (p.kind) {
    case ProblemKind::Lasso:
      return FallbackOperator::make(OperatorKind::ProxGrad, p, 1.0 / p.gram_norm);
    case ProblemKind::Nnls:
      return FallbackOperator::make(OperatorKind::ProjGrad, p, 1.0 / p.gram_norm);
    case ProblemKind::L1L1:
      return FallbackOperator::make(OperatorKind::LiAdmm, p, 1.0);
  }
  throw ConfigError("unknown problem kind");
}

Reference solve_reference(const ProblemInstance& p, double tol, long max_iters) {
  FallbackOperator op = canonical_fallback(p);
  Vector x = op.zero_start();
  Vector tx = op.apply(x);
  double r = op.residual(x, tx);
  Reference ref;
  for (ref.iters = 0; ref.iters < max_iters && r > tol; ++ref.iters) {
    x = std::move(tx);
    tx = op.apply(x);
    r = op.residual(x, tx);
  }
  ref.converged = r <= tol;
  ref.point = std::move(x);
  ref.x = ref.point.head(p.n());
  ref.value = objective(p, ref.x);
  return ref;
}

std::vector<Reference> solve_references(const std::vector<ProblemInstance>& batch, double tol,
                                        long max_iters) {
  std::vector<Reference> out;
  out.reserve(batch.size());
  for (const auto& p : batch) out.push_back(solve_reference(p, tol, max_iters));
  return out;
}

}  // namespace safel2o
