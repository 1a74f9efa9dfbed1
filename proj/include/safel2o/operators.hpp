#pragma once

#include <memory>
#include <string>

#include "safel2o/liadmm.hpp"
#include "safel2o/problems.hpp"
#include "safel2o/types.hpp"

namespace safel2o {

enum class OperatorKind { GradDescent, ProxPoint, ProjGrad, ProxGrad, DouglasRachford, LiAdmm };

std::string to_string(OperatorKind kind);
OperatorKind operator_kind_from_string(const std::string& name);

// A nonexpansive update map T with a fixed-point residual. Supported pairs:
//   GradDescent      least squares (lasso with tau = 0):  x - step A^T (Ax - d)
//   ProxPoint        lasso with diagonal A:               prox of the full objective
//   ProjGrad         nnls:                                clamp(x - step A^T (Ax - d), >= 0)
//   ProxGrad         lasso:                               shrink_{step*tau}(x - step A^T (Ax - d))
//   DouglasRachford  lasso:                               (Id + R_f R_g) / 2 via reflected proxes
//   LiAdmm           l1l1:                                one z/dual/x sweep on packed states
// Gradient-based kinds require step in (0, 2 / ||A^T A||_2); everything else
// any positive step. Unsupported pairs raise ConfigError.
//
// Points are flat vectors: length n for the first five kinds, n + 2m packed
// (x, z, dual) for LiAdmm, whose residual is the three-block metric formula
// rather than ||v - T v||. Operators are immutable once built and applying
// them is safe from multiple threads.
class FallbackOperator {
 public:
  static FallbackOperator make(OperatorKind kind, const ProblemInstance& p, double step);
  // LiAdmm with explicit steps; `make` uses penalty = step and the largest
  // admissible x/z steps scaled by 0.99.
  static FallbackOperator make_liadmm(const ProblemInstance& p, double penalty, double x_step,
                                      double z_step);

  Vector apply(const Vector& point) const;
  double residual(const Vector& point) const;  // applies the operator once
  double residual(const Vector& point, const Vector& applied) const;  // reuses apply(point)

  OperatorKind kind() const { return kind_; }
  double step() const { return step_; }
  int dim() const;                 // point length
  Vector zero_start() const;       // the all-zeros start in point coordinates
  const ProblemInstance& problem() const { return problem_; }
  // LiAdmm only: the context with the metrics; ConfigError otherwise.
  const LiadmmContext& liadmm_context() const;

 private:
  FallbackOperator() = default;

  OperatorKind kind_ = OperatorKind::GradDescent;
  double step_ = 0.0;
  ProblemInstance problem_;
  Matrix scaled_grad_;  // step * A^T, shared by the gradient-based kinds
  // DouglasRachford pieces.
  std::shared_ptr<const Eigen::LLT<Matrix>> ls_prox_;  // factors I + step A^T A
  Vector ls_shift_;                                    // step * A^T d
  // LiAdmm pieces.
  std::shared_ptr<const LiadmmContext> li_;
};

}  // namespace safel2o
