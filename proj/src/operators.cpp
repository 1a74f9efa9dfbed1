#include "safel2o/operators.hpp"

#include <cmath>

#include "safel2o/errors.hpp"
#include "safel2o/prox.hpp"

namespace safel2o {

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::GradDescent: return "grad";
    case OperatorKind::ProxPoint: return "proxpoint";
    case OperatorKind::ProjGrad: return "projgrad";
    case OperatorKind::ProxGrad: return "proxgrad";
    case OperatorKind::DouglasRachford: return "dr";
    case OperatorKind::LiAdmm: return "liadmm";
  }
  throw ConfigError("unknown operator kind");
}

OperatorKind operator_kind_from_string(const std::string& name) {
  if (name == "grad") return OperatorKind::GradDescent;
  if (name == "proxpoint") return OperatorKind::ProxPoint;
  if (name == "projgrad") return OperatorKind::ProjGrad;
  if (name == "proxgrad") return OperatorKind::ProxGrad;
  if (name == "dr") return OperatorKind::DouglasRachford;
  if (name == "liadmm") return OperatorKind::LiAdmm;
  throw ConfigError("unknown operator kind '" + name +
                    "' (expected grad|proxpoint|projgrad|proxgrad|dr|liadmm)");
}

namespace {

void require_gradient_step(const ProblemInstance& p, double step) {
  if (!(step > 0.0) || !(step < 2.0 / p.gram_norm))
    throw ConfigError("operator step must lie in (0, 2/||A^T A||)");
}

bool is_diagonal(const Matrix& a) {
  if (a.rows() != a.cols()) return false;
  double off = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j) off = std::max(off, std::abs(a(i, j)));
  return off <= 1e-12 * std::max(1.0, a.norm());
}

}  // namespace

FallbackOperator FallbackOperator::make(OperatorKind kind, const ProblemInstance& p, double step) {
  FallbackOperator op;
  op.kind_ = kind;
  op.step_ = step;
  op.problem_ = p;
  switch (kind) {
    case OperatorKind::GradDescent:
      if (p.kind != ProblemKind::Lasso || p.tau != 0.0)
        throw ConfigError("grad descent requires a smooth least-squares problem (lasso, tau = 0)");
      require_gradient_step(p, step);
      op.scaled_grad_ = step * p.A().transpose();
      break;
    case OperatorKind::ProxPoint:
      if (p.kind != ProblemKind::Lasso || !is_diagonal(p.A()))
        throw ConfigError("prox point is supported for lasso with a diagonal dictionary only");
      if (!(step > 0.0)) throw ConfigError("prox point step must be positive");
      break;
    case OperatorKind::ProjGrad:
      if (p.kind != ProblemKind::Nnls)
        throw ConfigError("projected gradient applies to nnls only");
      require_gradient_step(p, step);
      op.scaled_grad_ = step * p.A().transpose();
      break;
    case OperatorKind::ProxGrad:
      if (p.kind != ProblemKind::Lasso)
        throw ConfigError("prox gradient applies to lasso only");
      require_gradient_step(p, step);
      op.scaled_grad_ = step * p.A().transpose();
      break;
    case OperatorKind::DouglasRachford: {
      if (p.kind != ProblemKind::Lasso)
        throw ConfigError("douglas-rachford is wired for lasso only");
      if (!(step > 0.0)) throw ConfigError("douglas-rachford step must be positive");
      Matrix reg = Matrix::Identity(p.n(), p.n()) + step * (p.A().transpose() * p.A());
      auto llt = std::make_shared<Eigen::LLT<Matrix>>(reg);
      if (llt->info() != Eigen::Success)
        throw NumericError("douglas-rachford: factorization of I + step A^T A failed");
      op.ls_prox_ = std::move(llt);
      op.ls_shift_ = step * (p.A().transpose() * p.obs);
      break;
    }
    case OperatorKind::LiAdmm: {
      if (!(step > 0.0)) throw ConfigError("liadmm penalty must be positive");
      double x_step = 0.99 / (step * p.gram_norm);
      double z_step = 0.99 / step;
      op.li_ = std::make_shared<LiadmmContext>(make_liadmm_context(p, step, x_step, z_step));
      break;
    }
  }
  return op;
}

FallbackOperator FallbackOperator::make_liadmm(const ProblemInstance& p, double penalty,
                                               double x_step, double z_step) {
  FallbackOperator op;
  op.kind_ = OperatorKind::LiAdmm;
  op.step_ = penalty;
  op.problem_ = p;
  op.li_ = std::make_shared<LiadmmContext>(make_liadmm_context(p, penalty, x_step, z_step));
  return op;
}

int FallbackOperator::dim() const {
  if (kind_ == OperatorKind::LiAdmm) return problem_.n() + 2 * problem_.m();
  return problem_.n();
}

Vector FallbackOperator::zero_start() const {
  if (kind_ == OperatorKind::LiAdmm) {
    LiadmmState s = liadmm_initial_state(*li_, Vector::Zero(problem_.n()),
                                         Vector::Zero(problem_.m()), Vector::Zero(problem_.m()));
    return liadmm_pack(s);
  }
  return Vector::Zero(problem_.n());
}

const LiadmmContext& FallbackOperator::liadmm_context() const {
  if (kind_ != OperatorKind::LiAdmm) throw ConfigError("not a liadmm operator");
  return *li_;
}

Vector FallbackOperator::apply(const Vector& point) const {
  if (point.size() != dim()) throw ConfigError("operator applied to point of wrong dimension");
  const ProblemInstance& p = problem_;
  switch (kind_) {
    case OperatorKind::GradDescent:
      return point - scaled_grad_ * (p.A() * point - p.obs);
    case OperatorKind::ProxPoint: {
      Vector out(point.size());
      for (int i = 0; i < point.size(); ++i) {
        double a = p.A()(i, i);
        double scale = 1.0 + step_ * a * a;
        out[i] = soft_threshold((point[i] + step_ * a * p.obs[i]) / scale,
                                step_ * p.tau / scale);
      }
      return out;
    }
    case OperatorKind::ProjGrad:
      return project_nonneg(Vector(point - scaled_grad_ * (p.A() * point - p.obs)));
    case OperatorKind::ProxGrad:
      return soft_threshold(Vector(point - scaled_grad_ * (p.A() * point - p.obs)),
                            step_ * p.tau);
    case OperatorKind::DouglasRachford: {
      Vector resolvent_g = ls_prox_->solve(point + ls_shift_);
      Vector reflected_g = 2.0 * resolvent_g - point;
      Vector reflected_f = 2.0 * soft_threshold(reflected_g, step_ * p.tau) - reflected_g;
      return 0.5 * (point + reflected_f);
    }
    case OperatorKind::LiAdmm:
      return liadmm_pack(liadmm_step(liadmm_unpack(point, *li_), *li_));
  }
  throw ConfigError("unknown operator kind");
}

double FallbackOperator::residual(const Vector& point) const { return residual(point, apply(point)); }

double FallbackOperator::residual(const Vector& point, const Vector& applied) const {
  if (kind_ == OperatorKind::LiAdmm) {
    LiadmmState prev = liadmm_unpack(point, *li_);
    LiadmmState next = liadmm_unpack(applied, *li_);
    return liadmm_residual(prev, next, *li_);
  }
  return (point - applied).norm();
}

}  // namespace safel2o
