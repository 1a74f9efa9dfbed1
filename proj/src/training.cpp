#include "safel2o/training.hpp"

#include <algorithm>
#include <cmath>

#include "safel2o/errors.hpp"
#include "safel2o/prox.hpp"
#include "safel2o/reference.hpp"
#include "safel2o/rng.hpp"

namespace safel2o {

std::string to_string(LossKind loss) {
  switch (loss) {
    case LossKind::Objective: return "objective";
    case LossKind::DistToSolution: return "distance";
    case LossKind::FixedPointResidual: return "residual";
  }
  throw ConfigError("unknown loss kind");
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "objective") return LossKind::Objective;
  if (name == "distance") return LossKind::DistToSolution;
  if (name == "residual") return LossKind::FixedPointResidual;
  throw ConfigError("unknown loss '" + name + "' (expected objective|distance|residual)");
}

TrainSetup train_setup(const Dataset& ds) {
  return TrainSetup{ds.kind, ds.dict, ds.tau, ds.gram_norm};
}

TrainSetup train_setup(const ProblemInstance& p) {
  return TrainSetup{p.kind, p.dict, p.tau, p.gram_norm};
}

namespace {

// Elementwise pieces. Shrinkage derivatives are 1 strictly past the
// threshold and 0 elsewhere, including at the kink.
Matrix sign_of(const Matrix& v) {
  return v.unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Matrix shrink_batch(const Matrix& v, double thr) {
  return v.unaryExpr([thr](double x) {
    if (x > thr) return x - thr;
    if (x < -thr) return x + thr;
    return 0.0;
  });
}

Matrix mask_gt(const Matrix& v, double thr) {
  return v.unaryExpr([thr](double x) { return std::abs(x) > thr ? 1.0 : 0.0; });
}

Matrix shrink_batch_rows(const Matrix& v, const Vector& thr) {
  Matrix out(v.rows(), v.cols());
  for (int j = 0; j < v.cols(); ++j)
    for (int i = 0; i < v.rows(); ++i) {
      double x = v(i, j), t = thr[i];
      out(i, j) = x > t ? x - t : (x < -t ? x + t : 0.0);
    }
  return out;
}

Matrix mask_gt_rows(const Matrix& v, const Vector& thr) {
  Matrix out(v.rows(), v.cols());
  for (int j = 0; j < v.cols(); ++j)
    for (int i = 0; i < v.rows(); ++i) out(i, j) = std::abs(v(i, j)) > thr[i] ? 1.0 : 0.0;
  return out;
}

// Columnwise scale by a per-row vector: diag(s) * v.
Matrix row_scale(const Vector& s, const Matrix& v) {
  return v.array().colwise() * s.array();
}

Vector row_sum(const Matrix& v) { return v.rowwise().sum(); }

struct VecCache {
  Matrix v;    // pre-shrink / pre-projection values
  Matrix aux;  // alista: W^T fit; listacp & nnlspg: the fit A x - d
};

Matrix forward_vec(const SchemeParams& sp, int depth, const Matrix& obs, const Matrix& a,
                   std::vector<VecCache>* caches) {
  int n = static_cast<int>(a.cols());
  Matrix x = Matrix::Zero(n, obs.cols());
  for (int k = 0; k < depth; ++k) {
    Matrix fit = a * x - obs;
    Matrix v, aux;
    double thr = 0.0;
    switch (sp.kind) {
      case SchemeKind::Alista: {
        aux = sp.shared_weight.transpose() * fit;
        v = x - sp.alista[k].step * aux;
        thr = sp.alista[k].threshold;
        x = shrink_batch(v, thr);
        break;
      }
      case SchemeKind::ListaCp: {
        v = x - sp.listacp[k].weight.transpose() * fit;
        thr = sp.listacp[k].threshold;
        x = shrink_batch(v, thr);
        aux = std::move(fit);
        break;
      }
      case SchemeKind::NnlsPg: {
        v = x - sp.nnlspg[k].step_matrix * fit;
        x = v.cwiseMax(0.0);
        aux = std::move(fit);
        break;
      }
      default:
        throw ConfigError("forward_vec: not a vector scheme");
    }
    if (caches) caches->push_back({std::move(v), std::move(aux)});
  }
  return x;
}

struct DlCache {
  Matrix c0, g, p1, vx, c1, h, vz, c2;
};

void forward_dl(const SchemeParams& sp, int depth, const Matrix& obs, const Matrix& a, Matrix& x,
                Matrix& z, Matrix& u, std::vector<DlCache>* caches) {
  int m = static_cast<int>(a.rows()), n = static_cast<int>(a.cols());
  int cols = static_cast<int>(obs.cols());
  x = Matrix::Zero(n, cols);
  z = Matrix::Zero(m, cols);
  u = Matrix::Zero(m, cols);
  const Matrix& w1 = sp.shared_weight;
  for (int k = 0; k < depth; ++k) {
    const DladmmLayer& l = sp.dladmm[k];
    DlCache c;
    c.c0 = a * x - z - obs;
    c.g = u + row_scale(l.constraint_step, c.c0);
    c.p1 = w1.transpose() * c.g;
    c.vx = x - row_scale(l.x_step, c.p1);
    Matrix xn = shrink_batch_rows(c.vx, l.x_threshold);
    c.c1 = a * xn - z - obs;
    c.h = u + row_scale(l.constraint_step, c.c1);
    c.vz = z + row_scale(l.z_step, c.h);
    Matrix zn = shrink_batch_rows(c.vz, l.z_threshold);
    c.c2 = a * xn - zn - obs;
    u = u + row_scale(l.constraint_step, c.c2);
    x = std::move(xn);
    z = std::move(zn);
    if (caches) caches->push_back(std::move(c));
  }
}

void check_depth(const SchemeParams& sp, int depth) {
  if (depth < 1 || depth > sp.depth())
    throw ConfigError("stage depth must lie in [1, scheme depth]");
}

// Loss evaluated on batched outputs (x rows only for the packed family).
double loss_on_output(const Matrix& x, const TrainBatch& batch, LossKind loss,
                      const TrainSetup& setup) {
  const Matrix& a = *setup.dict;
  double b = static_cast<double>(x.cols());
  switch (loss) {
    case LossKind::Objective:
      switch (setup.kind) {
        case ProblemKind::Lasso:
          return (0.5 * (a * x - batch.obs).squaredNorm() +
                  setup.tau * x.array().abs().sum()) / b;
        case ProblemKind::L1L1:
          return ((a * x - batch.obs).array().abs().sum() + setup.tau * x.array().abs().sum()) / b;
        case ProblemKind::Nnls:
          return 0.5 * (a * x - batch.obs).squaredNorm() / b;
      }
      throw ConfigError("unknown problem kind");
    case LossKind::DistToSolution:
      if (batch.targets.rows() != x.rows() || batch.targets.cols() != x.cols())
        throw ConfigError("distance loss needs reference targets shaped like the outputs");
      return (x - batch.targets).squaredNorm() / b;
    case LossKind::FixedPointResidual: {
      double inv_l = 1.0 / setup.gram_norm;
      Matrix v = x - inv_l * (a.transpose() * (a * x - batch.obs));
      Matrix tx;
      if (setup.kind == ProblemKind::Lasso)
        tx = shrink_batch(v, setup.tau * inv_l);
      else if (setup.kind == ProblemKind::Nnls)
        tx = v.cwiseMax(0.0);
      else
        throw ConfigError("residual loss is not available for this family");
      return (x - tx).squaredNorm() / b;
    }
  }
  throw ConfigError("unknown loss kind");
}

// d(loss)/d(output x block).
Matrix loss_seed(const Matrix& x, const TrainBatch& batch, LossKind loss,
                 const TrainSetup& setup) {
  const Matrix& a = *setup.dict;
  double b = static_cast<double>(x.cols());
  switch (loss) {
    case LossKind::Objective:
      switch (setup.kind) {
        case ProblemKind::Lasso:
          return (a.transpose() * (a * x - batch.obs) + setup.tau * sign_of(x)) / b;
        case ProblemKind::L1L1:
          return (a.transpose() * sign_of(Matrix(a * x - batch.obs)) + setup.tau * sign_of(x)) / b;
        case ProblemKind::Nnls:
          return (a.transpose() * (a * x - batch.obs)) / b;
      }
      throw ConfigError("unknown problem kind");
    case LossKind::DistToSolution:
      return 2.0 * (x - batch.targets) / b;
    case LossKind::FixedPointResidual: {
      double inv_l = 1.0 / setup.gram_norm;
      Matrix v = x - inv_l * (a.transpose() * (a * x - batch.obs));
      Matrix mask, tx;
      if (setup.kind == ProblemKind::Lasso) {
        double thr = setup.tau * inv_l;
        tx = shrink_batch(v, thr);
        mask = mask_gt(v, thr);
      } else if (setup.kind == ProblemKind::Nnls) {
        tx = v.cwiseMax(0.0);
        mask = v.unaryExpr([](double t) { return t > 0.0 ? 1.0 : 0.0; });
      } else {
        throw ConfigError("residual loss is not available for this family");
      }
      Matrix rt = x - tx;
      Matrix masked = mask.cwiseProduct(rt);
      return 2.0 / b * (rt - masked + inv_l * (a.transpose() * (a * masked)));
    }
  }
  throw ConfigError("unknown loss kind");
}

SchemeParams zero_like(const SchemeParams& sp) {
  SchemeParams g = sp;
  g.shared_weight.setZero();
  for (auto& l : g.alista) l = AlistaLayer{0.0, 0.0};
  for (auto& l : g.listacp) {
    l.threshold = 0.0;
    l.weight.setZero();
  }
  for (auto& l : g.nnlspg) l.step_matrix.setZero();
  for (auto& l : g.dladmm) {
    l.constraint_step.setZero();
    l.x_threshold.setZero();
    l.x_step.setZero();
    l.z_threshold.setZero();
    l.z_step.setZero();
  }
  return g;
}

}  // namespace

double scheme_loss(const SchemeParams& params, int depth, const TrainBatch& batch, LossKind loss,
                   const TrainSetup& setup) {
  check_depth(params, depth);
  if (params.kind == SchemeKind::Dladmm) {
    if (loss == LossKind::FixedPointResidual)
      throw ConfigError("residual loss is not supported for the d-ladmm family");
    Matrix x, z, u;
    forward_dl(params, depth, batch.obs, *setup.dict, x, z, u, nullptr);
    return loss_on_output(x, batch, loss, setup);
  }
  Matrix x = forward_vec(params, depth, batch.obs, *setup.dict, nullptr);
  return loss_on_output(x, batch, loss, setup);
}

Matrix scheme_forward(const SchemeParams& params, int depth, const Matrix& obs,
                      const TrainSetup& setup) {
  check_depth(params, depth);
  if (params.kind == SchemeKind::Dladmm) {
    Matrix x, z, u;
    forward_dl(params, depth, obs, *setup.dict, x, z, u, nullptr);
    Matrix out(x.rows() + z.rows() + u.rows(), x.cols());
    out << x, z, u;
    return out;
  }
  return forward_vec(params, depth, obs, *setup.dict, nullptr);
}

namespace {

SchemeParams gradient_analytic(const SchemeParams& sp, int depth, const TrainBatch& batch,
                               LossKind loss, const TrainSetup& setup) {
  const Matrix& a = *setup.dict;
  SchemeParams grad = zero_like(sp);
  if (sp.kind == SchemeKind::Dladmm) {
    std::vector<DlCache> caches;
    Matrix x, z, u;
    forward_dl(sp, depth, batch.obs, a, x, z, u, &caches);
    Matrix gx = loss_seed(x, batch, loss, setup);
    Matrix gz = Matrix::Zero(z.rows(), z.cols());
    Matrix gu = Matrix::Zero(u.rows(), u.cols());
    for (int k = depth - 1; k >= 0; --k) {
      const DladmmLayer& l = sp.dladmm[k];
      DladmmLayer& gl = grad.dladmm[k];
      const DlCache& c = caches[k];
      Vector ga = Vector::Zero(sp.m);
      // multiplier update u' = u + cstep o c2
      Matrix gu_in = gu;
      ga += row_sum(c.c2.cwiseProduct(gu));
      Matrix gc2 = row_scale(l.constraint_step, gu);
      Matrix gxp = gx + a.transpose() * gc2;
      Matrix gzp = gz - gc2;
      // slack update z' = shrink(vz, z_thr), vz = z + z_step o h
      Matrix gvz = gzp.cwiseProduct(mask_gt_rows(c.vz, l.z_threshold));
      gl.z_threshold = -row_sum(sign_of(c.vz).cwiseProduct(gvz));
      Matrix gz_in = gvz;
      gl.z_step = row_sum(c.h.cwiseProduct(gvz));
      Matrix gh = row_scale(l.z_step, gvz);
      gu_in += gh;
      ga += row_sum(c.c1.cwiseProduct(gh));
      Matrix gc1 = row_scale(l.constraint_step, gh);
      gxp += a.transpose() * gc1;
      gz_in -= gc1;
      // x update x' = shrink(vx, x_thr), vx = x - x_step o (W1^T g)
      Matrix gvx = gxp.cwiseProduct(mask_gt_rows(c.vx, l.x_threshold));
      gl.x_threshold = -row_sum(sign_of(c.vx).cwiseProduct(gvx));
      Matrix gx_in = gvx;
      gl.x_step = -row_sum(c.p1.cwiseProduct(gvx));
      Matrix gp1 = -row_scale(l.x_step, gvx);
      grad.shared_weight += c.g * gp1.transpose();
      Matrix gg = sp.shared_weight * gp1;
      gu_in += gg;
      ga += row_sum(c.c0.cwiseProduct(gg));
      Matrix gc0 = row_scale(l.constraint_step, gg);
      gx_in += a.transpose() * gc0;
      gz_in -= gc0;
      gl.constraint_step = ga;
      gx = std::move(gx_in);
      gz = std::move(gz_in);
      gu = std::move(gu_in);
    }
    return grad;
  }
  std::vector<VecCache> caches;
  Matrix x = forward_vec(sp, depth, batch.obs, a, &caches);
  Matrix gout = loss_seed(x, batch, loss, setup);
  for (int k = depth - 1; k >= 0; --k) {
    const VecCache& c = caches[k];
    switch (sp.kind) {
      case SchemeKind::Alista: {
        const AlistaLayer& l = sp.alista[k];
        Matrix gv = gout.cwiseProduct(mask_gt(c.v, l.threshold));
        grad.alista[k].threshold = -sign_of(c.v).cwiseProduct(gv).sum();
        grad.alista[k].step = -c.aux.cwiseProduct(gv).sum();
        gout = gv - l.step * (a.transpose() * (sp.shared_weight * gv));
        break;
      }
      case SchemeKind::ListaCp: {
        const ListaCpLayer& l = sp.listacp[k];
        Matrix gv = gout.cwiseProduct(mask_gt(c.v, l.threshold));
        grad.listacp[k].threshold = -sign_of(c.v).cwiseProduct(gv).sum();
        grad.listacp[k].weight = -c.aux * gv.transpose();
        gout = gv - a.transpose() * (l.weight * gv);
        break;
      }
      case SchemeKind::NnlsPg: {
        const NnlsPgLayer& l = sp.nnlspg[k];
        Matrix mask = c.v.unaryExpr([](double t) { return t > 0.0 ? 1.0 : 0.0; });
        Matrix gv = gout.cwiseProduct(mask);
        grad.nnlspg[k].step_matrix = -gv * c.aux.transpose();
        gout = gv - a.transpose() * (l.step_matrix.transpose() * gv);
        break;
      }
      default:
        throw ConfigError("gradient: unknown vector scheme");
    }
  }
  return grad;
}

SchemeParams gradient_fd(const SchemeParams& sp, int depth, const TrainBatch& batch, LossKind loss,
                         const TrainSetup& setup) {
  SchemeParams grad = zero_like(sp);
  SchemeParams work = sp;
  std::vector<double*> wp = trainable_ptrs(work, depth);
  std::vector<double*> gp = trainable_ptrs(grad, depth);
  for (std::size_t i = 0; i < wp.size(); ++i) {
    double p0 = *wp[i];
    double h = 1e-5 * (1.0 + std::abs(p0));
    *wp[i] = p0 + h;
    double up = scheme_loss(work, depth, batch, loss, setup);
    *wp[i] = p0 - h;
    double dn = scheme_loss(work, depth, batch, loss, setup);
    *wp[i] = p0;
    *gp[i] = (up - dn) / (2.0 * h);
  }
  return grad;
}

}  // namespace

SchemeParams scheme_gradient(const SchemeParams& params, int depth, const TrainBatch& batch,
                             LossKind loss, const TrainSetup& setup, GradMode mode) {
  check_depth(params, depth);
  if (params.kind == SchemeKind::Dladmm && loss == LossKind::FixedPointResidual)
    throw ConfigError("residual loss is not supported for the d-ladmm family");
  return mode == GradMode::Analytic ? gradient_analytic(params, depth, batch, loss, setup)
                                    : gradient_fd(params, depth, batch, loss, setup);
}

std::vector<double*> trainable_ptrs(SchemeParams& params, int depth) {
  check_depth(params, depth);
  std::vector<double*> out;
  auto push_tensor = [&out](double* data, Eigen::Index size) {
    for (Eigen::Index i = 0; i < size; ++i) out.push_back(data + i);
  };
  if (params.kind == SchemeKind::Dladmm)
    push_tensor(params.shared_weight.data(), params.shared_weight.size());
  for (int k = 0; k < depth; ++k) {
    switch (params.kind) {
      case SchemeKind::Alista:
        out.push_back(&params.alista[k].threshold);
        out.push_back(&params.alista[k].step);
        break;
      case SchemeKind::ListaCp:
        out.push_back(&params.listacp[k].threshold);
        push_tensor(params.listacp[k].weight.data(), params.listacp[k].weight.size());
        break;
      case SchemeKind::NnlsPg:
        push_tensor(params.nnlspg[k].step_matrix.data(), params.nnlspg[k].step_matrix.size());
        break;
      case SchemeKind::Dladmm: {
        DladmmLayer& l = params.dladmm[k];
        push_tensor(l.constraint_step.data(), l.constraint_step.size());
        push_tensor(l.x_threshold.data(), l.x_threshold.size());
        push_tensor(l.x_step.data(), l.x_step.size());
        push_tensor(l.z_threshold.data(), l.z_threshold.size());
        push_tensor(l.z_step.data(), l.z_step.size());
        break;
      }
    }
  }
  return out;
}

double loss_value(LossKind loss, const ProblemInstance& p, const Vector& point,
                  const Vector* x_star, const FallbackOperator* op) {
  switch (loss) {
    case LossKind::Objective:
      return point_objective(p, point);
    case LossKind::DistToSolution: {
      if (!x_star) throw ConfigError("loss_value: distance loss needs a reference solution");
      Vector x = point.size() == p.n() ? point : Vector(point.head(p.n()));
      if (x_star->size() != x.size()) throw ConfigError("loss_value: reference has wrong size");
      return (x - *x_star).squaredNorm();
    }
    case LossKind::FixedPointResidual: {
      if (!op) throw ConfigError("loss_value: residual loss needs an operator");
      double r = op->residual(point);
      return r * r;
    }
  }
  throw ConfigError("unknown loss kind");
}

namespace {

void apply_step(SchemeParams& params, SchemeParams& grad, int depth, double coef) {
  std::vector<double*> pp = trainable_ptrs(params, depth);
  std::vector<double*> gp = trainable_ptrs(grad, depth);
  for (std::size_t i = 0; i < pp.size(); ++i) *pp[i] += coef * *gp[i];
}

// Shrink levels live on [0, inf); project candidates back so every layer the
// optimizer proposes is one the executor will accept.
void clamp_domain(SchemeParams& params, int depth) {
  for (int k = 0; k < depth && k < static_cast<int>(params.alista.size()); ++k)
    params.alista[k].threshold = std::max(0.0, params.alista[k].threshold);
  for (int k = 0; k < depth && k < static_cast<int>(params.listacp.size()); ++k)
    params.listacp[k].threshold = std::max(0.0, params.listacp[k].threshold);
  for (int k = 0; k < depth && k < static_cast<int>(params.dladmm.size()); ++k) {
    params.dladmm[k].x_threshold = params.dladmm[k].x_threshold.cwiseMax(0.0);
    params.dladmm[k].z_threshold = params.dladmm[k].z_threshold.cwiseMax(0.0);
  }
}

// Deterministic Fisher-Yates; std::shuffle's draw pattern is
// implementation-defined, this is not.
void shuffle_indices(std::vector<int>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.next_u64() % i]);
}

TrainBatch slice_batch(const TrainBatch& full, const std::vector<int>& idx, std::size_t begin,
                       std::size_t end) {
  TrainBatch out;
  out.obs.resize(full.obs.rows(), static_cast<Eigen::Index>(end - begin));
  if (full.targets.size() > 0)
    out.targets.resize(full.targets.rows(), static_cast<Eigen::Index>(end - begin));
  for (std::size_t i = begin; i < end; ++i) {
    out.obs.col(static_cast<Eigen::Index>(i - begin)) = full.obs.col(idx[i]);
    if (full.targets.size() > 0)
      out.targets.col(static_cast<Eigen::Index>(i - begin)) = full.targets.col(idx[i]);
  }
  return out;
}

// One gradient step against `reference_loss` with geometric backtracking.
// Returns the accepted loss (or reference_loss when no step was accepted)
// and updates lr in place.
double backtracked_step(SchemeParams& params, SchemeParams& grad, int depth,
                        const TrainBatch& batch, LossKind loss, const TrainSetup& setup,
                        double reference_loss, double& lr, const TrainConfig& cfg,
                        bool* stalled) {
  for (int halvings = 0;; ++halvings) {
    SchemeParams trial = params;
    apply_step(trial, grad, depth, -lr);
    clamp_domain(trial, depth);
    double lt = scheme_loss(trial, depth, batch, loss, setup);
    if (std::isfinite(lt) && lt <= reference_loss) {
      params = std::move(trial);
      lr = std::min(lr * 1.2, cfg.init_step * 64.0);
      return lt;
    }
    if (halvings >= cfg.max_halvings) {
      if (stalled) *stalled = true;
      return reference_loss;
    }
    lr *= 0.5;
  }
}

}  // namespace

SchemeParams train_layerwise(const SchemeParams& init, const std::vector<ProblemInstance>& split,
                             const TrainConfig& config, TrainReport* report) {
  if (split.empty()) throw ConfigError("train: empty training split");
  if (config.epochs_per_stage < 0 || config.minibatch < 1 || config.max_halvings < 0 ||
      !(config.init_step > 0.0))
    throw ConfigError("train: bad optimizer configuration");
  if (init.kind == SchemeKind::Dladmm && config.loss == LossKind::FixedPointResidual)
    throw ConfigError("train: residual loss is not supported for the d-ladmm family");
  TrainSetup setup = train_setup(split.front());
  int b = static_cast<int>(split.size());
  TrainBatch full;
  full.obs.resize(split.front().m(), b);
  for (int i = 0; i < b; ++i) full.obs.col(i) = split[i].obs;
  if (config.loss == LossKind::DistToSolution) {
    full.targets.resize(split.front().n(), b);
    for (int i = 0; i < b; ++i) full.targets.col(i) = solve_reference(split[i]).x;
  }
  bool use_minibatches = b > config.full_batch_limit;
  Rng rng(config.seed);
  SchemeParams params = init;
  int total_depth = params.depth();

  auto run_stage = [&](int stage, int epochs, int label) {
    SchemeParams snapshot = params;
    double initial = scheme_loss(params, stage, full, config.loss, setup);
    double current = initial;
    double lr = config.init_step;
    StageReport sr;
    sr.stage = label;
    sr.initial_loss = initial;
    for (int epoch = 0; epoch < epochs; ++epoch) {
      bool stalled = false;
      if (!use_minibatches) {
        SchemeParams grad =
            scheme_gradient(params, stage, full, config.loss, setup, config.mode);
        current = backtracked_step(params, grad, stage, full, config.loss, setup, current, lr,
                                   config, &stalled);
      } else {
        std::vector<int> idx(b);
        for (int i = 0; i < b; ++i) idx[i] = i;
        shuffle_indices(idx, rng);
        for (std::size_t begin = 0; begin < idx.size(); begin += config.minibatch) {
          std::size_t end = std::min(idx.size(), begin + config.minibatch);
          TrainBatch chunk = slice_batch(full, idx, begin, end);
          SchemeParams grad =
              scheme_gradient(params, stage, chunk, config.loss, setup, config.mode);
          double chunk_loss = scheme_loss(params, stage, chunk, config.loss, setup);
          backtracked_step(params, grad, stage, chunk, config.loss, setup, chunk_loss, lr, config,
                           nullptr);
        }
        current = scheme_loss(params, stage, full, config.loss, setup);
      }
      sr.epoch_loss.push_back(current);
      ++sr.epochs;
      if (stalled) break;
    }
    double final_loss = scheme_loss(params, stage, full, config.loss, setup);
    if (!std::isfinite(final_loss) || final_loss > sr.initial_loss) {
      params = std::move(snapshot);
      final_loss = sr.initial_loss;
      sr.reverted = true;
    }
    sr.final_loss = final_loss;
    if (report) report->stages.push_back(std::move(sr));
  };

  for (int stage = 1; stage <= total_depth; ++stage)
    run_stage(stage, config.epochs_per_stage, stage);
  if (config.joint_finetune) {
    int extra = config.finetune_epochs > 0 ? config.finetune_epochs : config.epochs_per_stage;
    run_stage(total_depth, extra, total_depth + 1);
  }
  return params;
}

}  // namespace safel2o
