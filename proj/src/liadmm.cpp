#include "safel2o/liadmm.hpp"

#include <cmath>

#include "safel2o/errors.hpp"
#include "safel2o/linalg.hpp"
#include "safel2o/prox.hpp"

namespace safel2o {

LiadmmContext make_liadmm_context(const ProblemInstance& p, double penalty, double x_step,
                                  double z_step) {
  if (p.kind != ProblemKind::L1L1)
    throw ConfigError("liadmm: only the l1-l1 problem family is supported");
  if (penalty <= 0.0 || x_step <= 0.0 || z_step <= 0.0)
    throw ConfigError("liadmm: steps must be positive");
  if (!(penalty * x_step * p.gram_norm < 1.0))
    throw ConfigError("liadmm: need penalty * x_step * ||A^T A|| < 1");
  if (!(penalty * z_step < 1.0)) throw ConfigError("liadmm: need penalty * z_step < 1");
  LiadmmContext ctx;
  ctx.dict = p.dict;
  ctx.obs = p.obs;
  ctx.tau = p.tau;
  ctx.penalty = penalty;
  ctx.x_step = x_step;
  ctx.z_step = z_step;
  int n = ctx.n(), m = ctx.m();
  Matrix shifted = Matrix::Identity(n, n) / (penalty * x_step) - p.A().transpose() * p.A();
  ctx.metric_x = sqrt_psd(shifted);
  // With B = -Id the z metric is a positive multiple of the identity.
  ctx.metric_z = std::sqrt(1.0 / (penalty * z_step) - 1.0) * Matrix::Identity(m, m);
  return ctx;
}

namespace {

Vector refresh_drs(const LiadmmContext& ctx, const Vector& x, const Vector& z, const Vector& dual) {
  int m = ctx.m(), n = ctx.n();
  Vector drs(m + n + m);
  drs.head(m) = dual / ctx.penalty + (*ctx.dict) * x;
  drs.segment(m, n) = ctx.metric_x * x;
  drs.tail(m) = -(ctx.metric_z * z);
  return drs;
}

}  // namespace

LiadmmState liadmm_initial_state(const LiadmmContext& ctx, const Vector& x0, const Vector& z0,
                                 const Vector& u0) {
  if (x0.size() != ctx.n() || z0.size() != ctx.m() || u0.size() != ctx.m())
    throw ConfigError("liadmm: start tuple has wrong dimensions");
  const Matrix& a = *ctx.dict;
  Vector pressure = u0 + ctx.penalty * (a * x0 - z0 - ctx.obs);
  LiadmmState s;
  s.x = soft_threshold(Vector(x0 - ctx.x_step * (a.transpose() * pressure)), ctx.x_step * ctx.tau);
  s.z = z0;
  s.dual = u0;
  s.drs = refresh_drs(ctx, s.x, s.z, s.dual);
  return s;
}

LiadmmState liadmm_step(const LiadmmState& s, const LiadmmContext& ctx) {
  const Matrix& a = *ctx.dict;
  Vector ax = a * s.x;
  LiadmmState out;
  // z update reads the stored (ahead) x as its x^{k+1}.
  Vector pressure = s.dual + ctx.penalty * (ax - s.z - ctx.obs);
  out.z = soft_threshold(Vector(s.z + ctx.z_step * pressure), ctx.z_step);
  out.dual = s.dual + ctx.penalty * (ax - out.z - ctx.obs);
  Vector next_pressure = out.dual + ctx.penalty * (ax - out.z - ctx.obs);
  out.x = soft_threshold(Vector(s.x - ctx.x_step * (a.transpose() * next_pressure)),
                         ctx.x_step * ctx.tau);
  out.drs = refresh_drs(ctx, out.x, out.z, out.dual);
  return out;
}

double liadmm_residual(const LiadmmState& prev, const LiadmmState& next, const LiadmmContext& ctx) {
  Vector constraint = (*ctx.dict) * next.x - next.z - ctx.obs;
  Vector dx = ctx.metric_x * (next.x - prev.x);
  Vector dz = ctx.metric_z * (next.z - prev.z);  // the leading minus sign does not change the norm
  return std::sqrt(constraint.squaredNorm() + dx.squaredNorm() + dz.squaredNorm());
}

Vector liadmm_pack(const LiadmmState& s) {
  Vector v(s.x.size() + s.z.size() + s.dual.size());
  v << s.x, s.z, s.dual;
  return v;
}

LiadmmState liadmm_unpack(const Vector& v, const LiadmmContext& ctx) {
  int m = ctx.m(), n = ctx.n();
  if (v.size() != n + 2 * m) throw ConfigError("liadmm: packed state has wrong length");
  LiadmmState s;
  s.x = v.head(n);
  s.z = v.segment(n, m);
  s.dual = v.tail(m);
  s.drs = refresh_drs(ctx, s.x, s.z, s.dual);
  return s;
}

}  // namespace safel2o
