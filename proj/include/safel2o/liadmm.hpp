#pragma once

#include <memory>

#include "safel2o/problems.hpp"
#include "safel2o/types.hpp"

namespace safel2o {

// Linearized ADMM for min tau||x||_1 + ||z||_1  s.t.  Ax - z = d
// (the l1-l1 problem split with B = -Id).
//
// State packaging: the iteration is a Douglas-Rachford splitting step in the
// transformed coordinates nu = (u/penalty + Ax, Px, -Qz), and that transform
// pairs the dual u^k and slack z^k with the *next* primal x^{k+1}. A state
// therefore stores the tuple (x^{k+1}, z^k, u^k): `x` runs one step ahead of
// `z` and `dual`. One step updates z, then the dual, then x, which advances
// every component by one index and keeps the pairing. Two consecutive states
// then contain exactly the quantities the per-step residual formula needs,
// and that formula equals the Euclidean distance between consecutive nu's.
struct LiadmmState {
  Vector x;     // x^{k+1}
  Vector z;     // z^k
  Vector dual;  // u^k
  Vector drs;   // stacked nu^k = [dual/penalty + A x; P x; -Q z], refreshed by every step
};

struct LiadmmContext {
  std::shared_ptr<const Matrix> dict;  // A
  Vector obs;                          // d
  double tau = 0.0;
  double penalty = 0.0;  // multiplier step on the constraint (alpha)
  double x_step = 0.0;   // linearized prox step for x (beta)
  double z_step = 0.0;   // prox step for z (gamma)
  Matrix metric_x;       // P = (I/(penalty*x_step) - A^T A)^{1/2}
  Matrix metric_z;       // Q = (1/(penalty*z_step) - 1)^{1/2} I  since B = -Id

  int m() const { return static_cast<int>(dict->rows()); }
  int n() const { return static_cast<int>(dict->cols()); }
};

// Validates the step conditions penalty*x_step*||A^T A||_2 < 1 and
// penalty*z_step < 1 (both strict; violations are ConfigError, which also
// covers the PSD requirement on the P metric) and precomputes the metrics.
LiadmmContext make_liadmm_context(const ProblemInstance& p, double penalty, double x_step,
                                  double z_step);

// Packages a user-facing start tuple (x0, z0, u0) by applying the x update
// once, yielding the state (x1, z0, u0).
LiadmmState liadmm_initial_state(const LiadmmContext& ctx, const Vector& x0, const Vector& z0,
                                 const Vector& u0);

LiadmmState liadmm_step(const LiadmmState& s, const LiadmmContext& ctx);

// || [ A x_next - z_next - d ; P (x_next - x_prev) ; -Q (z_next - z_prev) ] ||
// for consecutive states; equal to the distance between their nu points.
double liadmm_residual(const LiadmmState& prev, const LiadmmState& next, const LiadmmContext& ctx);

// Flat [x; z; dual] of length n + 2m, and its inverse (which refreshes drs).
Vector liadmm_pack(const LiadmmState& s);
LiadmmState liadmm_unpack(const Vector& v, const LiadmmContext& ctx);

}  // namespace safel2o
