#pragma once

#include <string>
#include <vector>

#include "safel2o/executor.hpp"
#include "safel2o/operators.hpp"
#include "safel2o/problems.hpp"
#include "safel2o/types.hpp"

namespace safel2o {

enum class SchemeKind { Alista, ListaCp, Dladmm, NnlsPg };

std::string to_string(SchemeKind kind);
SchemeKind scheme_kind_from_string(const std::string& name);

// One unrolled layer per family. Thresholds are shrinkage levels (already
// multiplied by tau where the source algorithm does so).
struct AlistaLayer {
  double threshold = 0.0;  // shrink level
  double step = 0.0;       // multiplies W^T (A x - d)
};

struct ListaCpLayer {
  double threshold = 0.0;
  Matrix weight;  // m x n, applied transposed to (A x - d)
};

struct NnlsPgLayer {
  Matrix step_matrix;  // n x m, multiplies (A x - d) before projection
};

// Layer for packed (x, z, nu) points; componentwise step/threshold vectors.
struct DladmmLayer {
  Vector constraint_step;  // length m, weights (A x - z - d) into the multiplier blocks
  Vector x_threshold;      // length n
  Vector x_step;           // length n, scales W1^T(...) in the x update
  Vector z_threshold;      // length m
  Vector z_step;           // length m, scales the multiplier estimate in the z update
};

// Parameters of an unrolled scheme. Exactly one of the per-layer vectors is
// populated, matching `kind`. `shared_weight` is the analytic (frozen)
// ALISTA weight or the trainable weight shared by all D-LADMM layers; empty
// for the other families.
struct SchemeParams {
  SchemeKind kind = SchemeKind::Alista;
  int m = 0;
  int n = 0;
  double tau = 0.0;
  std::string dict_tag;  // fingerprint of the dictionary the scheme was built for
  Matrix shared_weight;  // m x n when used
  std::vector<AlistaLayer> alista;
  std::vector<ListaCpLayer> listacp;
  std::vector<NnlsPgLayer> nnlspg;
  std::vector<DladmmLayer> dladmm;

  int depth() const;
};

// Column-wise minimum-coherence weight: W(:,l) = (A A^T)^{-1} a_l scaled so
// a_l^T W(:,l) = 1. Minimizes ||W^T A||_F over that constraint set. Needs
// full row rank (NumericError otherwise) and nonzero columns (ConfigError).
Matrix alista_weight(const Matrix& a);

// Builds depth layers initialized so that every layer reproduces one step of
// the scheme's conventional algorithm:
//   alista:  threshold tau/L, step 1 (with the analytic weight)
//   listacp: weight A/L, threshold tau/L            (one ISTA step)
//   nnlspg:  step matrix A^T/L                      (one projected-gradient step)
//   dladmm:  the LiAdmm constants, W1 = A           (one x-first sweep)
// L is ||A^T A||_2. For dladmm the constants come from `fallback` when given
// (must be a LiAdmm operator on the same problem); otherwise the documented
// defaults of FallbackOperator::make(LiAdmm, p, 1.0) are used.
SchemeParams init_scheme(SchemeKind kind, const ProblemInstance& p, int depth,
                         const FallbackOperator* fallback = nullptr);

// Single-vector layer applications (the executor path).
Vector alista_layer(const Vector& x, const AlistaLayer& layer, const Matrix& a, const Matrix& w,
                    const Vector& d);
Vector listacp_layer(const Vector& x, const ListaCpLayer& layer, const Matrix& a, const Vector& d);
Vector nnlspg_layer(const Vector& x, const NnlsPgLayer& layer, const Matrix& a, const Vector& d);
Vector dladmm_layer(const Vector& packed, const DladmmLayer& layer, const Matrix& w1,
                    const Matrix& a, const Vector& d);

// Wraps the scheme as an executor update for one instance. The params are
// copied into the closure; shapes are validated against the instance.
L2OUpdate make_update(const SchemeParams& params, const ProblemInstance& p);

// Plain-text container (17 significant digits; bit-exact round-trip):
//   line 1: safel2o_params 1 <kind> <depth> <m> <n> <tau> <dict_tag>
//   then "W" + m rows of n values when the family has a shared weight,
//   then per layer, tensors in declaration order:
//     alista:  "layer <threshold> <step>"
//     listacp: "layer <threshold>" then m rows of n values
//     nnlspg:  "layer" then n rows of m values
//     dladmm:  "layer" then one line per field in struct order
//              (constraint_step, x_threshold, x_step, z_threshold, z_step)
void save_params(const SchemeParams& params, const std::string& path);
SchemeParams load_params(const std::string& path);

}  // namespace safel2o
