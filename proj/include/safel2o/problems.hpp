#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "safel2o/types.hpp"

namespace safel2o {

enum class ProblemKind { Lasso, L1L1, Nnls };

std::string to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(const std::string& name);

enum class Dist { Seen, Unseen };

std::string to_string(Dist dist);
Dist dist_from_string(const std::string& name);

// One optimization instance. The dictionary A is shared across a dataset, so
// instances hold it by shared pointer together with its precomputed squared
// spectral norm ||A^T A||_2.
struct ProblemInstance {
  ProblemKind kind = ProblemKind::Lasso;
  std::shared_ptr<const Matrix> dict;
  Vector obs;        // d
  double tau = 0.0;  // l1 weight; unused for NNLS
  Vector gen_code;   // code that generated obs (not the minimizer)
  double gram_norm = 0.0;  // ||A^T A||_2

  const Matrix& A() const { return *dict; }
  int m() const { return static_cast<int>(dict->rows()); }
  int n() const { return static_cast<int>(dict->cols()); }
};

// Objective value at x (the primal vector of length n):
//   Lasso: 0.5 ||Ax - d||^2 + tau ||x||_1
//   L1L1:      ||Ax - d||_1 + tau ||x||_1
//   Nnls:  0.5 ||Ax - d||^2   (the constraint x >= 0 lives in the operator)
double objective(const ProblemInstance& p, const Vector& x);

// Objective at an iterate as the executor sees it: accepts either a plain
// x of length n or a packed (x, z, dual) point of length n + 2m, in which
// case the objective is evaluated at the x block.
double point_objective(const ProblemInstance& p, const Vector& point);

// Bernoulli-gaussian componentwise law: value ~ N(mean, stddev^2) with
// probability density, else exactly 0.
struct SparsitySpec {
  double density = 1.0;
  double mean = 0.0;
  double stddev = 1.0;
};

// Fully explicit generation recipe. make_gen_spec fills the documented
// defaults for each problem family and distribution tag; tests may override
// individual fields (e.g. force density 0).
struct GenSpec {
  ProblemKind kind = ProblemKind::Lasso;
  Dist dist = Dist::Seen;
  int m = 250;
  int n = 500;
  double tau = 1e-3;
  int n_train = 10000;
  int n_test = 1000;
  std::uint64_t seed = 0;

  double dict_stddev = 1.0;        // entry stddev before normalization
  bool normalize_columns = true;   // rescale columns of A to unit norm
  SparsitySpec code;               // generating code law
  bool code_rectified = false;     // draw N(mean, stddev^2) then clamp at 0 (NNLS)
  SparsitySpec noise;              // additive noise law
  bool noise_sparse = false;       // apply the Bernoulli mask to noise too
  double noise_scale = 1.0;        // final multiplier on drawn noise entries
};

// Defaults:
//   lasso: m=250 n=500 tau=1e-3, A_ij ~ N(0, 1/m) then unit columns,
//          code Ber(0.1) o N(0,1) seen / Ber(0.2) o N(0,2) unseen,
//          noise 0.1 * N(0, 1/m), 10000 train / 1000 test
//   l1l1:  as lasso but tau=1 and noise drawn from the code's law (sparse)
//   nnls:  m=500 n=250 tau unused, A_ij ~ N(0,1) unnormalized,
//          code max(N(0,1),0) seen / max(N(5,5),0) unseen, noise N(0, 1/m)
GenSpec make_gen_spec(ProblemKind kind, Dist dist);

struct Dataset {
  ProblemKind kind = ProblemKind::Lasso;
  Dist dist = Dist::Seen;
  std::uint64_t seed = 0;
  double tau = 0.0;
  std::shared_ptr<const Matrix> dict;
  double gram_norm = 0.0;
  std::vector<ProblemInstance> train;
  std::vector<ProblemInstance> test;

  const Matrix& A() const { return *dict; }
  int m() const { return static_cast<int>(dict->rows()); }
  int n() const { return static_cast<int>(dict->cols()); }
};

// Draws A, then each train instance, then each test instance, in a fixed
// order from one seeded stream; identical spec gives bit-identical data.
// The distribution tag changes only what is drawn after A, so seen and
// unseen datasets with the same seed and shape share the dictionary.
Dataset generate_dataset(const GenSpec& spec);

// Plain-text container, 17 significant digits throughout:
//   line 1: safel2o_dataset 1 <kind> <m> <n> <tau> <n_train> <n_test> <seed> <dist>
//   lines 2..m+1: rows of A, n space-separated values each
//   then per instance (train block first, then test):
//     "d" followed by m values, one line
//     "code" followed by n values, one line
// Reload reproduces every double bit-exactly.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

// (sum_d f(x_d) - sum_d f*) / sum_d f*: ratio of batch means, not the mean of
// per-instance ratios. Sizes must match and the reference mean must be > 0.
double relative_error(const std::vector<double>& values, const std::vector<double>& ref_values);

}  // namespace safel2o
