#pragma once

#include <cstdint>
#include <vector>

#include "safel2o/operators.hpp"
#include "safel2o/problems.hpp"
#include "safel2o/schemes.hpp"
#include "safel2o/types.hpp"

namespace safel2o {

enum class LossKind { Objective, DistToSolution, FixedPointResidual };

std::string to_string(LossKind loss);
LossKind loss_kind_from_string(const std::string& name);

enum class GradMode { Analytic, FiniteDiff };

// Per-dictionary constants shared by the batched passes.
struct TrainSetup {
  ProblemKind kind = ProblemKind::Lasso;
  std::shared_ptr<const Matrix> dict;
  double tau = 0.0;
  double gram_norm = 0.0;
};

TrainSetup train_setup(const Dataset& ds);
TrainSetup train_setup(const ProblemInstance& p);

// Instances as columns. `targets` holds reference solutions and is only read
// when the loss is DistToSolution.
struct TrainBatch {
  Matrix obs;      // m x B
  Matrix targets;  // n x B or empty
};

// Mean loss over the batch after running `depth` layers from the zero start.
double scheme_loss(const SchemeParams& params, int depth, const TrainBatch& batch, LossKind loss,
                   const TrainSetup& setup);

// Batched outputs after `depth` layers from the zero start; packed rows for
// the d-ladmm family.
Matrix scheme_forward(const SchemeParams& params, int depth, const Matrix& obs,
                      const TrainSetup& setup);

// Gradient of the mean batch loss with respect to the trainable tensors of
// layers 1..depth, shaped like the params (non-trainable tensors, e.g. the
// frozen ALISTA weight, are zero). Analytic mode is hand-derived
// reverse-mode with the shrinkage derivative taken as 1 where |v| exceeds
// the threshold and 0 elsewhere (including the kink); FiniteDiff is central
// differences with h = 1e-5 * (1 + |value|) per scalar.
SchemeParams scheme_gradient(const SchemeParams& params, int depth, const TrainBatch& batch,
                             LossKind loss, const TrainSetup& setup, GradMode mode);

// Pointers to every trainable scalar of layers 1..depth (plus the shared
// d-ladmm weight), in a fixed documented order.
std::vector<double*> trainable_ptrs(SchemeParams& params, int depth);

// Single-instance loss:
//   Objective takes x (or a packed point) only.
//   DistToSolution is ||x - x_star||^2 and needs x_star.
//   FixedPointResidual is the squared operator residual and needs op.
double loss_value(LossKind loss, const ProblemInstance& p, const Vector& point,
                  const Vector* x_star = nullptr, const FallbackOperator* op = nullptr);

struct TrainConfig {
  LossKind loss = LossKind::Objective;
  GradMode mode = GradMode::Analytic;
  int epochs_per_stage = 200;
  double init_step = 1e-2;     // backtracked: halved on loss increase, mildly regrown on success
  int max_halvings = 30;
  int full_batch_limit = 1000; // larger training splits switch to minibatches
  int minibatch = 256;
  std::uint64_t seed = 0;
  bool joint_finetune = false;
  int finetune_epochs = 0;     // 0 means epochs_per_stage
};

struct StageReport {
  int stage = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int epochs = 0;
  bool reverted = false;
  std::vector<double> epoch_loss;
};

struct TrainReport {
  std::vector<StageReport> stages;
};

// Greedy layerwise training: stage k tunes layers 1..k against the loss of
// the k-layer output, warm-starting from the previous stage. Each epoch is
// one gradient step with geometric backtracking; a stage whose final
// full-batch loss exceeds its initial one (or turns non-finite) is reverted
// to its warm start and flagged. The safeguard plays no role here. With
// joint_finetune set, a final extra pass retrains all layers.
// DistToSolution targets are computed by solve_reference over the split.
SchemeParams train_layerwise(const SchemeParams& init, const std::vector<ProblemInstance>& split,
                             const TrainConfig& config, TrainReport* report = nullptr);

}  // namespace safel2o
