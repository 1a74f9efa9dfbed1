// Acceptance gate: one self-contained check per release criterion, each
// printing a single PASS/FAIL line with its measured quantities and runtime.
// The process exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "safel2o/bench.hpp"
#include "safel2o/errors.hpp"
#include "safel2o/executor.hpp"
#include "safel2o/liadmm.hpp"
#include "safel2o/linalg.hpp"
#include "safel2o/problems.hpp"
#include "safel2o/reference.hpp"
#include "safel2o/rng.hpp"
#include "safel2o/safeguards.hpp"
#include "safel2o/schemes.hpp"
#include "safel2o/training.hpp"

using namespace safel2o;

namespace {

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return std::string(buf);
}

const std::vector<std::string> kGuards = {"gs:0.5", "rt", "aa", "ema:0.25", "rm:3"};

// ---------------------------------------------------------------------------
// 1. Safeguarded runs shrug off adversarial learned updates; the
//    unsafeguarded variant diverges.

CriterionResult safeguard_rescues_adversarial() {
  constexpr double kSafeLimit = 1e-5;    // mean final residual, every scheme
  constexpr double kUnsafeFloor = 1e3;   // unsafeguarded mean must exceed this
  constexpr int kIters = 5000;
  constexpr double kOffsetNorm = 10.0;

  GenSpec gs = make_gen_spec(ProblemKind::Lasso, Dist::Seen);
  gs.m = 50;
  gs.n = 100;
  gs.tau = 1e-3;
  gs.n_train = 20;
  gs.n_test = 1;
  gs.seed = 101;
  Dataset ds = generate_dataset(gs);

  Rng rng(7);
  Vector c = rng.normal_vector(gs.n);
  c *= kOffsetNorm / c.norm();
  L2OUpdate adversary{kIters, [c](const Vector& x, int) { return x + c; }};

  double worst_safe = 0.0, unsafe_mean = 0.0;
  std::string worst_name;
  for (const std::string& spec : kGuards) {
    SafeguardConfig cfg = parse_safeguard(spec, 0.99);
    double sum = 0.0;
    for (const ProblemInstance& p : ds.train) {
      FallbackOperator op = canonical_fallback(p);
      RunOptions ro;
      ro.total_iters = kIters;
      ro.tol = 1e-9;
      RunTrace trace = run_safe_l2o(adversary, op, cfg, op.zero_start(), ro);
      sum += trace.records.back().residual;
    }
    double mean = sum / double(ds.train.size());
    if (mean > worst_safe) {
      worst_safe = mean;
      worst_name = spec;
    }
  }
  for (const ProblemInstance& p : ds.train) {
    FallbackOperator op = canonical_fallback(p);
    RunOptions ro;
    ro.total_iters = kIters;
    ro.tol = 0.0;
    RunTrace trace = run_l2o(adversary, op.zero_start(), ro, &op);
    unsafe_mean += trace.records.back().residual;
  }
  unsafe_mean /= double(ds.train.size());

  bool pass = worst_safe <= kSafeLimit && unsafe_mean > kUnsafeFloor;
  return {pass, fmt("worst scheme (%s) mean residual %.2e (limit 1e-05); unsafeguarded %.2e (floor 1e+03)",
                    worst_name.c_str(), worst_safe, unsafe_mean)};
}

// ---------------------------------------------------------------------------
// 2. The linearized-ADMM residual formula equals the metric-space step
//    distance along real trajectories.

CriterionResult residual_identity() {
  constexpr double kTol = 1e-9;
  constexpr int kSteps = 100;

  GenSpec gs = make_gen_spec(ProblemKind::L1L1, Dist::Seen);
  gs.m = 5;
  gs.n = 8;
  gs.n_train = 20;
  gs.n_test = 1;
  gs.seed = 202;
  Dataset ds = generate_dataset(gs);

  double worst = 0.0;
  for (const ProblemInstance& p : ds.train) {
    FallbackOperator op = canonical_fallback(p);
    const LiadmmContext& ctx = op.liadmm_context();
    LiadmmState s = liadmm_unpack(op.zero_start(), ctx);
    for (int k = 0; k < kSteps; ++k) {
      double formula = op.residual(liadmm_pack(s));
      LiadmmState next = liadmm_step(s, ctx);
      double metric = (next.drs - s.drs).norm();
      worst = std::max(worst, std::abs(formula - metric));
      s = next;
    }
  }
  return {worst <= kTol, fmt("max |formula - step distance| %.2e over 20x%d steps (limit 1e-09)",
                             worst, kSteps)};
}

// ---------------------------------------------------------------------------
// 3. Reference-value decay laws on the always-accepted boundary stream, and
//    monotonicity on arbitrary streams.

CriterionResult mu_decay_laws() {
  constexpr double kSlack = 1e-12;
  constexpr double kAlpha = 0.5;
  constexpr int kSteps = 40;

  double worst_margin = -1.0;  // most positive (ratio - bound); must stay <= slack
  double worst_exact = 0.0;    // |ratio - bound| for the schemes where the law is exact
  for (const std::string& spec : kGuards) {
    SafeguardConfig cfg = parse_safeguard(spec, kAlpha);
    SafeguardState st(cfg, 1.0);
    for (int k = 0; k < kSteps; ++k) {
      double r = kAlpha * st.mu();
      if (!st.check(r)) return {false, fmt("boundary stream rejected by %s", spec.c_str())};
      st.update(r);
    }
    double ratio = st.mu();
    double bound = 0.0;
    bool exact_law = false;
    switch (cfg.kind) {
      case SafeguardKind::GeometricSequence:
        bound = std::pow(cfg.theta, kSteps);
        exact_law = true;
        break;
      case SafeguardKind::RecentTerm:
        bound = std::pow(kAlpha, kSteps);
        exact_law = true;
        break;
      case SafeguardKind::ArithmeticAverage:
        bound = 1.0;
        for (int l = 1; l <= kSteps; ++l) bound *= 1.0 - (1.0 - kAlpha) / (l + 1);
        break;
      case SafeguardKind::ExponentialMovingAverage:
        bound = std::pow(1.0 - cfg.theta * (1.0 - kAlpha), kSteps);
        exact_law = true;
        break;
      case SafeguardKind::RecentMax:
        bound = std::pow(kAlpha, kSteps / cfg.window);
        break;
    }
    worst_margin = std::max(worst_margin, ratio - bound);
    if (exact_law) worst_exact = std::max(worst_exact, std::abs(ratio - bound));
  }

  bool monotone = true;
  for (const std::string& spec : kGuards) {
    SafeguardState st(parse_safeguard(spec, 0.9), 2.0);
    Rng rng(33);
    double prev = st.mu();
    for (int k = 0; k < 500; ++k) {
      st.update(3.0 * std::abs(rng.normal()));
      if (st.mu() > prev) monotone = false;
      prev = st.mu();
    }
  }

  bool pass = worst_margin <= kSlack && worst_exact <= kSlack && monotone;
  return {pass, fmt("worst (ratio - bound) %.2e, exact-law error %.2e (slack 1e-12), monotone %s",
                    worst_margin, worst_exact, monotone ? "yes" : "NO")};
}

// ---------------------------------------------------------------------------
// 4. Proximal-gradient objective descent at paper scale.

CriterionResult ista_monotone() {
  constexpr double kTol = 1e-12;  // allowed increase, scaled by max(1, f)
  constexpr int kIters = 1000;

  GenSpec gs = make_gen_spec(ProblemKind::Lasso, Dist::Seen);
  gs.n_train = 10;
  gs.n_test = 1;
  gs.seed = 404;
  Dataset ds = generate_dataset(gs);  // default 250 x 500, tau 1e-3

  double worst = 0.0;
  for (const ProblemInstance& p : ds.train) {
    FallbackOperator op = canonical_fallback(p);
    RunOptions ro;
    ro.total_iters = kIters;
    ro.tol = 0.0;
    ro.objective = [&p](const Vector& pt) { return point_objective(p, pt); };
    RunTrace trace = run_km(op, op.zero_start(), ro);
    for (std::size_t i = 1; i < trace.records.size(); ++i) {
      double prev = trace.records[i - 1].objective;
      double rise = (trace.records[i].objective - prev) / std::max(1.0, std::abs(prev));
      worst = std::max(worst, rise);
    }
  }
  return {worst <= kTol, fmt("worst scaled objective rise %.2e over 10x%d steps (limit 1e-12)",
                             worst, kIters)};
}

// ---------------------------------------------------------------------------
// Shared desk-scale model for criteria 5 and 6.

struct TrainedScale {
  Dataset seen;
  Dataset unseen;
  SchemeParams params{};
  int stages = 0;
  int epochs = 0;
  double train_seconds = 0.0;
  std::vector<Vector> seen_refs;    // filled by criterion 5
  std::vector<Vector> unseen_refs;  // filled by criterion 6
};

constexpr int kDepth = 16;
constexpr int kTrainEpochs = 100;

TrainedScale& trained_scale() {
  static TrainedScale ts = [] {
    TrainedScale t;
    GenSpec seen = make_gen_spec(ProblemKind::Lasso, Dist::Seen);
    seen.m = 100;
    seen.n = 200;
    seen.tau = 1e-3;
    seen.n_train = 1000;
    seen.n_test = 200;
    seen.seed = 42;
    t.seen = generate_dataset(seen);

    GenSpec unseen = make_gen_spec(ProblemKind::Lasso, Dist::Unseen);
    unseen.m = seen.m;
    unseen.n = seen.n;
    unseen.tau = seen.tau;
    unseen.n_train = 1;
    unseen.n_test = 100;
    unseen.seed = seen.seed;  // same seed and shape: shared dictionary
    t.unseen = generate_dataset(unseen);
    if ((t.unseen.A() - t.seen.A()).norm() != 0.0)
      throw NumericError("distribution shift is supposed to keep the dictionary", 0.0);

    SchemeParams init = init_scheme(SchemeKind::Alista, t.seen.train.front(), kDepth);
    TrainConfig cfg;
    cfg.loss = LossKind::Objective;
    cfg.epochs_per_stage = kTrainEpochs;
    auto t0 = std::chrono::steady_clock::now();
    TrainReport report;
    t.params = train_layerwise(init, t.seen.train, cfg, &report);
    t.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    t.stages = static_cast<int>(report.stages.size());
    t.epochs = cfg.epochs_per_stage;
    return t;
  }();
  return ts;
}

std::vector<Vector> reference_points(const std::vector<ProblemInstance>& split, double tol) {
  std::vector<Reference> refs = solve_references(split, tol, 400000);
  std::vector<Vector> out;
  out.reserve(refs.size());
  for (Reference& r : refs) out.push_back(std::move(r.x));
  return out;
}

// 5. Trained 16-layer model beats the conventional method's 200th iterate on
//    the seen distribution.

CriterionResult trained_speedup() {
  constexpr int kConventionalIters = 200;

  TrainedScale& ts = trained_scale();
  if (ts.seen_refs.empty()) ts.seen_refs = reference_points(ts.seen.test, 1e-11);

  BenchOptions opt;
  opt.total_iters = kConventionalIters;
  opt.tol = 0.0;
  opt.mode = RunMode::Km;
  BenchResult km = run_bench(ts.seen.test, nullptr, ts.seen_refs, opt);

  opt.mode = RunMode::L2O;
  opt.total_iters = kDepth;
  BenchResult l2o = run_bench(ts.seen.test, &ts.params, ts.seen_refs, opt);

  double learned = l2o.rows.back().rel_error;       // layer-16 output
  double conventional = km.rows.back().rel_error;   // iterate 200
  bool pass = learned <= conventional;
  return {pass,
          fmt("learned@%d rel error %.2e vs conventional@%d %.2e (trained %d stages x %d epochs, %.0fs)",
              kDepth, learned, kConventionalIters, conventional, ts.stages, ts.epochs,
              ts.train_seconds)};
}

// 6. The same model on the shifted distribution: the safeguarded run stays
//    within 10% of the conventional method, actually uses the fallback, and
//    beats the unsafeguarded variant at the learned depth.

CriterionResult unseen_rescue() {
  constexpr int kIters = 2000;
  constexpr double kSlack = 1.1;

  TrainedScale& ts = trained_scale();
  if (ts.unseen_refs.empty()) ts.unseen_refs = reference_points(ts.unseen.test, 1e-11);

  BenchOptions opt;
  opt.total_iters = kIters;
  opt.tol = 1e-11;

  opt.mode = RunMode::Km;
  BenchResult km = run_bench(ts.unseen.test, nullptr, ts.unseen_refs, opt);

  opt.mode = RunMode::Safe;
  opt.safeguard = parse_safeguard("ema:0.25", 0.99);
  BenchResult safe = run_bench(ts.unseen.test, &ts.params, ts.unseen_refs, opt);

  opt.mode = RunMode::L2O;
  BenchResult l2o = run_bench(ts.unseen.test, &ts.params, ts.unseen_refs, opt);

  double safe_final = safe.rows.back().rel_error;
  double km_final = km.rows.back().rel_error;
  double safe_at_depth = safe.rows[kDepth].rel_error;      // record k = depth + 1
  double unsafe_at_depth = l2o.rows[kDepth].rel_error;
  double max_freq = 0.0;
  for (int i = 1; i <= kDepth; ++i)
    max_freq = std::max(max_freq, safe.rows[i].fallback_frequency);

  bool pass = safe_final <= kSlack * km_final && max_freq > 0.0 &&
              unsafe_at_depth > safe_at_depth;
  return {pass,
          fmt("safe@%d rel %.2e vs %.1fx conventional %.2e; peak fallback freq %.2f; "
              "unsafe@%d %.2e > safe %.2e",
              kIters, safe_final, kSlack, km_final, max_freq, kDepth, unsafe_at_depth,
              safe_at_depth)};
}

// ---------------------------------------------------------------------------
// 7. Freshly initialized layers reproduce their conventional algorithms.

CriterionResult init_equivalence() {
  constexpr double kTol = 1e-12;
  constexpr int kSteps = 100;

  double worst = 0.0;
  {
    GenSpec gs = make_gen_spec(ProblemKind::Lasso, Dist::Seen);
    gs.m = 30;
    gs.n = 50;
    gs.n_train = 1;
    gs.n_test = 1;
    gs.seed = 707;
    ProblemInstance p = generate_dataset(gs).train.front();
    SchemeParams sp = init_scheme(SchemeKind::ListaCp, p, 1);
    FallbackOperator op = canonical_fallback(p);
    Vector learned = op.zero_start(), conventional = op.zero_start();
    for (int k = 0; k < kSteps; ++k) {
      learned = listacp_layer(learned, sp.listacp[0], p.A(), p.obs);
      conventional = op.apply(conventional);
      worst = std::max(worst, (learned - conventional).norm() / (1.0 + conventional.norm()));
    }
  }
  {
    GenSpec gs = make_gen_spec(ProblemKind::Nnls, Dist::Seen);
    gs.m = 40;
    gs.n = 25;
    gs.n_train = 1;
    gs.n_test = 1;
    gs.seed = 708;
    ProblemInstance p = generate_dataset(gs).train.front();
    SchemeParams sp = init_scheme(SchemeKind::NnlsPg, p, 1);
    FallbackOperator op = canonical_fallback(p);
    Vector learned = op.zero_start(), conventional = op.zero_start();
    for (int k = 0; k < kSteps; ++k) {
      learned = nnlspg_layer(learned, sp.nnlspg[0], p.A(), p.obs);
      conventional = op.apply(conventional);
      worst = std::max(worst, (learned - conventional).norm() / (1.0 + conventional.norm()));
    }
  }
  return {worst <= kTol,
          fmt("max per-step relative deviation %.2e over %d steps (limit 1e-12)", worst, kSteps)};
}

// ---------------------------------------------------------------------------
// 8. The analytic weight satisfies its unit-diagonal constraint and is not
//    beaten by random feasible perturbations.

CriterionResult weight_optimality() {
  constexpr double kConstraintTol = 1e-10;
  constexpr double kImproveTol = 1e-8;
  constexpr int kTrials = 1000;

  Rng rng(808);
  Matrix a = rng.normal_matrix(20, 40);
  for (int l = 0; l < a.cols(); ++l) a.col(l) /= a.col(l).norm();

  Matrix w = alista_weight(a);
  Matrix g = w.transpose() * a;
  double constraint = 0.0;
  for (int l = 0; l < a.cols(); ++l) constraint = std::max(constraint, std::abs(g(l, l) - 1.0));
  double base = g.norm();

  const double scales[] = {1e-3, 1e-2, 1e-1, 1.0};
  double best_improvement = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    Matrix e = rng.normal_matrix(20, 40, scales[t % 4]);
    for (int l = 0; l < a.cols(); ++l)
      e.col(l) -= a.col(l) * (a.col(l).dot(e.col(l)) / a.col(l).squaredNorm());
    Matrix candidate = (w + e).transpose() * a;
    best_improvement = std::max(best_improvement, base - candidate.norm());
  }
  bool pass = constraint <= kConstraintTol && best_improvement <= kImproveTol;
  return {pass, fmt("constraint residual %.2e (limit 1e-10); best feasible improvement %.2e "
                    "over %d trials (limit 1e-08)",
                    constraint, best_improvement, kTrials)};
}

// ---------------------------------------------------------------------------
// 9. Analytic gradients match central differences on kink-free points.

double vector_scheme_margin(const SchemeParams& sp, int depth, const Matrix& obs, const Matrix& a) {
  double margin = std::numeric_limits<double>::infinity();
  for (int c = 0; c < obs.cols(); ++c) {
    Vector x = Vector::Zero(a.cols());
    for (int k = 0; k < depth; ++k) {
      Vector fit = a * x - obs.col(c);
      switch (sp.kind) {
        case SchemeKind::Alista: {
          Vector v = x - sp.alista[k].step * (sp.shared_weight.transpose() * fit);
          for (int i = 0; i < v.size(); ++i)
            margin = std::min(margin, std::abs(std::abs(v[i]) - sp.alista[k].threshold));
          x = alista_layer(x, sp.alista[k], a, sp.shared_weight, obs.col(c));
          break;
        }
        case SchemeKind::ListaCp: {
          Vector v = x - sp.listacp[k].weight.transpose() * fit;
          for (int i = 0; i < v.size(); ++i)
            margin = std::min(margin, std::abs(std::abs(v[i]) - sp.listacp[k].threshold));
          x = listacp_layer(x, sp.listacp[k], a, obs.col(c));
          break;
        }
        case SchemeKind::NnlsPg: {
          Vector v = x - sp.nnlspg[k].step_matrix * fit;
          for (int i = 0; i < v.size(); ++i) margin = std::min(margin, std::abs(v[i]));
          x = nnlspg_layer(x, sp.nnlspg[k], a, obs.col(c));
          break;
        }
        default:
          throw ConfigError("margin: unexpected scheme kind");
      }
    }
  }
  return margin;
}

double dladmm_margin(const SchemeParams& sp, int depth, const Matrix& obs, const Matrix& a) {
  int m = static_cast<int>(a.rows()), n = static_cast<int>(a.cols());
  double margin = std::numeric_limits<double>::infinity();
  for (int c = 0; c < obs.cols(); ++c) {
    Vector t = Vector::Zero(n + 2 * m);
    for (int k = 0; k < depth; ++k) {
      const DladmmLayer& l = sp.dladmm[k];
      Vector x = t.head(n), z = t.segment(n, m), nu = t.tail(m), d = obs.col(c);
      Vector drive = nu + l.constraint_step.cwiseProduct(a * x - z - d);
      Vector vx = x - l.x_step.cwiseProduct(sp.shared_weight.transpose() * drive);
      for (int i = 0; i < n; ++i)
        margin = std::min(margin, std::abs(std::abs(vx[i]) - l.x_threshold[i]));
      t = dladmm_layer(t, l, sp.shared_weight, a, d);
      Vector drive_mid = nu + l.constraint_step.cwiseProduct(a * t.head(n) - z - d);
      Vector vz = z + l.z_step.cwiseProduct(drive_mid);
      for (int i = 0; i < m; ++i)
        margin = std::min(margin, std::abs(std::abs(vz[i]) - l.z_threshold[i]));
    }
    // the l1 data term of the loss has kinks at zero fit rows
    Vector fit = a * t.head(n) - obs.col(c);
    for (int i = 0; i < m; ++i) margin = std::min(margin, std::abs(fit[i]));
  }
  return margin;
}

CriterionResult gradient_agreement() {
  constexpr double kTol = 1e-4;
  constexpr double kMargin = 1e-3;  // required distance from every kink
  constexpr int kPoints = 50;
  constexpr int kDepthHere = 2;

  GenSpec lasso = make_gen_spec(ProblemKind::Lasso, Dist::Seen);
  lasso.m = 4;
  lasso.n = 7;
  lasso.tau = 0.15;
  lasso.n_train = 1;
  lasso.n_test = 1;
  lasso.seed = 909;
  ProblemInstance lasso_p = generate_dataset(lasso).train.front();

  GenSpec nnls = make_gen_spec(ProblemKind::Nnls, Dist::Seen);
  nnls.m = 7;
  nnls.n = 4;
  nnls.n_train = 1;
  nnls.n_test = 1;
  nnls.seed = 910;
  ProblemInstance nnls_p = generate_dataset(nnls).train.front();

  GenSpec l1l1 = make_gen_spec(ProblemKind::L1L1, Dist::Seen);
  l1l1.m = 4;
  l1l1.n = 6;
  l1l1.n_train = 1;
  l1l1.n_test = 1;
  l1l1.seed = 911;
  ProblemInstance l1l1_p = generate_dataset(l1l1).train.front();

  double worst = 0.0;
  int resamples = 0;
  Rng rng(912);
  for (SchemeKind kind :
       {SchemeKind::Alista, SchemeKind::ListaCp, SchemeKind::NnlsPg, SchemeKind::Dladmm}) {
    const ProblemInstance& p = kind == SchemeKind::NnlsPg ? nnls_p
                               : kind == SchemeKind::Dladmm ? l1l1_p
                                                            : lasso_p;
    TrainSetup setup = train_setup(p);
    for (int point = 0; point < kPoints; ++point) {
      SchemeParams sp = init_scheme(kind, p, kDepthHere);
      TrainBatch batch;
      double margin = 0.0;
      for (int attempt = 0; attempt < 200; ++attempt) {
        sp = init_scheme(kind, p, kDepthHere);
        for (double* v : trainable_ptrs(sp, kDepthHere)) *v *= 1.0 + 0.10 * rng.normal();
        batch.obs.resize(p.m(), 3);
        for (int c = 0; c < 3; ++c) batch.obs.col(c) = rng.normal_vector(p.m());
        margin = kind == SchemeKind::Dladmm
                     ? dladmm_margin(sp, kDepthHere, batch.obs, p.A())
                     : vector_scheme_margin(sp, kDepthHere, batch.obs, p.A());
        if (margin > kMargin) break;
        ++resamples;
      }
      if (margin <= kMargin) return {false, "could not find a kink-free point"};

      SchemeParams ga = scheme_gradient(sp, kDepthHere, batch, LossKind::Objective, setup,
                                        GradMode::Analytic);
      SchemeParams gf = scheme_gradient(sp, kDepthHere, batch, LossKind::Objective, setup,
                                        GradMode::FiniteDiff);
      std::vector<double*> pa = trainable_ptrs(ga, kDepthHere), pb = trainable_ptrs(gf, kDepthHere);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < pa.size(); ++i) {
        num += (*pa[i] - *pb[i]) * (*pa[i] - *pb[i]);
        den += *pb[i] * *pb[i];
      }
      worst = std::max(worst, std::sqrt(num) / (1.0 + std::sqrt(den)));
    }
  }
  return {worst <= kTol,
          fmt("max normwise deviation %.2e over 4x%d points (limit 1e-04), %d resamples", worst,
              kPoints, resamples)};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* title;
    std::function<CriterionResult()> run;
  };
  const std::vector<Entry> entries = {
      {1, "safeguard rescues adversarial learned updates", safeguard_rescues_adversarial},
      {2, "linearized-ADMM residual identity", residual_identity},
      {3, "reference-value decay laws", mu_decay_laws},
      {4, "proximal-gradient objective monotonicity", ista_monotone},
      {5, "trained model beats the conventional method on seen data", trained_speedup},
      {6, "safeguard rescues the model on the shifted distribution", unseen_rescue},
      {7, "fresh layers reproduce their conventional algorithms", init_equivalence},
      {8, "analytic weight feasibility and optimality", weight_optimality},
      {9, "analytic gradients match finite differences", gradient_agreement},
  };

  int failures = 0;
  for (const Entry& e : entries) {
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = e.run();
    } catch (const std::exception& ex) {
      r = {false, std::string("exception: ") + ex.what()};
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  criterion %d: %s — %s  [%.1fs]\n", r.pass ? "PASS" : "FAIL", e.id, e.title,
                r.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!r.pass) ++failures;
  }
  std::printf("acceptance: %d passed, %d failed\n", int(entries.size()) - failures, failures);
  return failures;
}
