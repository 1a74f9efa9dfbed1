#include "safel2o/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "safel2o/errors.hpp"
#include "safel2o/executor.hpp"
#include "safel2o/reference.hpp"

namespace safel2o {

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Km: return "km";
    case RunMode::L2O: return "l2o";
    case RunMode::Safe: return "safe";
  }
  throw ConfigError("unknown run mode");
}

RunMode run_mode_from_string(const std::string& name) {
  if (name == "km") return RunMode::Km;
  if (name == "l2o") return RunMode::L2O;
  if (name == "safe") return RunMode::Safe;
  throw ConfigError("unknown mode '" + name + "' (expected km|l2o|safe)");
}

namespace {

// Index-sharded pool; slot i is written only by the worker owning i, so the
// caller sees the same result regardless of the worker count.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (threads > count) threads = count;
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_lock;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t]() {
      try {
        for (int i = t; i < count; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> hold(error_lock);
        if (!first_error) first_error = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Per-instance trace flattened to fixed length `rows` by repeating the last
// record (a run that stopped early sits at a fixed point).
struct FlatTrace {
  std::vector<double> objective, residual, mu;
  std::vector<unsigned char> fallback;
};

FlatTrace flatten(const RunTrace& trace, int rows) {
  FlatTrace f;
  f.objective.resize(rows);
  f.residual.resize(rows);
  f.mu.resize(rows);
  f.fallback.resize(rows);
  if (trace.records.empty()) throw NumericError("empty trace", kNan);
  for (int i = 0; i < rows; ++i) {
    const TraceRecord& r =
        trace.records[std::min<std::size_t>(i, trace.records.size() - 1)];
    f.objective[i] = r.objective;
    f.residual[i] = r.residual;
    f.mu[i] = r.mu;
    f.fallback[i] = r.used_fallback ? 1 : 0;
  }
  return f;
}

}  // namespace

BenchResult run_bench(const std::vector<ProblemInstance>& split, const SchemeParams* params,
                      const std::vector<Vector>& reference_points, const BenchOptions& opt) {
  if (split.empty()) throw ConfigError("run: empty instance split");
  if (opt.total_iters < 1) throw ConfigError("run: total_iters must be >= 1");
  if (opt.mode != RunMode::Km && !params)
    throw ConfigError("run: learned modes need scheme parameters");
  if (reference_points.size() != split.size())
    throw ConfigError("run: reference count does not match the split");

  int count = static_cast<int>(split.size());
  int depth = opt.mode == RunMode::Km ? 0 : params->depth();
  int rows = opt.mode == RunMode::L2O ? std::min(depth, opt.total_iters) + 1
                                      : opt.total_iters + 1;

  std::vector<double> ref_values(count);
  for (int i = 0; i < count; ++i) ref_values[i] = objective(split[i], reference_points[i]);

  BenchResult out;
  out.instances = count;
  out.depth = depth;
  out.rows.resize(rows);

  std::vector<double> sum_obj(rows, 0.0), sum_res(rows, 0.0), sum_mu(rows, 0.0);
  std::vector<long> fb_count(rows, 0);
  double sum_ref = 0.0;
  for (double v : ref_values) sum_ref += v;
  if (!(sum_ref > 0.0)) throw ConfigError("run: reference objectives must have positive mean");

  const int block = 32;
  std::vector<FlatTrace> flats(std::min(block, count));
  for (int begin = 0; begin < count; begin += block) {
    int width = std::min(block, count - begin);
    parallel_for(width, opt.threads, [&](int j) {
      const ProblemInstance& p = split[begin + j];
      FallbackOperator op = canonical_fallback(p);
      RunOptions ro;
      ro.total_iters = opt.total_iters;
      ro.tol = opt.tol;
      ro.objective = [&p](const Vector& pt) { return point_objective(p, pt); };
      RunTrace trace;
      switch (opt.mode) {
        case RunMode::Km:
          trace = run_km(op, op.zero_start(), ro);
          break;
        case RunMode::L2O: {
          L2OUpdate update = make_update(*params, p);
          trace = run_l2o(update, op.zero_start(), ro, &op);
          break;
        }
        case RunMode::Safe: {
          L2OUpdate update = make_update(*params, p);
          trace = run_safe_l2o(update, op, opt.safeguard, op.zero_start(), ro);
          break;
        }
      }
      flats[j] = flatten(trace, rows);
    });
    for (int j = 0; j < width; ++j)
      for (int k = 0; k < rows; ++k) {
        sum_obj[k] += flats[j].objective[k];
        sum_res[k] += flats[j].residual[k];
        sum_mu[k] += flats[j].mu[k];
        fb_count[k] += flats[j].fallback[k];
      }
  }

  for (int k = 0; k < rows; ++k) {
    BenchRow& row = out.rows[k];
    row.k = k + 1;
    row.rel_error = (sum_obj[k] - sum_ref) / sum_ref;
    row.mean_residual = sum_res[k] / count;
    row.mean_mu = opt.mode == RunMode::Safe ? sum_mu[k] / count : kNan;
    switch (opt.mode) {
      case RunMode::Km: row.fallback_frequency = 1.0; break;
      case RunMode::L2O: row.fallback_frequency = 0.0; break;
      case RunMode::Safe:
        row.fallback_frequency = static_cast<double>(fb_count[k]) / count;
        break;
    }
    row.extension = (opt.mode == RunMode::Safe && depth > 0 && row.k > depth + 1) ? 1 : 0;
  }
  return out;
}

namespace {

bool try_load_refs(const std::string& path, const std::string& dataset_hash, int count, int n,
                   std::vector<Vector>& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::string magic, hash;
  int version = 0, file_count = 0, file_n = 0;
  in >> magic >> version >> hash >> file_count >> file_n;
  std::string want = dataset_hash.empty() ? "-" : dataset_hash;
  if (!in || magic != "safel2o_refs" || version != 1 || hash != want || file_count != count ||
      file_n != n)
    return false;
  out.assign(count, Vector(n));
  std::string tag;
  for (int i = 0; i < count; ++i) {
    in >> tag;
    if (tag != "x") return false;
    for (int j = 0; j < n; ++j) in >> out[i][j];
  }
  return static_cast<bool>(in);
}

}  // namespace

std::vector<Vector> load_or_solve_references(const std::vector<ProblemInstance>& split,
                                             const std::string& cache_path,
                                             const std::string& dataset_hash, int threads) {
  if (split.empty()) throw ConfigError("references: empty split");
  int count = static_cast<int>(split.size());
  int n = split.front().n();
  std::vector<Vector> out;
  if (!cache_path.empty() && try_load_refs(cache_path, dataset_hash, count, n, out)) return out;

  out.assign(count, Vector());
  parallel_for(count, threads, [&](int i) { out[i] = solve_reference(split[i]).x; });

  if (!cache_path.empty()) {
    std::ofstream file(cache_path);
    if (!file) throw ConfigError("references: cannot write cache file " + cache_path);
    std::ostringstream text;
    text << "safel2o_refs 1 " << (dataset_hash.empty() ? "-" : dataset_hash) << " " << count
         << " " << n << "\n";
    char buf[64];
    for (const Vector& x : out) {
      text << "x";
      for (int j = 0; j < n; ++j) {
        std::snprintf(buf, sizeof buf, " %.17g", x[j]);
        text << buf;
      }
      text << "\n";
    }
    file << text.str();
  }
  return out;
}

}  // namespace safel2o
