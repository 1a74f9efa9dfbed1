#include "safel2o/problems.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "safel2o/errors.hpp"
#include "safel2o/linalg.hpp"
#include "safel2o/rng.hpp"

namespace safel2o {

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Lasso: return "lasso";
    case ProblemKind::L1L1: return "l1l1";
    case ProblemKind::Nnls: return "nnls";
  }
  throw ConfigError("unknown problem kind");
}

ProblemKind problem_kind_from_string(const std::string& name) {
  if (name == "lasso") return ProblemKind::Lasso;
  if (name == "l1l1") return ProblemKind::L1L1;
  if (name == "nnls") return ProblemKind::Nnls;
  throw ConfigError("unknown problem kind '" + name + "' (expected lasso|l1l1|nnls)");
}

std::string to_string(Dist dist) { return dist == Dist::Seen ? "seen" : "unseen"; }

Dist dist_from_string(const std::string& name) {
  if (name == "seen") return Dist::Seen;
  if (name == "unseen") return Dist::Unseen;
  throw ConfigError("unknown distribution tag '" + name + "' (expected seen|unseen)");
}

double objective(const ProblemInstance& p, const Vector& x) {
  if (x.size() != p.n()) throw ConfigError("objective: point has wrong dimension");
  Vector r = p.A() * x - p.obs;
  switch (p.kind) {
    case ProblemKind::Lasso: return 0.5 * r.squaredNorm() + p.tau * x.lpNorm<1>();
    case ProblemKind::L1L1: return r.lpNorm<1>() + p.tau * x.lpNorm<1>();
    case ProblemKind::Nnls: return 0.5 * r.squaredNorm();
  }
  throw ConfigError("unknown problem kind");
}

double point_objective(const ProblemInstance& p, const Vector& point) {
  if (point.size() == p.n()) return objective(p, point);
  if (point.size() == p.n() + 2 * p.m()) return objective(p, Vector(point.head(p.n())));
  throw ConfigError("point_objective: point has wrong dimension");
}

GenSpec make_gen_spec(ProblemKind kind, Dist dist) {
  GenSpec s;
  s.kind = kind;
  s.dist = dist;
  bool unseen = dist == Dist::Unseen;
  switch (kind) {
    case ProblemKind::Lasso:
      s.m = 250;
      s.n = 500;
      s.tau = 1e-3;
      s.dict_stddev = 1.0 / std::sqrt(double(s.m));
      s.normalize_columns = true;
      s.code = unseen ? SparsitySpec{0.2, 0.0, std::sqrt(2.0)} : SparsitySpec{0.1, 0.0, 1.0};
      s.noise = SparsitySpec{1.0, 0.0, 1.0 / std::sqrt(double(s.m))};
      s.noise_scale = 0.1;
      break;
    case ProblemKind::L1L1:
      s.m = 250;
      s.n = 500;
      s.tau = 1.0;
      s.dict_stddev = 1.0 / std::sqrt(double(s.m));
      s.normalize_columns = true;
      s.code = unseen ? SparsitySpec{0.2, 0.0, std::sqrt(2.0)} : SparsitySpec{0.1, 0.0, 1.0};
      s.noise = s.code;  // noise follows the code's law
      s.noise_sparse = true;
      break;
    case ProblemKind::Nnls:
      s.m = 500;
      s.n = 250;
      s.tau = 0.0;
      s.dict_stddev = 1.0;
      s.normalize_columns = false;
      s.code = unseen ? SparsitySpec{1.0, 5.0, std::sqrt(5.0)} : SparsitySpec{1.0, 0.0, 1.0};
      s.code_rectified = true;
      s.noise = SparsitySpec{1.0, 0.0, 1.0 / std::sqrt(double(s.m))};
      break;
  }
  return s;
}

namespace {

Vector draw_code(Rng& rng, const GenSpec& s) {
  if (s.code_rectified) {
    Vector v = rng.normal_vector(s.n, s.code.mean, s.code.stddev);
    return v.cwiseMax(0.0);
  }
  return rng.sparse_normal_vector(s.n, s.code.density, s.code.mean, s.code.stddev);
}

Vector draw_noise(Rng& rng, const GenSpec& s) {
  Vector e = s.noise_sparse
                 ? rng.sparse_normal_vector(s.m, s.noise.density, s.noise.mean, s.noise.stddev)
                 : rng.normal_vector(s.m, s.noise.mean, s.noise.stddev);
  if (s.noise_scale != 1.0) e *= s.noise_scale;
  return e;
}

ProblemInstance draw_instance(Rng& rng, const GenSpec& s, const std::shared_ptr<const Matrix>& dict,
                              double gram_norm) {
  ProblemInstance p;
  p.kind = s.kind;
  p.dict = dict;
  p.tau = s.tau;
  p.gram_norm = gram_norm;
  p.gen_code = draw_code(rng, s);
  p.obs = (*dict) * p.gen_code + draw_noise(rng, s);
  return p;
}

}  // namespace

Dataset generate_dataset(const GenSpec& spec) {
  if (spec.m <= 0 || spec.n <= 0) throw ConfigError("generate_dataset: dimensions must be positive");
  if (spec.n_train < 0 || spec.n_test < 0)
    throw ConfigError("generate_dataset: instance counts must be nonnegative");
  Rng rng(spec.seed);
  Matrix a = rng.normal_matrix(spec.m, spec.n, spec.dict_stddev);
  if (spec.normalize_columns) {
    for (int j = 0; j < spec.n; ++j) {
      double norm = a.col(j).norm();
      if (norm == 0.0) throw NumericError("generate_dataset: zero dictionary column");
      a.col(j) /= norm;
    }
  }
  Dataset ds;
  ds.kind = spec.kind;
  ds.dist = spec.dist;
  ds.seed = spec.seed;
  ds.tau = spec.tau;
  ds.dict = std::make_shared<Matrix>(std::move(a));
  ds.gram_norm = spectral_norm_sq(*ds.dict);
  ds.train.reserve(spec.n_train);
  for (int i = 0; i < spec.n_train; ++i) ds.train.push_back(draw_instance(rng, spec, ds.dict, ds.gram_norm));
  ds.test.reserve(spec.n_test);
  for (int i = 0; i < spec.n_test; ++i) ds.test.push_back(draw_instance(rng, spec, ds.dict, ds.gram_norm));
  return ds;
}

namespace {

void put(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void put_row(std::string& out, const char* tag, const Vector& v) {
  if (tag != nullptr && *tag) {
    out += tag;
    out += ' ';
  }
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    put(out, v[i]);
  }
  out += '\n';
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
  std::string out;
  char head[256];
  std::snprintf(head, sizeof head, "safel2o_dataset 1 %s %d %d %.17g %zu %zu %" PRIu64 " %s\n",
                to_string(ds.kind).c_str(), ds.m(), ds.n(), ds.tau, ds.train.size(),
                ds.test.size(), ds.seed, to_string(ds.dist).c_str());
  out += head;
  const Matrix& a = ds.A();
  for (int i = 0; i < a.rows(); ++i) put_row(out, "", Vector(a.row(i)));
  for (const auto* split : {&ds.train, &ds.test}) {
    for (const auto& p : *split) {
      put_row(out, "d", p.obs);
      put_row(out, "code", p.gen_code);
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("save_dataset: cannot open '" + path + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw ConfigError("save_dataset: write failed for '" + path + "'");
}

namespace {

Vector parse_row(std::istream& in, const char* expected_tag, int count, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("load_dataset: truncated file '" + path + "'");
  std::istringstream ls(line);
  if (expected_tag != nullptr && *expected_tag) {
    std::string tag;
    ls >> tag;
    if (tag != expected_tag)
      throw ConfigError("load_dataset: expected '" + std::string(expected_tag) + "' row in '" +
                        path + "'");
  }
  Vector v(count);
  for (int i = 0; i < count; ++i) {
    if (!(ls >> v[i])) throw ConfigError("load_dataset: short row in '" + path + "'");
  }
  return v;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("load_dataset: cannot open '" + path + "'");
  std::string magic, kind, dist;
  int version = 0, m = 0, n = 0;
  std::size_t n_train = 0, n_test = 0;
  double tau = 0.0;
  std::uint64_t seed = 0;
  std::string header;
  if (!std::getline(f, header)) throw ConfigError("load_dataset: empty file '" + path + "'");
  std::istringstream hs(header);
  hs >> magic >> version >> kind >> m >> n >> tau >> n_train >> n_test >> seed >> dist;
  if (!hs || magic != "safel2o_dataset" || version != 1)
    throw ConfigError("load_dataset: '" + path + "' is not a version-1 dataset file");
  if (m <= 0 || n <= 0) throw ConfigError("load_dataset: bad dimensions in '" + path + "'");
  Dataset ds;
  ds.kind = problem_kind_from_string(kind);
  ds.dist = dist_from_string(dist);
  ds.seed = seed;
  ds.tau = tau;
  Matrix a(m, n);
  for (int i = 0; i < m; ++i) a.row(i) = parse_row(f, "", n, path).transpose();
  ds.dict = std::make_shared<Matrix>(std::move(a));
  ds.gram_norm = spectral_norm_sq(*ds.dict);
  auto read_split = [&](std::size_t count, std::vector<ProblemInstance>& out) {
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      ProblemInstance p;
      p.kind = ds.kind;
      p.dict = ds.dict;
      p.tau = ds.tau;
      p.gram_norm = ds.gram_norm;
      p.obs = parse_row(f, "d", m, path);
      p.gen_code = parse_row(f, "code", n, path);
      out.push_back(std::move(p));
    }
  };
  read_split(n_train, ds.train);
  read_split(n_test, ds.test);
  return ds;
}

double relative_error(const std::vector<double>& values, const std::vector<double>& ref_values) {
  if (values.size() != ref_values.size() || values.empty())
    throw ConfigError("relative_error: batches must be nonempty and the same size");
  double sum = 0.0, ref_sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    ref_sum += ref_values[i];
  }
  if (!(ref_sum > 0.0)) throw ConfigError("relative_error: reference mean must be positive");
  return (sum - ref_sum) / ref_sum;
}

}  // namespace safel2o
