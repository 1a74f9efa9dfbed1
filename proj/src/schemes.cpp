#include "safel2o/schemes.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "safel2o/errors.hpp"
#include "safel2o/hash.hpp"
#include "safel2o/prox.hpp"

namespace safel2o {

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::Alista: return "alista";
    case SchemeKind::ListaCp: return "listacp";
    case SchemeKind::Dladmm: return "dladmm";
    case SchemeKind::NnlsPg: return "nnlspg";
  }
  throw ConfigError("unknown scheme kind");
}

SchemeKind scheme_kind_from_string(const std::string& name) {
  if (name == "alista") return SchemeKind::Alista;
  if (name == "listacp") return SchemeKind::ListaCp;
  if (name == "dladmm") return SchemeKind::Dladmm;
  if (name == "nnlspg") return SchemeKind::NnlsPg;
  throw ConfigError("unknown scheme kind '" + name + "' (expected alista|listacp|dladmm|nnlspg)");
}

int SchemeParams::depth() const {
  switch (kind) {
    case SchemeKind::Alista: return static_cast<int>(alista.size());
    case SchemeKind::ListaCp: return static_cast<int>(listacp.size());
    case SchemeKind::Dladmm: return static_cast<int>(dladmm.size());
    case SchemeKind::NnlsPg: return static_cast<int>(nnlspg.size());
  }
  throw ConfigError("unknown scheme kind");
}

Matrix alista_weight(const Matrix& a) {
  int n = static_cast<int>(a.cols());
  for (int j = 0; j < n; ++j)
    if (a.col(j).norm() == 0.0) throw ConfigError("alista_weight: zero dictionary column");
  Eigen::LLT<Matrix> gram(Matrix(a * a.transpose()));
  if (gram.info() != Eigen::Success)
    throw NumericError("alista_weight: A A^T is singular (dictionary not full row rank)");
  Matrix w = gram.solve(a);  // columns (A A^T)^{-1} a_l
  for (int j = 0; j < n; ++j) {
    double denom = a.col(j).dot(w.col(j));
    if (!(denom > 0.0)) throw NumericError("alista_weight: nonpositive normalization");
    w.col(j) /= denom;
  }
  return w;
}

SchemeParams init_scheme(SchemeKind kind, const ProblemInstance& p, int depth,
                         const FallbackOperator* fallback) {
  if (depth < 1) throw ConfigError("init_scheme: depth must be at least 1");
  SchemeParams sp;
  sp.kind = kind;
  sp.m = p.m();
  sp.n = p.n();
  sp.tau = p.tau;
  sp.dict_tag = dict_fingerprint(p.A());
  double inv_l = 1.0 / p.gram_norm;
  switch (kind) {
    case SchemeKind::Alista: {
      if (p.kind != ProblemKind::Lasso) throw ConfigError("alista applies to lasso problems");
      sp.shared_weight = alista_weight(p.A());
      sp.alista.assign(depth, AlistaLayer{p.tau * inv_l, 1.0});
      break;
    }
    case SchemeKind::ListaCp: {
      if (p.kind != ProblemKind::Lasso) throw ConfigError("listacp applies to lasso problems");
      ListaCpLayer layer;
      layer.threshold = p.tau * inv_l;
      layer.weight = p.A() * inv_l;
      sp.listacp.assign(depth, layer);
      break;
    }
    case SchemeKind::NnlsPg: {
      if (p.kind != ProblemKind::Nnls) throw ConfigError("nnlspg applies to nnls problems");
      NnlsPgLayer layer;
      layer.step_matrix = inv_l * p.A().transpose();
      sp.nnlspg.assign(depth, layer);
      break;
    }
    case SchemeKind::Dladmm: {
      if (p.kind != ProblemKind::L1L1) throw ConfigError("dladmm applies to l1-l1 problems");
      double penalty, x_step, z_step;
      if (fallback) {
        if (fallback->kind() != OperatorKind::LiAdmm)
          throw ConfigError("dladmm initialization expects a liadmm fallback");
        const LiadmmContext& ctx = fallback->liadmm_context();
        penalty = ctx.penalty;
        x_step = ctx.x_step;
        z_step = ctx.z_step;
      } else {
        penalty = 1.0;
        x_step = 0.99 * inv_l;
        z_step = 0.99;
      }
      DladmmLayer layer;
      layer.constraint_step = Vector::Constant(sp.m, penalty);
      layer.x_threshold = Vector::Constant(sp.n, x_step * p.tau);
      layer.x_step = Vector::Constant(sp.n, x_step);
      layer.z_threshold = Vector::Constant(sp.m, z_step);
      layer.z_step = Vector::Constant(sp.m, z_step);
      sp.shared_weight = p.A();
      sp.dladmm.assign(depth, layer);
      break;
    }
  }
  return sp;
}

Vector alista_layer(const Vector& x, const AlistaLayer& layer, const Matrix& a, const Matrix& w,
                    const Vector& d) {
  Vector fit = a * x - d;
  return soft_threshold(Vector(x - layer.step * (w.transpose() * fit)), layer.threshold);
}

Vector listacp_layer(const Vector& x, const ListaCpLayer& layer, const Matrix& a, const Vector& d) {
  Vector fit = a * x - d;
  return soft_threshold(Vector(x - layer.weight.transpose() * fit), layer.threshold);
}

Vector nnlspg_layer(const Vector& x, const NnlsPgLayer& layer, const Matrix& a, const Vector& d) {
  return project_nonneg(Vector(x - layer.step_matrix * (a * x - d)));
}

Vector dladmm_layer(const Vector& packed, const DladmmLayer& layer, const Matrix& w1,
                    const Matrix& a, const Vector& d) {
  int m = static_cast<int>(a.rows()), n = static_cast<int>(a.cols());
  if (packed.size() != n + 2 * m) throw ConfigError("dladmm_layer: packed point has wrong length");
  Vector x = packed.head(n), z = packed.segment(n, m), nu = packed.tail(m);
  Vector drive = nu + layer.constraint_step.cwiseProduct(a * x - z - d);
  Vector x_new = soft_threshold(
      Vector(x - layer.x_step.cwiseProduct(w1.transpose() * drive)), layer.x_threshold);
  Vector drive_mid = nu + layer.constraint_step.cwiseProduct(a * x_new - z - d);
  // The z weight is fixed at -Id, so its transposed application is a sign flip.
  Vector z_new =
      soft_threshold(Vector(z + layer.z_step.cwiseProduct(drive_mid)), layer.z_threshold);
  Vector nu_new = nu + layer.constraint_step.cwiseProduct(a * x_new - z_new - d);
  Vector out(packed.size());
  out << x_new, z_new, nu_new;
  return out;
}

namespace {

void check_shapes(const SchemeParams& sp) {
  auto bad = [] { throw ConfigError("scheme params have inconsistent shapes"); };
  switch (sp.kind) {
    case SchemeKind::Alista:
      if (sp.alista.empty() || sp.shared_weight.rows() != sp.m || sp.shared_weight.cols() != sp.n)
        bad();
      break;
    case SchemeKind::ListaCp:
      if (sp.listacp.empty()) bad();
      for (const auto& l : sp.listacp)
        if (l.weight.rows() != sp.m || l.weight.cols() != sp.n) bad();
      break;
    case SchemeKind::NnlsPg:
      if (sp.nnlspg.empty()) bad();
      for (const auto& l : sp.nnlspg)
        if (l.step_matrix.rows() != sp.n || l.step_matrix.cols() != sp.m) bad();
      break;
    case SchemeKind::Dladmm:
      if (sp.dladmm.empty() || sp.shared_weight.rows() != sp.m || sp.shared_weight.cols() != sp.n)
        bad();
      for (const auto& l : sp.dladmm)
        if (l.constraint_step.size() != sp.m || l.x_threshold.size() != sp.n ||
            l.x_step.size() != sp.n || l.z_threshold.size() != sp.m || l.z_step.size() != sp.m)
          bad();
      break;
  }
}

}  // namespace

L2OUpdate make_update(const SchemeParams& params, const ProblemInstance& p) {
  if (params.m != p.m() || params.n != p.n())
    throw ConfigError("scheme params were built for a different problem shape");
  check_shapes(params);
  bool needs_lasso = params.kind == SchemeKind::Alista || params.kind == SchemeKind::ListaCp;
  if (needs_lasso && p.kind != ProblemKind::Lasso)
    throw ConfigError("scheme/problem family mismatch");
  if (params.kind == SchemeKind::NnlsPg && p.kind != ProblemKind::Nnls)
    throw ConfigError("scheme/problem family mismatch");
  if (params.kind == SchemeKind::Dladmm && p.kind != ProblemKind::L1L1)
    throw ConfigError("scheme/problem family mismatch");
  L2OUpdate update;
  update.depth = params.depth();
  // The closure owns copies; `dict` keeps the dictionary alive.
  auto sp = std::make_shared<const SchemeParams>(params);
  auto dict = p.dict;
  Vector obs = p.obs;
  update.layer = [sp, dict, obs](const Vector& point, int k) -> Vector {
    int idx = k - 1;
    if (idx < 0 || idx >= sp->depth()) throw ConfigError("layer index out of range");
    switch (sp->kind) {
      case SchemeKind::Alista:
        return alista_layer(point, sp->alista[idx], *dict, sp->shared_weight, obs);
      case SchemeKind::ListaCp:
        return listacp_layer(point, sp->listacp[idx], *dict, obs);
      case SchemeKind::NnlsPg:
        return nnlspg_layer(point, sp->nnlspg[idx], *dict, obs);
      case SchemeKind::Dladmm:
        return dladmm_layer(point, sp->dladmm[idx], sp->shared_weight, *dict, obs);
    }
    throw ConfigError("unknown scheme kind");
  };
  return update;
}

namespace {

void put(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void put_vector(std::string& out, const Vector& v) {
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    put(out, v[i]);
  }
  out += '\n';
}

void put_matrix_rows(std::string& out, const Matrix& w) {
  for (int i = 0; i < w.rows(); ++i) put_vector(out, Vector(w.row(i)));
}

}  // namespace

void save_params(const SchemeParams& sp, const std::string& path) {
  check_shapes(sp);
  std::string out;
  char head[256];
  std::snprintf(head, sizeof head, "safel2o_params 1 %s %d %d %d %.17g %s\n",
                to_string(sp.kind).c_str(), sp.depth(), sp.m, sp.n, sp.tau,
                sp.dict_tag.empty() ? "-" : sp.dict_tag.c_str());
  out += head;
  if (sp.kind == SchemeKind::Alista || sp.kind == SchemeKind::Dladmm) {
    out += "W\n";
    put_matrix_rows(out, sp.shared_weight);
  }
  switch (sp.kind) {
    case SchemeKind::Alista:
      for (const auto& l : sp.alista) {
        out += "layer ";
        put(out, l.threshold);
        out += ' ';
        put(out, l.step);
        out += '\n';
      }
      break;
    case SchemeKind::ListaCp:
      for (const auto& l : sp.listacp) {
        out += "layer ";
        put(out, l.threshold);
        out += '\n';
        put_matrix_rows(out, l.weight);
      }
      break;
    case SchemeKind::NnlsPg:
      for (const auto& l : sp.nnlspg) {
        out += "layer\n";
        put_matrix_rows(out, l.step_matrix);
      }
      break;
    case SchemeKind::Dladmm:
      for (const auto& l : sp.dladmm) {
        out += "layer\n";
        put_vector(out, l.constraint_step);
        put_vector(out, l.x_threshold);
        put_vector(out, l.x_step);
        put_vector(out, l.z_threshold);
        put_vector(out, l.z_step);
      }
      break;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("save_params: cannot open '" + path + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw ConfigError("save_params: write failed for '" + path + "'");
}

namespace {

Vector read_values(std::istream& in, int count, const std::string& path) {
  Vector v(count);
  for (int i = 0; i < count; ++i)
    if (!(in >> v[i])) throw ConfigError("load_params: truncated tensor in '" + path + "'");
  return v;
}

Matrix read_matrix(std::istream& in, int rows, int cols, const std::string& path) {
  Matrix w(rows, cols);
  for (int i = 0; i < rows; ++i) w.row(i) = read_values(in, cols, path).transpose();
  return w;
}

void expect_token(std::istream& in, const char* token, const std::string& path) {
  std::string got;
  if (!(in >> got) || got != token)
    throw ConfigError("load_params: expected '" + std::string(token) + "' in '" + path + "'");
}

}  // namespace

SchemeParams load_params(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("load_params: cannot open '" + path + "'");
  std::string magic, kind, tag;
  int version = 0, depth = 0;
  SchemeParams sp;
  f >> magic >> version >> kind >> depth >> sp.m >> sp.n >> sp.tau >> tag;
  if (!f || magic != "safel2o_params" || version != 1)
    throw ConfigError("load_params: '" + path + "' is not a version-1 params file");
  if (depth < 1 || sp.m < 1 || sp.n < 1)
    throw ConfigError("load_params: bad header in '" + path + "'");
  sp.kind = scheme_kind_from_string(kind);
  sp.dict_tag = tag == "-" ? std::string() : tag;
  if (sp.kind == SchemeKind::Alista || sp.kind == SchemeKind::Dladmm) {
    expect_token(f, "W", path);
    sp.shared_weight = read_matrix(f, sp.m, sp.n, path);
  }
  for (int k = 0; k < depth; ++k) {
    expect_token(f, "layer", path);
    switch (sp.kind) {
      case SchemeKind::Alista: {
        AlistaLayer l;
        if (!(f >> l.threshold >> l.step))
          throw ConfigError("load_params: truncated layer in '" + path + "'");
        sp.alista.push_back(l);
        break;
      }
      case SchemeKind::ListaCp: {
        ListaCpLayer l;
        if (!(f >> l.threshold)) throw ConfigError("load_params: truncated layer in '" + path + "'");
        l.weight = read_matrix(f, sp.m, sp.n, path);
        sp.listacp.push_back(std::move(l));
        break;
      }
      case SchemeKind::NnlsPg: {
        NnlsPgLayer l;
        l.step_matrix = read_matrix(f, sp.n, sp.m, path);
        sp.nnlspg.push_back(std::move(l));
        break;
      }
      case SchemeKind::Dladmm: {
        DladmmLayer l;
        l.constraint_step = read_values(f, sp.m, path);
        l.x_threshold = read_values(f, sp.n, path);
        l.x_step = read_values(f, sp.n, path);
        l.z_threshold = read_values(f, sp.m, path);
        l.z_step = read_values(f, sp.m, path);
        sp.dladmm.push_back(std::move(l));
        break;
      }
    }
  }
  check_shapes(sp);
  return sp;
}

}  // namespace safel2o
