// Python bindings for the core operations: dataset generation, scheme
// initialization and training, safeguarded benchmark runs, and a few
// numeric primitives that are convenient to cross-check from numpy.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "safel2o/bench.hpp"
#include "safel2o/errors.hpp"
#include "safel2o/linalg.hpp"
#include "safel2o/problems.hpp"
#include "safel2o/prox.hpp"
#include "safel2o/reference.hpp"
#include "safel2o/safeguards.hpp"
#include "safel2o/schemes.hpp"
#include "safel2o/training.hpp"

namespace py = pybind11;
using namespace safel2o;

namespace {

const std::vector<ProblemInstance>& pick_split(const Dataset& ds, const std::string& split) {
  if (split == "train") return ds.train;
  if (split == "test") return ds.test;
  throw ConfigError("split must be 'train' or 'test'");
}

const ProblemInstance& pick_instance(const Dataset& ds, const std::string& split, int index) {
  const auto& s = pick_split(ds, split);
  if (index < 0 || index >= static_cast<int>(s.size()))
    throw ConfigError("instance index out of range");
  return s[static_cast<std::size_t>(index)];
}

}  // namespace

PYBIND11_MODULE(safel2o, m) {
  m.doc() = "Safeguarded learned optimization: problems, schemes, safeguarded runs";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("kind", [](const Dataset& d) { return to_string(d.kind); })
      .def_property_readonly("dist", [](const Dataset& d) { return to_string(d.dist); })
      .def_property_readonly("m", [](const Dataset& d) { return d.m(); })
      .def_property_readonly("n", [](const Dataset& d) { return d.n(); })
      .def_property_readonly("tau", [](const Dataset& d) { return d.tau; })
      .def_property_readonly("seed", [](const Dataset& d) { return d.seed; })
      .def_property_readonly("train_count",
                             [](const Dataset& d) { return static_cast<int>(d.train.size()); })
      .def_property_readonly("test_count",
                             [](const Dataset& d) { return static_cast<int>(d.test.size()); })
      .def("dictionary", [](const Dataset& d) { return Matrix(d.A()); })
      .def("observation",
           [](const Dataset& d, const std::string& split, int index) {
             return Vector(pick_instance(d, split, index).obs);
           },
           py::arg("split"), py::arg("index"));

  py::class_<SchemeParams>(m, "SchemeParams")
      .def_property_readonly("kind", [](const SchemeParams& p) { return to_string(p.kind); })
      .def_property_readonly("depth", &SchemeParams::depth)
      .def_property_readonly("m", [](const SchemeParams& p) { return p.m; })
      .def_property_readonly("n", [](const SchemeParams& p) { return p.n; });

  m.def("soft_threshold",
        [](const Vector& v, double thr) { return soft_threshold(v, thr); }, py::arg("v"),
        py::arg("threshold"));
  m.def("spectral_norm_sq", [](const Matrix& a) { return spectral_norm_sq(a); }, py::arg("a"),
        "squared spectral norm ||A^T A||_2 by power iteration");
  m.def("alista_weight", &alista_weight, py::arg("a"),
        "columnwise minimum-coherence weight with diag(W^T A) = 1");

  m.def(
      "generate",
      [](const std::string& problem, const std::string& dist, int m_, int n_, double tau,
         int n_train, int n_test, std::uint64_t seed) {
        GenSpec spec = make_gen_spec(problem_kind_from_string(problem), dist_from_string(dist));
        if (m_ > 0) spec.m = m_;
        if (n_ > 0) spec.n = n_;
        if (tau >= 0) spec.tau = tau;
        spec.n_train = n_train;
        spec.n_test = n_test;
        spec.seed = seed;
        return generate_dataset(spec);
      },
      py::arg("problem") = "lasso", py::arg("dist") = "seen", py::arg("m") = 0,
      py::arg("n") = 0, py::arg("tau") = -1.0, py::arg("n_train") = 10, py::arg("n_test") = 5,
      py::arg("seed") = 1);
  m.def("save_dataset", &save_dataset, py::arg("dataset"), py::arg("path"));
  m.def("load_dataset", &load_dataset, py::arg("path"));

  m.def("objective",
        [](const Dataset& ds, const std::string& split, int index, const Vector& x) {
          return point_objective(pick_instance(ds, split, index), x);
        },
        py::arg("dataset"), py::arg("split"), py::arg("index"), py::arg("x"));
  m.def("solve_solution",
        [](const Dataset& ds, const std::string& split, int index) {
          return solve_reference(pick_instance(ds, split, index)).x;
        },
        py::arg("dataset"), py::arg("split"), py::arg("index"),
        "minimizer via a long fallback-operator run");

  m.def(
      "init_scheme",
      [](const std::string& kind, const Dataset& ds, int depth) {
        const auto& split = ds.train.empty() ? ds.test : ds.train;
        if (split.empty()) throw ConfigError("dataset has no instances");
        return init_scheme(scheme_kind_from_string(kind), split.front(), depth);
      },
      py::arg("kind"), py::arg("dataset"), py::arg("depth"));
  m.def("save_params", &save_params, py::arg("params"), py::arg("path"));
  m.def("load_params", &load_params, py::arg("path"));

  m.def(
      "train",
      [](const SchemeParams& init, const Dataset& ds, const std::string& loss, int epochs,
         const std::string& grad, double init_step, std::uint64_t seed, bool finetune) {
        if (ds.train.empty()) throw ConfigError("dataset has no training split");
        TrainConfig cfg;
        cfg.loss = loss_kind_from_string(loss);
        cfg.mode = grad == "fd" ? GradMode::FiniteDiff : GradMode::Analytic;
        cfg.epochs_per_stage = epochs;
        cfg.init_step = init_step;
        cfg.seed = seed;
        cfg.joint_finetune = finetune;
        return train_layerwise(init, ds.train, cfg, nullptr);
      },
      py::arg("init"), py::arg("dataset"), py::arg("loss") = "objective",
      py::arg("epochs") = 20, py::arg("grad") = "analytic", py::arg("init_step") = 1e-2,
      py::arg("seed") = 7, py::arg("finetune") = false);

  m.def(
      "run",
      [](const Dataset& ds, const SchemeParams* params, const std::string& mode,
         const std::string& safeguard, double alpha, int iters, double tol,
         const std::string& split) {
        const auto& instances = pick_split(ds, split);
        BenchOptions opt;
        opt.mode = run_mode_from_string(mode);
        opt.total_iters = iters;
        opt.tol = tol;
        if (opt.mode == RunMode::Safe) opt.safeguard = parse_safeguard(safeguard, alpha);
        std::vector<Vector> refs = load_or_solve_references(instances, "", "");
        BenchResult res = run_bench(instances, params, refs, opt);
        int rows = static_cast<int>(res.rows.size());
        Vector k(rows), rel(rows), fb(rows), mr(rows), mu(rows), ext(rows);
        for (int i = 0; i < rows; ++i) {
          k[i] = res.rows[i].k;
          rel[i] = res.rows[i].rel_error;
          fb[i] = res.rows[i].fallback_frequency;
          mr[i] = res.rows[i].mean_residual;
          mu[i] = res.rows[i].mean_mu;
          ext[i] = res.rows[i].extension;
        }
        py::dict out;
        out["k"] = k;
        out["rel_error"] = rel;
        out["fallback_frequency"] = fb;
        out["mean_residual"] = mr;
        out["mean_mu"] = mu;
        out["extension"] = ext;
        out["depth"] = res.depth;
        return out;
      },
      py::arg("dataset"), py::arg("params") = nullptr, py::arg("mode") = "km",
      py::arg("safeguard") = "gs:0.5", py::arg("alpha") = 0.99, py::arg("iters") = 50,
      py::arg("tol") = 1e-10, py::arg("split") = "test");

  m.def(
      "mu_trajectory",
      [](const std::string& safeguard, double alpha, const std::vector<double>& residuals) {
        if (residuals.empty()) throw ConfigError("mu_trajectory needs at least one residual");
        SafeguardState state(parse_safeguard(safeguard, alpha), residuals.front());
        std::vector<double> mus{state.mu()};
        for (std::size_t i = 1; i < residuals.size(); ++i) {
          state.update(residuals[i]);
          mus.push_back(state.mu());
        }
        return mus;
      },
      py::arg("safeguard"), py::arg("alpha"), py::arg("residuals"),
      "safeguard threshold trajectory along a residual stream (first entry seeds mu)");
}
