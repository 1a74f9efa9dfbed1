// Command-line driver: generate synthetic datasets, train unrolled schemes,
// run km / learned / safeguarded benchmarks, and merge run CSVs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "safel2o/bench.hpp"
#include "safel2o/errors.hpp"
#include "safel2o/hash.hpp"
#include "safel2o/problems.hpp"
#include "safel2o/reference.hpp"
#include "safel2o/safeguards.hpp"
#include "safel2o/schemes.hpp"
#include "safel2o/training.hpp"

namespace {

using namespace safel2o;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Deterministic "# key value" provenance block embedded in every output.
struct ConfigBlock {
  std::ostringstream text;
  void add(const std::string& key, const std::string& value) {
    text << "# " << key << " " << value << "\n";
  }
  void add(const std::string& key, double value) { add(key, fmt(value)); }
  void add(const std::string& key, long long value) { add(key, std::to_string(value)); }
  void input(const std::string& role, const std::string& path) {
    add("input " + role, path + " " + git_blob_hash_file(path));
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
  if (!out) throw ConfigError("write failed for " + path);
}

void append_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw ConfigError("cannot append to " + path);
  out << content;
}

std::string base_label(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  if (name.size() > 4 && name.substr(name.size() - 4) == ".csv")
    name = name.substr(0, name.size() - 4);
  return name.empty() ? "run" : name;
}

struct GenerateArgs {
  std::string problem = "lasso", dist = "seen", out;
  int m = 0, n = 0, n_train = 0, n_test = 0;
  double tau = 0.0;
  std::uint64_t seed = 1;
};

void cmd_generate(const CLI::App& sub, const GenerateArgs& args) {
  GenSpec spec = make_gen_spec(problem_kind_from_string(args.problem),
                               dist_from_string(args.dist));
  if (sub.count("--m")) spec.m = args.m;
  if (sub.count("--n")) spec.n = args.n;
  if (sub.count("--tau")) spec.tau = args.tau;
  if (sub.count("--train")) spec.n_train = args.n_train;
  if (sub.count("--test")) spec.n_test = args.n_test;
  spec.seed = args.seed;
  Dataset ds = generate_dataset(spec);
  save_dataset(ds, args.out);
  std::cout << "wrote " << args.out << " (" << ds.train.size() << " train, " << ds.test.size()
            << " test, m=" << ds.m() << ", n=" << ds.n() << ")\n";
}

struct TrainArgs {
  std::string data, scheme = "alista", loss = "objective", grad = "analytic";
  std::string out, log;
  int layers = 16, epochs = 200, minibatch = 256, batch_limit = 1000, limit = 0;
  int finetune_epochs = 0;
  double init_step = 1e-2;
  std::uint64_t seed = 7;
  bool finetune = false;
};

void cmd_train(const TrainArgs& args) {
  Dataset ds = load_dataset(args.data);
  if (ds.train.empty()) throw ConfigError("train: dataset has no training split");
  std::vector<ProblemInstance> split = ds.train;
  if (args.limit > 0 && args.limit < static_cast<int>(split.size()))
    split.resize(args.limit);

  SchemeParams init = init_scheme(scheme_kind_from_string(args.scheme), split.front(),
                                  args.layers);
  TrainConfig cfg;
  cfg.loss = loss_kind_from_string(args.loss);
  cfg.mode = args.grad == "fd" ? GradMode::FiniteDiff : GradMode::Analytic;
  cfg.epochs_per_stage = args.epochs;
  cfg.init_step = args.init_step;
  cfg.minibatch = args.minibatch;
  cfg.full_batch_limit = args.batch_limit;
  cfg.seed = args.seed;
  cfg.joint_finetune = args.finetune;
  cfg.finetune_epochs = args.finetune_epochs;

  TrainReport report;
  SchemeParams trained = train_layerwise(init, split, cfg, &report);
  save_params(trained, args.out);

  ConfigBlock block;
  block.add("safel2o", "train 1");
  block.add("scheme", args.scheme);
  block.add("layers", static_cast<long long>(args.layers));
  block.add("loss", args.loss);
  block.add("grad", args.grad == "fd" ? "fd" : "analytic");
  block.add("epochs", static_cast<long long>(args.epochs));
  block.add("init_step", cfg.init_step);
  block.add("minibatch", static_cast<long long>(cfg.minibatch));
  block.add("batch_limit", static_cast<long long>(cfg.full_batch_limit));
  block.add("instances", static_cast<long long>(split.size()));
  block.add("seed", static_cast<long long>(cfg.seed));
  block.add("finetune", args.finetune ? "1" : "0");
  block.input("data", args.data);
  append_file(args.out, block.text.str());

  if (!args.log.empty()) {
    std::ostringstream csv;
    csv << block.text.str();
    std::string reverted;
    for (const StageReport& s : report.stages)
      if (s.reverted) reverted += " " + std::to_string(s.stage);
    if (!reverted.empty()) csv << "# reverted_stages" << reverted << "\n";
    csv << "stage,epoch,loss\n";
    for (const StageReport& s : report.stages) {
      csv << s.stage << ",0," << fmt(s.initial_loss) << "\n";
      for (std::size_t e = 0; e < s.epoch_loss.size(); ++e)
        csv << s.stage << "," << (e + 1) << "," << fmt(s.epoch_loss[e]) << "\n";
    }
    write_file(args.log, csv.str());
  }

  for (const StageReport& s : report.stages)
    std::cout << "stage " << s.stage << ": " << fmt(s.initial_loss) << " -> "
              << fmt(s.final_loss) << (s.reverted ? " (reverted)" : "") << "\n";
  std::cout << "wrote " << args.out << "\n";
}

struct RunArgs {
  std::string data, params, out, refs, split = "test";
  std::string mode = "safe", safeguard = "gs:0.5";
  double alpha = 0.99, tol = 1e-10;
  int iters = 100, threads = 0;
};

void cmd_run(const RunArgs& args) {
  if (args.split != "train" && args.split != "test")
    throw ConfigError("run: --split must be train or test");
  Dataset ds = load_dataset(args.data);
  const std::vector<ProblemInstance>& split = args.split == "train" ? ds.train : ds.test;
  if (split.empty()) throw ConfigError("run: dataset split '" + args.split + "' is empty");

  BenchOptions opt;
  opt.mode = run_mode_from_string(args.mode);
  opt.total_iters = args.iters;
  opt.tol = args.tol;
  opt.threads = args.threads;
  if (opt.mode == RunMode::Safe) opt.safeguard = parse_safeguard(args.safeguard, args.alpha);

  SchemeParams params;
  bool learned = opt.mode != RunMode::Km;
  if (learned) {
    if (args.params.empty()) throw ConfigError("run: learned modes need --params");
    params = load_params(args.params);
    std::string tag = dict_fingerprint(ds.A());
    if (!params.dict_tag.empty() && params.dict_tag != tag)
      throw ConfigError("run: parameters were built for a different dictionary (tag " +
                        params.dict_tag + ", dataset " + tag + ")");
  }

  std::string data_hash = git_blob_hash_file(args.data);
  std::string refs_path =
      args.refs.empty() ? args.data + "." + args.split + ".refs" : args.refs;
  std::vector<Vector> refs =
      load_or_solve_references(split, refs_path, data_hash, args.threads);

  BenchResult res = run_bench(split, learned ? &params : nullptr, refs, opt);

  ConfigBlock block;
  block.add("safel2o", "run 1");
  block.add("mode", args.mode);
  block.add("problem", to_string(ds.kind));
  block.add("dist", to_string(ds.dist));
  block.add("m", static_cast<long long>(ds.m()));
  block.add("n", static_cast<long long>(ds.n()));
  block.add("tau", ds.tau);
  block.add("split", args.split);
  block.add("instances", static_cast<long long>(res.instances));
  if (learned) {
    block.add("scheme", to_string(params.kind));
    block.add("depth", static_cast<long long>(res.depth));
  }
  if (opt.mode == RunMode::Safe) {
    block.add("safeguard", to_string(opt.safeguard));
    block.add("alpha", opt.safeguard.alpha);
  }
  block.add("iters", static_cast<long long>(args.iters));
  block.add("tol", args.tol);
  block.input("data", args.data);
  if (learned) block.input("params", args.params);

  std::ostringstream csv;
  csv << block.text.str();
  csv << "k,rel_error,fallback_frequency,mean_residual,mean_mu,extension\n";
  for (const BenchRow& row : res.rows)
    csv << row.k << "," << fmt(row.rel_error) << "," << fmt(row.fallback_frequency) << ","
        << fmt(row.mean_residual) << "," << fmt(row.mean_mu) << "," << row.extension << "\n";
  write_file(args.out, csv.str());
  std::cout << "wrote " << args.out << " (" << res.rows.size() << " rows)\n";
}

struct ReportArgs {
  std::string out;
  std::vector<std::string> inputs;
};

void cmd_report(const ReportArgs& args) {
  struct Source {
    std::string label;
    // row k-1 -> (rel_error, fallback_frequency) kept as the original text
    std::vector<std::pair<std::string, std::string>> rows;
  };
  std::vector<Source> sources;
  int max_k = 0;
  for (const std::string& path : args.inputs) {
    std::ifstream in(path);
    if (!in) throw ConfigError("report: cannot read " + path);
    Source src;
    src.label = base_label(path);
    for (const Source& prior : sources)
      if (prior.label == src.label) src.label += "_" + std::to_string(sources.size() + 1);
    std::string line;
    int col_k = -1, col_rel = -1, col_fb = -1;
    bool saw_header = false;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cells;
      std::stringstream row(line);
      std::string cell;
      while (std::getline(row, cell, ',')) cells.push_back(cell);
      if (!saw_header) {
        saw_header = true;
        for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
          if (cells[i] == "k") col_k = i;
          if (cells[i] == "rel_error") col_rel = i;
          if (cells[i] == "fallback_frequency") col_fb = i;
        }
        if (col_k < 0 || col_rel < 0 || col_fb < 0)
          throw ConfigError("report: " + path + " is not a run CSV");
        continue;
      }
      int need = std::max(col_k, std::max(col_rel, col_fb));
      if (static_cast<int>(cells.size()) <= need)
        throw ConfigError("report: short row in " + path);
      int k = std::stoi(cells[col_k]);
      if (k != static_cast<int>(src.rows.size()) + 1)
        throw ConfigError("report: non-contiguous k column in " + path);
      src.rows.emplace_back(cells[col_rel], cells[col_fb]);
    }
    if (!saw_header) throw ConfigError("report: " + path + " has no header row");
    max_k = std::max(max_k, static_cast<int>(src.rows.size()));
    sources.push_back(std::move(src));
  }

  ConfigBlock block;
  block.add("safel2o", "report 1");
  for (const std::string& path : args.inputs) block.input("run", path);
  std::ostringstream csv;
  csv << block.text.str();
  csv << "k";
  for (const Source& src : sources)
    csv << "," << src.label << "_rel_error," << src.label << "_fallback_frequency";
  csv << "\n";
  for (int k = 1; k <= max_k; ++k) {
    csv << k;
    for (const Source& src : sources) {
      if (k <= static_cast<int>(src.rows.size()))
        csv << "," << src.rows[k - 1].first << "," << src.rows[k - 1].second;
      else
        csv << ",nan,nan";
    }
    csv << "\n";
  }
  write_file(args.out, csv.str());
  std::cout << "wrote " << args.out << " (" << sources.size() << " runs, " << max_k
            << " rows)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe-L2O benchmark driver: synthetic data, unrolled-scheme training, "
               "safeguarded runs, and CSV reports"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* g = app.add_subcommand("generate", "generate a synthetic dataset file");
  g->add_option("--problem", gen.problem, "problem family: lasso|l1l1|nnls");
  g->add_option("--dist", gen.dist, "sampling distribution tag: seen|unseen");
  g->add_option("--m", gen.m, "rows of the dictionary");
  g->add_option("--n", gen.n, "columns of the dictionary");
  g->add_option("--tau", gen.tau, "l1 weight");
  g->add_option("--train", gen.n_train, "number of training instances");
  g->add_option("--test", gen.n_test, "number of test instances");
  g->add_option("--seed", gen.seed, "generator seed");
  g->add_option("--out", gen.out, "output dataset path")->required();
  g->callback([&]() { cmd_generate(*g, gen); });

  TrainArgs tr;
  CLI::App* t = app.add_subcommand("train", "train an unrolled scheme layerwise");
  t->add_option("--data", tr.data, "dataset file")->required();
  t->add_option("--scheme", tr.scheme, "scheme family: alista|listacp|nnlspg|dladmm");
  t->add_option("--layers", tr.layers, "number of unrolled layers");
  t->add_option("--loss", tr.loss, "training loss: objective|distance|residual");
  t->add_option("--grad", tr.grad, "gradient mode: analytic|fd");
  t->add_option("--epochs", tr.epochs, "epochs per layerwise stage");
  t->add_option("--init-step", tr.init_step, "initial learning rate");
  t->add_option("--seed", tr.seed, "shuffle seed");
  t->add_option("--minibatch", tr.minibatch, "minibatch size for large splits");
  t->add_option("--batch-limit", tr.batch_limit, "largest split trained full-batch");
  t->add_option("--limit", tr.limit, "use only the first N training instances (0 = all)");
  t->add_flag("--finetune", tr.finetune, "extra all-layer pass after the last stage");
  t->add_option("--finetune-epochs", tr.finetune_epochs,
                "epochs for the finetune pass (0 = same as --epochs)");
  t->add_option("--out", tr.out, "output parameter file")->required();
  t->add_option("--log", tr.log, "optional loss-curve CSV path");
  t->callback([&]() { cmd_train(tr); });

  RunArgs rn;
  CLI::App* r = app.add_subcommand("run", "run a benchmark and write a per-iteration CSV");
  r->add_option("--data", rn.data, "dataset file")->required();
  r->add_option("--params", rn.params, "trained parameter file (l2o and safe modes)");
  r->add_option("--mode", rn.mode, "km|l2o|safe");
  r->add_option("--safeguard", rn.safeguard,
                "safeguard scheme: gs:<theta>|rt|aa|ema:<theta>|rm:<window>");
  r->add_option("--alpha", rn.alpha, "safeguard acceptance factor in [0,1)");
  r->add_option("--iters", rn.iters, "iteration budget");
  r->add_option("--tol", rn.tol, "residual stopping tolerance");
  r->add_option("--split", rn.split, "dataset split to run: train|test");
  r->add_option("--threads", rn.threads, "worker threads (0 = hardware)");
  r->add_option("--refs", rn.refs, "reference-solution cache path");
  r->add_option("--out", rn.out, "output CSV path")->required();
  r->callback([&]() { cmd_run(rn); });

  ReportArgs rp;
  CLI::App* p = app.add_subcommand("report", "merge run CSVs into one comparison table");
  p->add_option("--out", rp.out, "output CSV path")->required();
  p->add_option("inputs", rp.inputs, "run CSV files")->required()->expected(-1);
  p->callback([&]() { cmd_report(rp); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const safel2o::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const safel2o::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
