#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rgml/experiment.hpp"

namespace rgml {

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Cross-validated k-NN benchmark of learned Mahalanobis metrics", "rgml_bench"};

  ExperimentConfig config;
  std::string dataset;
  std::string method = "rgml_gaussian";
  std::string trace_out;
  std::string out_path;
  std::uint64_t seed = 0;

  app.add_option("--dataset", dataset, "CSV file, one sample per row")->required();
  app.add_option("--label-col", config.label_column, "label column: header name or zero-based index (-1 = last)")
      ->capture_default_str();
  app.add_option("--method", method, "euclidean | scm | gmml | rgml_gaussian | rgml_tyler")->capture_default_str();
  app.add_option("--gmml-t", config.gmml_t, "geodesic position t for gmml, in [0,1]")->capture_default_str();
  app.add_option("--lambda", config.lambda, "RGML regularization weight")->capture_default_str();
  app.add_option("--mislabel-rate", config.mislabel_rate, "fraction of training labels to corrupt, in [0,1)")
      ->capture_default_str();
  app.add_option("--repeats", config.repeats, "number of random train/test splits")->capture_default_str();
  app.add_option("--train-fraction", config.train_fraction, "training share of each split")->capture_default_str();
  app.add_option("--k", config.k_neighbors, "neighbors in the k-NN vote")->capture_default_str();
  app.add_option("--pairs-factor", config.pairs_factor, "n_S = n_D = factor * K * (K - 1)")->capture_default_str();
  app.add_option("--seed", seed, "master seed")->capture_default_str();
  app.add_flag("--standardize", config.standardize, "z-score features with training statistics");
  app.add_option("--threads", config.threads, "worker threads; results do not depend on it")->capture_default_str();
  app.add_option("--max-iters", config.solver.max_iters, "solver iteration cap")->capture_default_str();
  app.add_option("--grad-tol", config.solver.grad_norm_tol, "solver gradient-norm tolerance")->capture_default_str();
  app.add_option("--trace-out", trace_out, "solver trace CSV (single-repeat RGML runs)");
  app.add_option("--out", out_path, "result JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    config.dataset_path = dataset;
    config.method = parse_method(method);
    config.seed = seed;
    config.validate();
    if (!trace_out.empty() && (config.repeats != 1 || (config.method != Method::RgmlGaussian &&
                                                       config.method != Method::RgmlTyler))) {
      throw InvalidInput("--trace-out needs --repeats 1 and an rgml method");
    }
  } catch (const std::exception& e) {
    std::cerr << "rgml_bench: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    SolverTrace trace;
    const ResultRecord record = cross_validate(config, trace_out.empty() ? nullptr : &trace);
    const std::string doc = to_json(record).dump(2);
    if (out_path.empty()) {
      std::cout << doc << '\n';
    } else {
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot write " + out_path);
      out << doc << '\n';
    }
    if (!trace_out.empty()) {
      std::ofstream out(trace_out);
      if (!out) throw std::runtime_error("cannot write " + trace_out);
      trace.write_csv(out);
    }
    if (record.per_repeat_errors.empty()) {
      std::cerr << "rgml_bench: every repeat failed\n";
      return kExitRuntime;
    }
  } catch (const std::exception& e) {
    std::cerr << "rgml_bench: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

}  // namespace rgml
