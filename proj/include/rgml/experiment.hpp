#pragma once

// Cross-validated k-NN benchmark for learned Mahalanobis metrics.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "rgml/costs.hpp"
#include "rgml/dataset.hpp"
#include "rgml/optimizer.hpp"

namespace rgml {

enum class Method { Euclidean, Scm, Gmml, RgmlGaussian, RgmlTyler };

std::string to_string(Method m);
/// Throws InvalidInput for unknown names.
Method parse_method(const std::string& name);

struct ExperimentConfig {
  std::filesystem::path dataset_path;
  std::string label_column = "-1";
  Method method = Method::RgmlGaussian;
  double gmml_t = 0.5;
  double lambda = 0.05;
  double mislabel_rate = 0.0;
  int repeats = 200;
  double train_fraction = 0.5;
  int k_neighbors = 5;
  int pairs_factor = 75;  // n_S = n_D = pairs_factor * K (K - 1)
  std::uint64_t seed = 0;
  bool standardize = false;
  int threads = 1;  // execution detail; never changes results
  SolverOptions solver;

  void validate() const;
};

struct ResultRecord {
  ExperimentConfig config;
  std::vector<double> per_repeat_errors;  // percent, successful repeats in repeat order
  double mean_error_pct = 0.0;
  double std_error_pct = 0.0;             // population standard deviation
  int failed_repeats = 0;
  double wall_time_s = 0.0;
};

/// Flips exactly round_half_up(rate * m) distinct labels, each to a label
/// drawn uniformly from the K-1 other ones.
LabeledDataset inject_mislabels(const LabeledDataset& train, double rate, std::mt19937_64& rng);

/// Per-class shuffled split. The train size is round(m * train_fraction),
/// allocated to classes by largest remainder so each class is within one
/// sample of its proportional share. Returns (train rows, test rows).
std::pair<std::vector<Index>, std::vector<Index>> stratified_split(const LabeledDataset& data,
                                                                   double train_fraction, std::mt19937_64& rng);

/// Predicted labels of `test` under k-NN in the space whitened by A^{-1/2}.
/// Majority vote; ties go to the smallest mean neighbor distance, then to the
/// lowest label.
std::vector<int> knn_predict(const SpdMatrix& a, const LabeledDataset& train, const LabeledDataset& test, int k);

/// Misclassified fraction of `test`. Throws InvalidInput if k exceeds the
/// training size or dimensions disagree.
double evaluate(const SpdMatrix& a, const LabeledDataset& train, const LabeledDataset& test, int k);

/// Learns the metric of `method` on a training set.
struct FitOutcome {
  SpdMatrix metric;
  std::optional<SolverTrace> trace;
};
FitOutcome fit_metric(const ExperimentConfig& config, const LabeledDataset& train, std::uint64_t pair_seed);

/// seed-derived RNG seed of one repeat; independent of execution order.
std::uint64_t repeat_seed(std::uint64_t master_seed, int repeat);

/// Runs the configured number of repeats on `data`. Failed repeats are counted
/// and left out of the statistics. When `trace_out` is set and repeats == 1,
/// the solver trace of that repeat is stored there.
ResultRecord cross_validate(const ExperimentConfig& config, const LabeledDataset& data,
                            SolverTrace* trace_out = nullptr);

/// Loads config.dataset_path and runs cross_validate on it.
ResultRecord cross_validate(const ExperimentConfig& config, SolverTrace* trace_out = nullptr);

nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const ResultRecord& record);
ResultRecord record_from_json(const nlohmann::json& doc);

/// Command-line entry point. Exit codes: 0 success, 1 runtime failure,
/// 2 usage error.
int run_cli(int argc, const char* const* argv);

}  // namespace rgml
