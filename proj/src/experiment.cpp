#include "rgml/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>

#include "rgml/baselines.hpp"

namespace rgml {

std::string to_string(Method m) {
  switch (m) {
    case Method::Euclidean: return "euclidean";
    case Method::Scm: return "scm";
    case Method::Gmml: return "gmml";
    case Method::RgmlGaussian: return "rgml_gaussian";
    case Method::RgmlTyler: return "rgml_tyler";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  static const std::map<std::string, Method> table = {{"euclidean", Method::Euclidean},
                                                      {"scm", Method::Scm},
                                                      {"gmml", Method::Gmml},
                                                      {"rgml_gaussian", Method::RgmlGaussian},
                                                      {"rgml_tyler", Method::RgmlTyler}};
  auto it = table.find(name);
  if (it == table.end()) throw InvalidInput("unknown method '" + name + "'");
  return it->second;
}

void ExperimentConfig::validate() const {
  if (repeats < 1) throw InvalidInput("repeats must be at least 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InvalidInput("train fraction must lie in (0, 1)");
  if (k_neighbors < 1) throw InvalidInput("k must be at least 1");
  if (!(mislabel_rate >= 0.0 && mislabel_rate < 1.0)) throw InvalidInput("mislabel rate must lie in [0, 1)");
  if (!(gmml_t >= 0.0 && gmml_t <= 1.0)) throw InvalidInput("gmml t must lie in [0, 1]");
  if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
  if (pairs_factor < 1) throw InvalidInput("pairs factor must be at least 1");
  if (threads < 1) throw InvalidInput("threads must be at least 1");
  solver.validate();
}

LabeledDataset inject_mislabels(const LabeledDataset& train, double rate, std::mt19937_64& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidInput("inject_mislabels: rate must lie in [0, 1)");
  const auto m = static_cast<std::size_t>(train.size());
  const auto count = static_cast<std::size_t>(std::floor(rate * static_cast<double>(m) + 0.5));
  if (count == 0) return train;
  const int num_classes = train.num_classes();
  if (num_classes < 2) throw InvalidInput("inject_mislabels: need at least two classes");

  // Partial Fisher-Yates: the first `count` entries are a uniform sample
  // without replacement.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, m - 1);
    std::swap(order[i], order[pick(rng)]);
  }

  std::vector<int> labels = train.labels();
  std::uniform_int_distribution<int> other(1, num_classes - 1);
  for (std::size_t i = 0; i < count; ++i) {
    int& y = labels[order[i]];
    const int draw = other(rng);
    y = draw >= y ? draw + 1 : draw;
  }
  return train.with_labels(std::move(labels));
}

std::pair<std::vector<Index>, std::vector<Index>> stratified_split(const LabeledDataset& data,
                                                                   double train_fraction, std::mt19937_64& rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InvalidInput("stratified_split: bad fraction");
  const int num_classes = data.num_classes();
  const double m = static_cast<double>(data.size());
  const auto total_train = static_cast<Index>(std::floor(m * train_fraction + 0.5));

  std::vector<std::vector<Index>> members(static_cast<std::size_t>(num_classes));
  std::vector<Index> quota(static_cast<std::size_t>(num_classes));
  std::vector<std::pair<double, int>> remainders;
  Index assigned = 0;
  for (int k = 0; k < num_classes; ++k) {
    members[static_cast<std::size_t>(k)] = data.class_indices(k + 1);
    const double share = static_cast<double>(members[static_cast<std::size_t>(k)].size()) * train_fraction;
    quota[static_cast<std::size_t>(k)] = static_cast<Index>(std::floor(share));
    assigned += quota[static_cast<std::size_t>(k)];
    remainders.emplace_back(share - std::floor(share), k);
  }
  // Largest remainder first; equal remainders go to the lower class index.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total_train && i < remainders.size(); ++i, ++assigned) {
    ++quota[static_cast<std::size_t>(remainders[i].second)];
  }

  std::vector<Index> train;
  std::vector<Index> test;
  for (int k = 0; k < num_classes; ++k) {
    auto& idx = members[static_cast<std::size_t>(k)];
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(idx[i - 1], idx[pick(rng)]);
    }
    const auto q = static_cast<std::size_t>(quota[static_cast<std::size_t>(k)]);
    train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(q));
    test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(q), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

std::vector<int> knn_predict(const SpdMatrix& a, const LabeledDataset& train, const LabeledDataset& test, int k) {
  if (train.dim() != a.dim() || test.dim() != a.dim()) throw InvalidInput("evaluate: dimension mismatch");
  if (k < 1 || k > train.size()) throw InvalidInput("evaluate: k must lie in [1, m_train]");

  const Matrix w = inv_sqrtm(a).mat();
  const Matrix xtr = train.features() * w;
  const Matrix xte = test.features() * w;
  const Vector tr_sq = xtr.rowwise().squaredNorm();
  const int num_classes = std::max(train.num_classes(), test.num_classes());

  std::vector<int> predictions;
  predictions.reserve(static_cast<std::size_t>(test.size()));
  std::vector<std::pair<double, Index>> dist(static_cast<std::size_t>(train.size()));
  for (Index i = 0; i < test.size(); ++i) {
    const Vector cross = xtr * xte.row(i).transpose();
    const double te_sq = xte.row(i).squaredNorm();
    for (Index j = 0; j < train.size(); ++j) {
      const double d2 = std::max(0.0, tr_sq(j) + te_sq - 2.0 * cross(j));
      dist[static_cast<std::size_t>(j)] = {d2, j};
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

    std::vector<int> votes(static_cast<std::size_t>(num_classes + 1), 0);
    std::vector<double> dist_sum(static_cast<std::size_t>(num_classes + 1), 0.0);
    for (int n = 0; n < k; ++n) {
      const int y = train.labels()[static_cast<std::size_t>(dist[static_cast<std::size_t>(n)].second)];
      ++votes[static_cast<std::size_t>(y)];
      dist_sum[static_cast<std::size_t>(y)] += std::sqrt(dist[static_cast<std::size_t>(n)].first);
    }
    int best = 0;
    for (int y = 1; y <= num_classes; ++y) {
      const auto yi = static_cast<std::size_t>(y);
      if (votes[yi] == 0) continue;
      if (best == 0) {
        best = y;
        continue;
      }
      const auto bi = static_cast<std::size_t>(best);
      const double mean_y = dist_sum[yi] / votes[yi];
      const double mean_b = dist_sum[bi] / votes[bi];
      if (votes[yi] > votes[bi] || (votes[yi] == votes[bi] && mean_y < mean_b)) best = y;
    }
    predictions.push_back(best);
  }
  return predictions;
}

double evaluate(const SpdMatrix& a, const LabeledDataset& train, const LabeledDataset& test, int k) {
  const std::vector<int> pred = knn_predict(a, train, test, k);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) wrong += pred[i] != test.labels()[i];
  return pred.empty() ? 0.0 : static_cast<double>(wrong) / static_cast<double>(pred.size());
}

FitOutcome fit_metric(const ExperimentConfig& config, const LabeledDataset& train, std::uint64_t pair_seed) {
  const Index p = train.dim();
  switch (config.method) {
    case Method::Euclidean: return {SpdMatrix::identity(p), std::nullopt};
    case Method::Scm: return {sample_covariance(train.features()), std::nullopt};
    default: break;
  }
  const Index num_classes = train.num_classes();
  const Index n_pairs = static_cast<Index>(config.pairs_factor) * num_classes * (num_classes - 1);
  const PairDifferences pairs = build_pairs(train, n_pairs, n_pairs, pair_seed);
  if (config.method == Method::Gmml) {
    const ClassScatter sc = scatter(pairs);
    return {gmml(sc.pooled, sc.dissimilar, config.gmml_t), std::nullopt};
  }
  const RgmlParams params{config.lambda,
                          config.method == Method::RgmlTyler ? CostKind::Tyler : CostKind::Gaussian};
  SolverResult fit = fit_rgml(pairs, params, config.solver);
  return {fit.point.center(), std::move(fit.trace)};
}

std::uint64_t repeat_seed(std::uint64_t master_seed, int repeat) {
  // splitmix64 finalizer of seed ^ index.
  std::uint64_t z = master_seed ^ static_cast<std::uint64_t>(repeat);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

struct RepeatOutcome {
  bool ok = false;
  double error_pct = 0.0;
  std::optional<SolverTrace> trace;
};

void standardize_in_place(Matrix& train, Matrix& test) {
  const Eigen::RowVectorXd mean = train.colwise().mean();
  const Matrix centered = train.rowwise() - mean;
  Eigen::RowVectorXd sd = (centered.colwise().squaredNorm() / static_cast<double>(train.rows())).array().sqrt();
  for (Index j = 0; j < sd.size(); ++j) {
    if (!(sd(j) > 0.0)) sd(j) = 1.0;
  }
  train = centered.array().rowwise() / sd.array();
  test = (test.rowwise() - mean).array().rowwise() / sd.array();
}

RepeatOutcome run_repeat(const ExperimentConfig& config, const LabeledDataset& data, int repeat) {
  RepeatOutcome out;
  try {
    std::mt19937_64 rng(repeat_seed(config.seed, repeat));
    auto [train_rows, test_rows] = stratified_split(data, config.train_fraction, rng);
    LabeledDataset train = data.subset(train_rows);
    LabeledDataset test = data.subset(test_rows);
    if (config.standardize) {
      Matrix xtr = train.features();
      Matrix xte = test.features();
      standardize_in_place(xtr, xte);
      train = LabeledDataset(train.name(), std::move(xtr), train.labels(), train.num_classes());
      test = LabeledDataset(test.name(), std::move(xte), test.labels(), test.num_classes());
    }
    train = inject_mislabels(train, config.mislabel_rate, rng);
    const std::uint64_t pair_seed = rng();
    FitOutcome fit = fit_metric(config, train, pair_seed);
    out.error_pct = 100.0 * evaluate(fit.metric, train, test, config.k_neighbors);
    out.trace = std::move(fit.trace);
    out.ok = std::isfinite(out.error_pct);
  } catch (const std::exception&) {
    out.ok = false;
  }
  return out;
}

}  // namespace

ResultRecord cross_validate(const ExperimentConfig& config, const LabeledDataset& data, SolverTrace* trace_out) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  std::vector<RepeatOutcome> outcomes(static_cast<std::size_t>(config.repeats));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < config.repeats; r = next++) outcomes[static_cast<std::size_t>(r)] = run_repeat(config, data, r);
  };
  const int nthreads = std::min(config.threads, config.repeats);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  ResultRecord rec;
  rec.config = config;
  for (const auto& o : outcomes) {
    if (o.ok) {
      rec.per_repeat_errors.push_back(o.error_pct);
    } else {
      ++rec.failed_repeats;
    }
  }
  if (!rec.per_repeat_errors.empty()) {
    const double n = static_cast<double>(rec.per_repeat_errors.size());
    double sum = 0.0;
    for (double e : rec.per_repeat_errors) sum += e;
    rec.mean_error_pct = sum / n;
    double ss = 0.0;
    for (double e : rec.per_repeat_errors) ss += (e - rec.mean_error_pct) * (e - rec.mean_error_pct);
    rec.std_error_pct = std::sqrt(ss / n);
  } else {
    rec.mean_error_pct = std::numeric_limits<double>::quiet_NaN();
    rec.std_error_pct = std::numeric_limits<double>::quiet_NaN();
  }
  if (trace_out && config.repeats == 1 && outcomes.front().trace) *trace_out = *outcomes.front().trace;
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

ResultRecord cross_validate(const ExperimentConfig& config, SolverTrace* trace_out) {
  config.validate();
  const LabeledDataset data = load_dataset(config.dataset_path, LabelColumn::parse(config.label_column));
  return cross_validate(config, data, trace_out);
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"dataset", c.dataset_path.string()},
          {"label_column", c.label_column},
          {"method", to_string(c.method)},
          {"gmml_t", c.gmml_t},
          {"lambda", c.lambda},
          {"mislabel_rate", c.mislabel_rate},
          {"repeats", c.repeats},
          {"train_fraction", c.train_fraction},
          {"k_neighbors", c.k_neighbors},
          {"pairs_factor", c.pairs_factor},
          {"seed", c.seed},
          {"standardize", c.standardize},
          {"solver",
           {{"max_iters", c.solver.max_iters},
            {"grad_norm_tol", c.solver.grad_norm_tol},
            {"initial_step", c.solver.initial_step},
            {"armijo_shrink", c.solver.armijo_shrink},
            {"armijo_slope", c.solver.armijo_slope},
            {"min_step", c.solver.min_step},
            {"step_guess", c.solver.step_guess == StepGuess::Adaptive ? "adaptive" : "fixed"},
            {"optimism", c.solver.optimism}}}};
}

nlohmann::json to_json(const ResultRecord& r) {
  return {{"config", to_json(r.config)},
          {"per_repeat_errors", r.per_repeat_errors},
          {"mean_error_pct", r.mean_error_pct},
          {"std_error_pct", r.std_error_pct},
          {"failed_repeats", r.failed_repeats},
          {"wall_time_s", r.wall_time_s}};
}

ResultRecord record_from_json(const nlohmann::json& doc) {
  ResultRecord r;
  const auto& c = doc.at("config");
  r.config.dataset_path = c.at("dataset").get<std::string>();
  r.config.label_column = c.at("label_column").get<std::string>();
  r.config.method = parse_method(c.at("method").get<std::string>());
  r.config.gmml_t = c.at("gmml_t").get<double>();
  r.config.lambda = c.at("lambda").get<double>();
  r.config.mislabel_rate = c.at("mislabel_rate").get<double>();
  r.config.repeats = c.at("repeats").get<int>();
  r.config.train_fraction = c.at("train_fraction").get<double>();
  r.config.k_neighbors = c.at("k_neighbors").get<int>();
  r.config.pairs_factor = c.at("pairs_factor").get<int>();
  r.config.seed = c.at("seed").get<std::uint64_t>();
  r.config.standardize = c.at("standardize").get<bool>();
  const auto& s = c.at("solver");
  r.config.solver.max_iters = s.at("max_iters").get<int>();
  r.config.solver.grad_norm_tol = s.at("grad_norm_tol").get<double>();
  r.config.solver.initial_step = s.at("initial_step").get<double>();
  r.config.solver.armijo_shrink = s.at("armijo_shrink").get<double>();
  r.config.solver.armijo_slope = s.at("armijo_slope").get<double>();
  r.config.solver.min_step = s.at("min_step").get<double>();
  r.config.solver.step_guess = s.at("step_guess").get<std::string>() == "fixed" ? StepGuess::Fixed : StepGuess::Adaptive;
  r.config.solver.optimism = s.at("optimism").get<double>();
  r.per_repeat_errors = doc.at("per_repeat_errors").get<std::vector<double>>();
  r.mean_error_pct = doc.at("mean_error_pct").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                        : doc.at("mean_error_pct").get<double>();
  r.std_error_pct = doc.at("std_error_pct").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                      : doc.at("std_error_pct").get<double>();
  r.failed_repeats = doc.at("failed_repeats").get<int>();
  r.wall_time_s = doc.at("wall_time_s").get<double>();
  return r;
}

}  // namespace rgml
