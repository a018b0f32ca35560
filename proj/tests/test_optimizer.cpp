#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rgml/baselines.hpp"
#include "rgml/optimizer.hpp"
#include "test_util.hpp"

using namespace rgml;
using namespace rgml::testing;

namespace {

// Tr(A^-1 S) + Tr(A D) on the first class slot; the centre is left free with
// zero gradient, so the product point is a convenient single-matrix carrier.
SolverResult minimize_gmml_objective(const SpdMatrix& s, const SpdMatrix& d, const SolverOptions& opts) {
  auto cost = [&](const ProductPoint& t) {
    const Matrix& a = t.classes()[0].mat();
    return (a.llt().solve(s.mat())).trace() + (a * d.mat()).trace();
  };
  auto egrad = [&](const ProductPoint& t) {
    const Matrix inv = inverse(t.classes()[0]).mat();
    const Index p = t.dim();
    return MatrixTuple{Matrix::Zero(p, p), {Matrix(-inv * s.mat() * inv + d.mat())}};
  };
  return minimize(cost, egrad, ProductPoint::identity(s.dim(), 1, Manifold::Spd), opts);
}

void expect_monotone(const SolverTrace& trace) {
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    EXPECT_LE(trace.records[i].cost, trace.records[i - 1].cost);
  }
}

}  // namespace

TEST(SolverOptions, Validation) {
  SolverOptions o;
  EXPECT_NO_THROW(o.validate());
  o.armijo_shrink = 1.0;
  EXPECT_THROW(o.validate(), InvalidInput);
  o = {};
  o.min_step = 0.0;
  EXPECT_THROW(o.validate(), InvalidInput);
  o = {};
  o.grad_norm_tol = -1.0;
  EXPECT_THROW(o.validate(), InvalidInput);
}

TEST(Minimize, ZeroGradientReturnsImmediately) {
  std::mt19937_64 rng(60);
  const ProductPoint start = random_point(3, 2, Manifold::Spd, rng);
  const SolverResult r = minimize([](const ProductPoint&) { return 1.0; },
                                  [](const ProductPoint& t) {
                                    return MatrixTuple{Matrix::Zero(t.dim(), t.dim()),
                                                       std::vector<Matrix>(t.num_classes(), Matrix::Zero(t.dim(), t.dim()))};
                                  },
                                  start);
  EXPECT_EQ(r.trace.status, SolverStatus::Converged);
  ASSERT_EQ(r.trace.records.size(), 1u);
  EXPECT_EQ(r.trace.records[0].iter, 0);
  EXPECT_EQ(r.point.center().mat(), start.center().mat());
}

TEST(Minimize, SquaredDistanceFindsTarget) {
  std::mt19937_64 rng(61);
  const SpdMatrix b = random_spd(5, rng);
  auto cost = [&](const ProductPoint& t) { return std::pow(riemannian_distance(b, t.classes()[0]), 2); };
  auto egrad = [&](const ProductPoint& t) {
    return MatrixTuple{Matrix::Zero(5, 5), {sq_distance_egrad(b, t.classes()[0])}};
  };
  SolverOptions opts;
  opts.grad_norm_tol = 1e-9;
  const SolverResult r = minimize(cost, egrad, ProductPoint::identity(5, 1, Manifold::Spd), opts);
  EXPECT_EQ(r.trace.status, SolverStatus::Converged);
  EXPECT_LT(riemannian_distance(r.point.classes()[0], b), 1e-5);
  expect_monotone(r.trace);
}

TEST(Minimize, MatchesGmmlClosedForm) {
  std::mt19937_64 rng(62);
  SolverOptions opts;
  opts.grad_norm_tol = 1e-10;
  opts.max_iters = 2000;
  for (int trial = 0; trial < 3; ++trial) {
    const SpdMatrix s = random_spd(6, rng);
    const SpdMatrix d = random_spd(6, rng);
    const SolverResult r = minimize_gmml_objective(s, d, opts);
    EXPECT_LT(riemannian_distance(r.point.classes()[0], gmml(s.mat(), d.mat(), 0.5)), 1e-5);
    expect_monotone(r.trace);
  }
}

TEST(Minimize, MaxItersStatus) {
  std::mt19937_64 rng(63);
  const SpdMatrix s = random_spd(4, rng);
  const SpdMatrix d = random_spd(4, rng);
  SolverOptions opts;
  opts.max_iters = 2;
  const SolverResult r = minimize_gmml_objective(s, d, opts);
  EXPECT_EQ(r.trace.status, SolverStatus::MaxIters);
  EXPECT_EQ(r.trace.records.size(), 3u);
  EXPECT_EQ(r.trace.records.back().step, 0.0);
}

TEST(Minimize, FixedStepGuessAlsoConverges) {
  std::mt19937_64 rng(64);
  const SpdMatrix s = random_spd(4, rng);
  const SpdMatrix d = random_spd(4, rng);
  SolverOptions opts;
  opts.step_guess = StepGuess::Fixed;
  opts.max_iters = 5000;
  const SolverResult r = minimize_gmml_objective(s, d, opts);
  EXPECT_EQ(r.trace.status, SolverStatus::Converged);
  EXPECT_LT(riemannian_distance(r.point.classes()[0], gmml(s.mat(), d.mat(), 0.5)), 1e-5);
}

TEST(DefaultInit, IdentityCovarianceGivesNearIdentity) {
  std::mt19937_64 rng(65);
  const Index p = 4;
  SyntheticSpec spec{{Vector::Zero(p), Vector::Constant(p, 5.0)},
                     {SpdMatrix::identity(p), SpdMatrix::identity(p)},
                     2000,
                     NoiseFamily::gaussian()};
  const LabeledDataset data = synth_generate(spec, 3);
  const PairDifferences pd = build_pairs(data, 10000, 10, 4);
  const ProductPoint init = default_init(pd, Manifold::Spd);
  EXPECT_LT((init.center().mat() - Matrix::Identity(p, p)).norm() / std::sqrt(double(p)), 0.05);
}

TEST(DefaultInit, UnitDetHasUnitDeterminants) {
  std::mt19937_64 rng(66);
  const PairDifferences pd = random_pairs(5, 3, rng);
  const ProductPoint init = default_init(pd, Manifold::UnitDet);
  for (std::size_t i = 0; i <= 3; ++i) EXPECT_NEAR(init.component(i).log_det(), 0.0, 1e-12);
}

TEST(DefaultInit, FeasibleOnUciData) {
  for (const char* name : {"iris.csv", "wine.csv"}) {
    const LabeledDataset data = load_dataset(std::string(RGML_DATA_DIR) + "/" + name, LabelColumn::by_index(-1));
    const PairDifferences pd = build_pairs(data, 450, 450, 1);
    for (CostKind kind : {CostKind::Gaussian, CostKind::Tyler}) {
      EXPECT_TRUE(std::isfinite(rgml_cost(default_init(pd, manifold_for(kind)), pd, {0.05, kind}))) << name;
    }
  }
}

TEST(FitRgml, MonotoneAndUnitDet) {
  std::mt19937_64 rng(67);
  const PairDifferences pd = random_pairs(4, 3, rng);
  for (CostKind kind : {CostKind::Gaussian, CostKind::Tyler}) {
    const SolverResult r = fit_rgml(pd, {0.05, kind});
    EXPECT_EQ(r.trace.status, SolverStatus::Converged);
    expect_monotone(r.trace);
    if (kind == CostKind::Tyler) {
      for (std::size_t i = 0; i <= 3; ++i) EXPECT_LT(std::abs(std::exp(r.point.component(i).log_det()) - 1.0), 1e-8);
    }
  }
}

TEST(FitRgml, TwoStartsAgree) {
  std::mt19937_64 rng(68);
  const PairDifferences pd = random_pairs(4, 2, rng);
  SolverOptions opts;
  opts.grad_norm_tol = 1e-9;
  opts.max_iters = 2000;
  for (CostKind kind : {CostKind::Gaussian, CostKind::Tyler}) {
    const RgmlParams params{0.05, kind};
    auto run = [&](const ProductPoint& start) {
      return minimize([&](const ProductPoint& t) { return rgml_cost(t, pd, params); },
                      [&](const ProductPoint& t) { return rgml_egrad(t, pd, params); }, start, opts);
    };
    const SolverResult a = run(random_point(4, 2, manifold_for(kind), rng));
    const SolverResult b = run(random_point(4, 2, manifold_for(kind), rng));
    const double fa = a.trace.records.back().cost;
    const double fb = b.trace.records.back().cost;
    EXPECT_LE(std::abs(fa - fb) / std::max(1.0, std::abs(fa)), 1e-6);
  }
}

TEST(SolverTrace, CsvLayout) {
  SolverTrace t;
  t.records = {{0, 2.5, 1.0, 0.5}, {1, 1.5, 0.0, 0.0}};
  std::ostringstream os;
  t.write_csv(os);
  EXPECT_EQ(os.str(), "iter,cost,grad_norm,step\n0,2.5,1,0.5\n1,1.5,0,0\n");
  EXPECT_EQ(to_string(SolverStatus::LineSearchFailed), "line_search_failed");
}
