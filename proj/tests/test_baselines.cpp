#include <gtest/gtest.h>

#include <cmath>

#include "rgml/baselines.hpp"
#include "rgml/experiment.hpp"
#include "test_util.hpp"

using namespace rgml;
using namespace rgml::testing;

namespace {

// Pair scatter of synthetic Gaussian data against its population value.
double covariance_gap(Index n_pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index p = 5;
  SyntheticSpec spec;
  for (int k = 0; k < 3; ++k) {
    spec.means.push_back(random_matrix(p, 1, rng).col(0) * 4.0);
    spec.covariances.push_back(random_spd(p, rng));
  }
  spec.samples_per_class = 3000;
  const LabeledDataset data = synth_generate(spec, seed + 1);
  const PairDifferences pd = build_pairs(data, n_pairs, 0, seed + 2);
  Matrix truth = Matrix::Zero(p, p);
  for (std::size_t k = 0; k < 3; ++k) truth += pd.weights()[k] * spec.covariances[k].mat();
  return (0.5 * scatter(pd).pooled - truth).norm() / truth.norm();
}

}  // namespace

TEST(Gmml, ZeroGivesSimilarScatter) {
  std::mt19937_64 rng(70);
  const SpdMatrix s = random_spd(4, rng);
  const SpdMatrix d = random_spd(4, rng);
  EXPECT_LT(rel_fro(gmml(s.mat(), d.mat(), 0.0).mat(), s.mat()), 1e-10);
}

TEST(Gmml, InverseDissimilarFixesEveryT) {
  std::mt19937_64 rng(71);
  const SpdMatrix s = random_spd(4, rng);
  const Matrix d = inverse(s).mat();
  for (double t : {0.0, 0.3, 0.5, 1.0}) EXPECT_LT(rel_fro(gmml(s.mat(), d, t).mat(), s.mat()), 1e-10);
}

TEST(Gmml, GeodesicInT) {
  std::mt19937_64 rng(72);
  const SpdMatrix s = random_spd(5, rng);
  const SpdMatrix d = random_spd(5, rng);
  const SpdMatrix base = inverse(gmml(s.mat(), d.mat(), 0.0));
  const double full = riemannian_distance(inverse(s), d);
  for (double t : {0.2, 0.5, 0.8}) {
    EXPECT_NEAR(riemannian_distance(base, inverse(gmml(s.mat(), d.mat(), t))), t * full, 1e-8);
  }
}

TEST(Gmml, RejectsBadT) {
  EXPECT_THROW(gmml(Matrix::Identity(2, 2), Matrix::Identity(2, 2), 1.5), InvalidInput);
  EXPECT_THROW(gmml(Matrix::Identity(2, 2), Matrix::Identity(2, 2), -0.1), InvalidInput);
}

TEST(Scm, PlusMinusAxis) {
  Matrix v(2, 2);
  v << 1, -1, 0, 0;
  const Matrix out = scm(v).mat();
  EXPECT_NEAR(out(0, 0), 1.0, 1e-7);
  EXPECT_NEAR(out(1, 1), 0.5e-8, 1e-15);
  EXPECT_EQ(out(0, 1), 0.0);
}

TEST(Scm, OrthogonalEquivariance) {
  std::mt19937_64 rng(73);
  const Matrix v = random_matrix(4, 30, rng);
  const Matrix q = random_orthogonal(4, rng);
  EXPECT_LT((scm(q * v).mat() - q * scm(v).mat() * q.transpose()).norm(), 1e-12);
}

TEST(Scm, MatchesPooledScatter) {
  std::mt19937_64 rng(74);
  const PairDifferences pd = random_pairs(4, 3, rng);
  Matrix all(4, pd.num_similar());
  Index c = 0;
  for (const auto& m : pd.per_class()) {
    all.middleCols(c, m.cols()) = m;
    c += m.cols();
  }
  EXPECT_LT((scm(all).mat() - scatter(pd).pooled).norm(), 1e-12);
  EXPECT_THROW(scm(Matrix(3, 0)), InvalidInput);
}

TEST(SampleCovariance, CentersTheData) {
  Matrix x(4, 2);
  x << 10, 1, 12, 1, 10, 3, 12, 3;
  const Matrix c = sample_covariance(x).mat();
  EXPECT_NEAR(c(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(c(1, 1), 1.0, 1e-12);
  EXPECT_NEAR(c(0, 1), 0.0, 1e-12);
}

TEST(Synth, DeterministicAndValidated) {
  SyntheticSpec spec{{Vector::Zero(2)}, {SpdMatrix::identity(2)}, 10, NoiseFamily::gaussian()};
  EXPECT_EQ(synth_generate(spec, 5).features(), synth_generate(spec, 5).features());
  spec.samples_per_class = 0;
  EXPECT_THROW(synth_generate(spec, 5), InvalidInput);
  spec.samples_per_class = 10;
  spec.noise = NoiseFamily::student_t(2.0);
  EXPECT_THROW(synth_generate(spec, 5), InvalidInput);
}

TEST(Synth, MomentsConverge) {
  std::mt19937_64 rng(75);
  const SpdMatrix sigma = random_spd(3, rng);
  Vector mu(3);
  mu << 1, -2, 3;
  for (NoiseFamily noise : {NoiseFamily::gaussian(), NoiseFamily::student_t(8.0)}) {
    const LabeledDataset data = synth_generate({{mu}, {sigma}, 40000, noise}, 9);
    const Vector mean = data.features().colwise().mean().transpose();
    EXPECT_LT((mean - mu).norm(), 0.05);
    EXPECT_LT(rel_fro(sample_covariance(data.features()).mat(), sigma.mat()), 0.06);
  }
}

TEST(Synth, PairScatterMatchesCovarianceView) {
  EXPECT_LE(covariance_gap(10000, 1), 0.05);
}

TEST(Synth, PairScatterErrorShrinksWithSize) {
  // Averaged over seeds, 16x more pairs should cut the error by about 4x.
  double small = 0.0;
  double large = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    small += covariance_gap(600, 10 + seed);
    large += covariance_gap(9600, 10 + seed);
  }
  EXPECT_GT(small / large, 2.0);
}

TEST(Synth, StudentTDirectionalCheck) {
  // Heavy-tailed classes with 10% training mislabels; recorded, not asserted.
  std::mt19937_64 rng(76);
  const Index p = 4;
  SyntheticSpec spec;
  for (int k = 0; k < 2; ++k) {
    spec.means.push_back(Vector::Constant(p, 1.5 * k));
    spec.covariances.push_back(random_spd(p, rng));
  }
  spec.samples_per_class = 100;
  spec.noise = NoiseFamily::student_t(3.0);
  const LabeledDataset data = synth_generate(spec, 77);
  ExperimentConfig cfg;
  cfg.repeats = 10;
  cfg.mislabel_rate = 0.1;
  cfg.seed = 5;
  cfg.method = Method::RgmlTyler;
  const double tyler = cross_validate(cfg, data).mean_error_pct;
  cfg.method = Method::RgmlGaussian;
  const double gauss = cross_validate(cfg, data).mean_error_pct;
  RecordProperty("tyler_error_pct", std::to_string(tyler));
  RecordProperty("gaussian_error_pct", std::to_string(gauss));
  EXPECT_TRUE(std::isfinite(tyler) && std::isfinite(gauss));
}
