#include "rgml/baselines.hpp"

#include <cmath>
#include <random>

#include "rgml/manifold.hpp"

namespace rgml {

SpdMatrix gmml(const Matrix& similar_scatter, const Matrix& dissimilar_scatter, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("gmml: t must lie in [0, 1]");
  const SpdMatrix s = regularize_to_spd(similar_scatter);
  const SpdMatrix d = regularize_to_spd(dissimilar_scatter);
  return inverse(geodesic(inverse(s), d, t));
}

SpdMatrix scm(const Matrix& vectors) {
  if (vectors.cols() == 0 || vectors.rows() == 0) throw InvalidInput("scm: no vectors");
  return regularize_to_spd(vectors * vectors.transpose() / static_cast<double>(vectors.cols()));
}

SpdMatrix sample_covariance(const Matrix& samples) {
  if (samples.rows() < 2) throw InvalidInput("sample_covariance: need at least two samples");
  const Matrix centered = samples.rowwise() - samples.colwise().mean();
  return scm(centered.transpose());
}

void SyntheticSpec::validate() const {
  if (means.empty()) throw InvalidInput("SyntheticSpec: no classes");
  if (means.size() != covariances.size()) throw InvalidInput("SyntheticSpec: one covariance per class mean");
  if (samples_per_class < 2) throw InvalidInput("SyntheticSpec: need at least two samples per class");
  const Index p = means.front().size();
  for (std::size_t k = 0; k < means.size(); ++k) {
    if (means[k].size() != p || covariances[k].dim() != p) throw InvalidInput("SyntheticSpec: dimension mismatch");
  }
  if (noise.kind == NoiseFamily::Kind::StudentT && !(noise.dof > 2.0)) {
    throw InvalidInput("SyntheticSpec: Student-t degrees of freedom must exceed 2");
  }
}

LabeledDataset synth_generate(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Index p = spec.means.front().size();
  const auto num_classes = static_cast<Index>(spec.means.size());
  const Index n = spec.samples_per_class;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(spec.noise.kind == NoiseFamily::Kind::StudentT ? spec.noise.dof : 1.0);

  Matrix features(num_classes * n, p);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(num_classes * n));
  for (Index k = 0; k < num_classes; ++k) {
    const Matrix root = sqrtm(spec.covariances[static_cast<std::size_t>(k)]).mat();
    for (Index i = 0; i < n; ++i) {
      Vector u(p);
      for (Index j = 0; j < p; ++j) u(j) = normal(rng);
      if (spec.noise.kind == NoiseFamily::Kind::StudentT) {
        // Multivariate t has covariance nu/(nu-2) I; rescale to I.
        const double nu = spec.noise.dof;
        u *= std::sqrt((nu - 2.0) / chi2(rng));
      }
      features.row(k * n + i) = (spec.means[static_cast<std::size_t>(k)] + root * u).transpose();
      labels.push_back(static_cast<int>(k + 1));
    }
  }
  return LabeledDataset("synthetic", std::move(features), std::move(labels), static_cast<int>(num_classes));
}

}  // namespace rgml
