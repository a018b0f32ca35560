#pragma once

// Reference metrics and a synthetic data generator.

#include <cstdint>
#include <vector>

#include "rgml/dataset.hpp"
#include "rgml/spd.hpp"

namespace rgml {

/// Closed-form GMML metric A with A^-1 = S^-1 #_t D. PSD scatters are ridged
/// to SPD before use.
SpdMatrix gmml(const Matrix& similar_scatter, const Matrix& dissimilar_scatter, double t);

/// (1/n) sum v v^T over the columns of `vectors`, ridged when rank-deficient.
SpdMatrix scm(const Matrix& vectors);

/// Covariance of the rows of `samples` around their mean (1/m normalization),
/// ridged when rank-deficient.
SpdMatrix sample_covariance(const Matrix& samples);

struct NoiseFamily {
  enum class Kind { Gaussian, StudentT };
  Kind kind = Kind::Gaussian;
  double dof = 0.0;  // StudentT only, > 2

  static NoiseFamily gaussian() { return {}; }
  static NoiseFamily student_t(double nu) { return {Kind::StudentT, nu}; }
};

/// x_kl = mu_k + Sigma_k^{1/2} u_kl with E[u] = 0 and Cov[u] = I.
struct SyntheticSpec {
  std::vector<Vector> means;
  std::vector<SpdMatrix> covariances;
  int samples_per_class = 0;
  NoiseFamily noise;

  void validate() const;
};

/// Draws samples_per_class points per class, labels 1..K in class order.
/// Student-t noise is rescaled to unit covariance. Deterministic in `seed`.
LabeledDataset synth_generate(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace rgml
