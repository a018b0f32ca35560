#pragma once

#include <random>

#include "rgml/costs.hpp"
#include "rgml/manifold.hpp"
#include "rgml/spd.hpp"

namespace rgml::testing {

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

inline SymMatrix random_sym(Index p, std::mt19937_64& rng) { return SymMatrix(random_matrix(p, p, rng)); }

/// Well-conditioned SPD: B B^T / p + I/2.
inline SpdMatrix random_spd(Index p, std::mt19937_64& rng) {
  const Matrix b = random_matrix(p, p, rng);
  return SpdMatrix(Matrix(b * b.transpose() / static_cast<double>(p) + 0.5 * Matrix::Identity(p, p)));
}

inline SpdMatrix random_unit_det(Index p, std::mt19937_64& rng) { return normalize_det(random_spd(p, rng)); }

inline Matrix random_orthogonal(Index p, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(p, p, rng));
  return qr.householderQ() * Matrix::Identity(p, p);
}

/// Invertible with condition number bounded by construction.
inline Matrix random_invertible(Index p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Vector s(p);
  for (Index i = 0; i < p; ++i) s(i) = u(rng);
  return random_orthogonal(p, rng) * s.asDiagonal() * random_orthogonal(p, rng);
}

inline double rel_fro(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

inline ProductPoint random_point(Index p, std::size_t num_classes, Manifold manifold, std::mt19937_64& rng) {
  auto draw = [&] { return manifold == Manifold::UnitDet ? random_unit_det(p, rng) : random_spd(p, rng); };
  std::vector<SpdMatrix> classes;
  for (std::size_t k = 0; k < num_classes; ++k) classes.push_back(draw());
  return ProductPoint(draw(), std::move(classes), manifold);
}

inline MatrixTuple random_ambient(Index p, std::size_t num_classes, std::mt19937_64& rng) {
  MatrixTuple t{random_matrix(p, p, rng), {}};
  for (std::size_t k = 0; k < num_classes; ++k) t.classes.push_back(random_matrix(p, p, rng));
  return t;
}

inline ProductTangent random_tangent(const ProductPoint& theta, std::mt19937_64& rng) {
  return project_tangent(theta, random_ambient(theta.dim(), theta.num_classes(), rng));
}

/// Gaussian difference vectors for K classes with distinct covariances and
/// uneven counts.
inline PairDifferences random_pairs(Index p, std::size_t num_classes, std::mt19937_64& rng, Index base_count = 30) {
  std::vector<Matrix> per_class;
  for (std::size_t k = 0; k < num_classes; ++k) {
    const Matrix mix = random_matrix(p, p, rng) + Matrix::Identity(p, p);
    per_class.push_back(mix * random_matrix(p, base_count + 7 * static_cast<Index>(k), rng));
  }
  return PairDifferences(std::move(per_class), random_matrix(p, base_count, rng) * 3.0);
}

}  // namespace rgml::testing
