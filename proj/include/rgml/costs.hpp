#pragma once

// Pair differences and the RGML objective
//
//   h(theta) = sum_k pi_k [ L_k(A_k) + lambda * d_R^2(A, A_k) ]
//
// with the Gaussian loss  L_G(A) = (1/n) sum s^T A^-1 s + log|A|
// and Tyler's loss        L_T(A) = (p/n) sum log(s^T A^-1 s) + log|A|.
// The Gaussian objective lives on Manifold::Spd, the Tyler one on
// Manifold::UnitDet.

#include <cstdint>
#include <vector>

#include "rgml/dataset.hpp"
#include "rgml/manifold.hpp"

namespace rgml {

/// Within-class differences s_ki (columns of per_class[k]), cross-class
/// differences d_i (columns of cross_class), and weights pi_k = n_k / n_S.
class PairDifferences {
 public:
  /// Throws InvalidInput if a class has no vectors, dimensions disagree, or a
  /// vector has norm below 1e-12.
  PairDifferences(std::vector<Matrix> per_class, Matrix cross_class);

  const std::vector<Matrix>& per_class() const { return per_class_; }
  const Matrix& cross_class() const { return cross_class_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t num_classes() const { return per_class_.size(); }
  Index dim() const { return per_class_.front().rows(); }
  Index num_similar() const;

  bool operator==(const PairDifferences& o) const;

 private:
  std::vector<Matrix> per_class_;
  Matrix cross_class_;
  std::vector<double> weights_;
};

/// Samples n_S within-class and n_D cross-class difference vectors.
///
/// Similar pairs are split evenly over classes (n_S / K each, the remainder
/// going to the lowest class indices). Each draw picks an ordered pair of
/// distinct indices uniformly, with replacement across draws. Zero differences
/// are redrawn up to 100 times and then dropped. Deterministic in `seed`.
PairDifferences build_pairs(const LabeledDataset& data, Index n_similar, Index n_dissimilar, std::uint64_t seed);

/// Per-class scatters S_k = (1/n_k) sum s s^T, pooled S = sum pi_k S_k and
/// D = (1/n_D) sum d d^T. Matrices may be only PSD.
struct ClassScatter {
  std::vector<Matrix> per_class;
  Matrix pooled;
  Matrix dissimilar;
};

ClassScatter scatter(const PairDifferences& pairs);

enum class CostKind { Gaussian, Tyler };

struct RgmlParams {
  double lambda = 0.05;
  CostKind cost = CostKind::Gaussian;
};

/// Manifold each cost is defined on.
Manifold manifold_for(CostKind cost);

/// class_vectors holds s_ki as columns.
double gaussian_loss(const SpdMatrix& a, const Matrix& class_vectors);
double tyler_loss(const SpdMatrix& a, const Matrix& class_vectors);

double rgml_cost(const ProductPoint& theta, const PairDifferences& pairs, const RgmlParams& params);

/// Euclidean gradient (G, {G_k}) of rgml_cost.
MatrixTuple rgml_egrad(const ProductPoint& theta, const PairDifferences& pairs, const RgmlParams& params);

/// Euclidean gradient of B -> d_R^2(C, B) at B:
///   -2 B^{-1/2} logm(B^{-1/2} C B^{-1/2}) B^{-1/2}.
Matrix sq_distance_egrad(const SpdMatrix& c, const SpdMatrix& b);

}  // namespace rgml
