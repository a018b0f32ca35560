#pragma once

// Affine-invariant geometry of the SPD cone, its unit-determinant
// submanifold, and the (K+1)-fold products built from them.
//
// A point theta = (A, {A_k}) lives on
//   Manifold::Spd       -- (S_p^+)^{K+1}
//   Manifold::UnitDet   -- the same with |A| = |A_k| = 1.
// Both carry the metric <xi, eta> = Tr(A^-1 xi A^-1 eta) + sum_k (same for A_k).

#include <vector>

#include "rgml/spd.hpp"

namespace rgml {

enum class Manifold { Spd, UnitDet };

/// Tuple of K+1 unconstrained square matrices: ambient vectors and Euclidean
/// gradients.
struct MatrixTuple {
  Matrix center;
  std::vector<Matrix> classes;
};

struct ProductTangent {
  SymMatrix center;
  std::vector<SymMatrix> classes;

  ProductTangent operator+(const ProductTangent& o) const;
  ProductTangent operator*(double s) const;
  MatrixTuple ambient() const;

  static ProductTangent zero(Index dim, std::size_t num_classes);
};

class ProductPoint {
 public:
  /// Throws InvalidInput on dimension mismatch, an empty class list, or (for
  /// UnitDet) a determinant off 1 by more than 1e-9 relative.
  ProductPoint(SpdMatrix center, std::vector<SpdMatrix> classes, Manifold manifold);

  /// All-identity point; valid on both manifolds.
  static ProductPoint identity(Index dim, std::size_t num_classes, Manifold manifold);

  const SpdMatrix& center() const { return center_; }
  const std::vector<SpdMatrix>& classes() const { return classes_; }
  const SpdMatrix& component(std::size_t i) const { return i == 0 ? center_ : classes_[i - 1]; }
  Manifold manifold() const { return manifold_; }
  Index dim() const { return center_.dim(); }
  std::size_t num_classes() const { return classes_.size(); }

 private:
  SpdMatrix center_;
  std::vector<SpdMatrix> classes_;
  Manifold manifold_;
};

// ---------------------------------------------------------------------------
// Single-matrix geometry on S_p^+.

double spd_inner(const SpdMatrix& a, const SymMatrix& xi, const SymMatrix& eta);

/// sym(xi) for Manifold::Spd; sym(xi) - Tr(A^-1 sym(xi))/p * A for UnitDet.
SymMatrix spd_project(const SpdMatrix& a, const Matrix& xi, Manifold manifold);

/// A expm(A^-1 xi), computed as A^{1/2} expm(A^{-1/2} xi A^{-1/2}) A^{1/2}.
SpdMatrix spd_exp(const SpdMatrix& a, const SymMatrix& xi);

/// A + xi + 1/2 xi A^-1 xi, divided by its det^{1/p} on UnitDet.
/// Throws NotPositiveDefinite when the result leaves the cone.
SpdMatrix spd_retract(const SpdMatrix& a, const SymMatrix& xi, Manifold manifold);

/// A #_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}.
SpdMatrix geodesic(const SpdMatrix& a, const SpdMatrix& b, double t);

/// ||logm(A^{-1/2} B A^{-1/2})||_F.
double riemannian_distance(const SpdMatrix& a, const SpdMatrix& b);

/// B / det(B)^{1/p}.
SpdMatrix normalize_det(const SpdMatrix& b);

// ---------------------------------------------------------------------------
// Product manifold.

double inner(const ProductPoint& theta, const ProductTangent& xi, const ProductTangent& eta);
double norm(const ProductPoint& theta, const ProductTangent& xi);

ProductTangent project_tangent(const ProductPoint& theta, const MatrixTuple& ambient);
ProductPoint exp_map(const ProductPoint& theta, const ProductTangent& xi);
ProductPoint retract(const ProductPoint& theta, const ProductTangent& xi);

/// P_theta(A G A, {A_k G_k A_k}).
ProductTangent egrad_to_rgrad(const ProductPoint& theta, const MatrixTuple& egrad);

/// Componentwise geodesic theta #_t other.
ProductPoint geodesic(const ProductPoint& theta, const ProductPoint& other, double t);

/// True when every component is symmetric and, on UnitDet, satisfies
/// |Tr(A^-1 xi)| <= tol.
bool is_tangent(const ProductPoint& theta, const ProductTangent& xi, double tol = 1e-9);

}  // namespace rgml
