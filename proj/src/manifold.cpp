#include "rgml/manifold.hpp"

#include <cmath>
#include <sstream>

namespace rgml {

namespace {

void require_same_dim(Index a, Index b, const char* who) {
  if (a != b) {
    std::ostringstream os;
    os << who << ": dimension mismatch (" << a << " vs " << b << ")";
    throw InvalidInput(os.str());
  }
}

void require_shape(const ProductPoint& theta, const ProductTangent& xi, const char* who) {
  if (xi.classes.size() != theta.num_classes()) throw InvalidInput(std::string(who) + ": class count mismatch");
  require_same_dim(theta.dim(), xi.center.dim(), who);
  for (const auto& x : xi.classes) require_same_dim(theta.dim(), x.dim(), who);
}

void require_shape(const ProductPoint& theta, const MatrixTuple& m, const char* who) {
  if (m.classes.size() != theta.num_classes()) throw InvalidInput(std::string(who) + ": class count mismatch");
  require_same_dim(theta.dim(), m.center.rows(), who);
  require_same_dim(theta.dim(), m.center.cols(), who);
  for (const auto& x : m.classes) {
    require_same_dim(theta.dim(), x.rows(), who);
    require_same_dim(theta.dim(), x.cols(), who);
  }
}

// A^{1/2} and A^{-1/2} from one eigendecomposition.
struct SqrtPair {
  Matrix sqrt;
  Matrix inv_sqrt;
};

SqrtPair sqrt_pair(const SpdMatrix& a) {
  const EigenPair eig = sym_eig(a.sym());
  if (!(eig.values.minCoeff() > 0.0)) throw NotPositiveDefinite("sqrt_pair", eig.values.minCoeff());
  const Vector s = eig.values.array().sqrt();
  return {eig.vectors * s.asDiagonal() * eig.vectors.transpose(),
          eig.vectors * s.cwiseInverse().asDiagonal() * eig.vectors.transpose()};
}

Matrix solve_spd(const SpdMatrix& a, const Matrix& rhs) {
  Eigen::LLT<Matrix> llt(a.mat());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("solve_spd: Cholesky failed", 0.0);
  return llt.solve(rhs);
}

}  // namespace

// ---------------------------------------------------------------------------

ProductTangent ProductTangent::operator+(const ProductTangent& o) const {
  ProductTangent out{center + o.center, {}};
  out.classes.reserve(classes.size());
  for (std::size_t k = 0; k < classes.size(); ++k) out.classes.push_back(classes[k] + o.classes[k]);
  return out;
}

ProductTangent ProductTangent::operator*(double s) const {
  ProductTangent out{center * s, {}};
  out.classes.reserve(classes.size());
  for (const auto& c : classes) out.classes.push_back(c * s);
  return out;
}

MatrixTuple ProductTangent::ambient() const {
  MatrixTuple out{center.mat(), {}};
  for (const auto& c : classes) out.classes.push_back(c.mat());
  return out;
}

ProductTangent ProductTangent::zero(Index dim, std::size_t num_classes) {
  return {SymMatrix::zero(dim), std::vector<SymMatrix>(num_classes, SymMatrix::zero(dim))};
}

ProductPoint::ProductPoint(SpdMatrix center, std::vector<SpdMatrix> classes, Manifold manifold)
    : center_(std::move(center)), classes_(std::move(classes)), manifold_(manifold) {
  if (classes_.empty()) throw InvalidInput("ProductPoint: at least one class matrix is required");
  for (const auto& c : classes_) require_same_dim(center_.dim(), c.dim(), "ProductPoint");
  if (manifold_ == Manifold::UnitDet) {
    for (std::size_t i = 0; i <= classes_.size(); ++i) {
      const double ld = component(i).log_det();
      if (std::abs(ld) > 1e-9) {
        std::ostringstream os;
        os << "ProductPoint: component " << i << " has log-determinant " << ld << " on the unit-determinant manifold";
        throw InvalidInput(os.str());
      }
    }
  }
}

ProductPoint ProductPoint::identity(Index dim, std::size_t num_classes, Manifold manifold) {
  return ProductPoint(SpdMatrix::identity(dim), std::vector<SpdMatrix>(num_classes, SpdMatrix::identity(dim)),
                      manifold);
}

// ---------------------------------------------------------------------------

double spd_inner(const SpdMatrix& a, const SymMatrix& xi, const SymMatrix& eta) {
  require_same_dim(a.dim(), xi.dim(), "spd_inner");
  require_same_dim(a.dim(), eta.dim(), "spd_inner");
  const Matrix ax = solve_spd(a, xi.mat());
  const Matrix ay = solve_spd(a, eta.mat());
  // Tr(X Y) without forming the product.
  return (ax.transpose().array() * ay.array()).sum();
}

SymMatrix spd_project(const SpdMatrix& a, const Matrix& xi, Manifold manifold) {
  require_same_dim(a.dim(), xi.rows(), "spd_project");
  require_same_dim(a.dim(), xi.cols(), "spd_project");
  SymMatrix s(xi);
  if (manifold == Manifold::Spd) return s;
  const double p = static_cast<double>(a.dim());
  const double tr = solve_spd(a, s.mat()).trace();
  return SymMatrix(s.mat() - (tr / p) * a.mat());
}

SpdMatrix spd_exp(const SpdMatrix& a, const SymMatrix& xi) {
  require_same_dim(a.dim(), xi.dim(), "spd_exp");
  const SqrtPair r = sqrt_pair(a);
  const SymMatrix inner_exp = spd_map(SymMatrix(r.inv_sqrt * xi.mat() * r.inv_sqrt), MatrixFunction::exp());
  return SpdMatrix(Matrix(r.sqrt * inner_exp.mat() * r.sqrt));
}

SpdMatrix normalize_det(const SpdMatrix& b) {
  const double scale = std::exp(-b.log_det() / static_cast<double>(b.dim()));
  return SpdMatrix(Matrix(b.mat() * scale));
}

SpdMatrix spd_retract(const SpdMatrix& a, const SymMatrix& xi, Manifold manifold) {
  require_same_dim(a.dim(), xi.dim(), "spd_retract");
  const Matrix second = xi.mat() * solve_spd(a, xi.mat());
  SpdMatrix out(Matrix(a.mat() + xi.mat() + 0.5 * second));
  if (manifold == Manifold::UnitDet) return normalize_det(out);
  return out;
}

SpdMatrix geodesic(const SpdMatrix& a, const SpdMatrix& b, double t) {
  require_same_dim(a.dim(), b.dim(), "geodesic");
  const SqrtPair r = sqrt_pair(a);
  // The whitened matrix can be far worse conditioned than A or B, so it is
  // only required to have a positive spectrum.
  const SymMatrix whitened(r.inv_sqrt * b.mat() * r.inv_sqrt);
  const SymMatrix moved = spd_map(whitened, MatrixFunction::pow(t));
  return SpdMatrix(Matrix(r.sqrt * moved.mat() * r.sqrt));
}

double riemannian_distance(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "riemannian_distance");
  // Eigenvalues of A^-1 B via the generalized symmetric-definite problem.
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(b.mat(), a.mat(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalFailure("riemannian_distance: eigensolver failed");
  const Vector& lambda = solver.eigenvalues();
  if (!(lambda.minCoeff() > 0.0)) throw NotPositiveDefinite("riemannian_distance", lambda.minCoeff());
  return std::sqrt(lambda.array().log().square().sum());
}

// ---------------------------------------------------------------------------

double inner(const ProductPoint& theta, const ProductTangent& xi, const ProductTangent& eta) {
  require_shape(theta, xi, "inner");
  require_shape(theta, eta, "inner");
  double total = spd_inner(theta.center(), xi.center, eta.center);
  for (std::size_t k = 0; k < theta.num_classes(); ++k) {
    total += spd_inner(theta.classes()[k], xi.classes[k], eta.classes[k]);
  }
  return total;
}

double norm(const ProductPoint& theta, const ProductTangent& xi) {
  return std::sqrt(std::max(0.0, inner(theta, xi, xi)));
}

ProductTangent project_tangent(const ProductPoint& theta, const MatrixTuple& ambient) {
  require_shape(theta, ambient, "project_tangent");
  ProductTangent out{spd_project(theta.center(), ambient.center, theta.manifold()), {}};
  out.classes.reserve(theta.num_classes());
  for (std::size_t k = 0; k < theta.num_classes(); ++k) {
    out.classes.push_back(spd_project(theta.classes()[k], ambient.classes[k], theta.manifold()));
  }
  return out;
}

ProductPoint exp_map(const ProductPoint& theta, const ProductTangent& xi) {
  require_shape(theta, xi, "exp_map");
  std::vector<SpdMatrix> classes;
  classes.reserve(theta.num_classes());
  for (std::size_t k = 0; k < theta.num_classes(); ++k) classes.push_back(spd_exp(theta.classes()[k], xi.classes[k]));
  SpdMatrix center = spd_exp(theta.center(), xi.center);
  if (theta.manifold() == Manifold::UnitDet) {
    // Tangent vectors have Tr(A^-1 xi) = 0, so exp preserves det = 1 up to
    // rounding; remove the rounding drift.
    center = normalize_det(center);
    for (auto& c : classes) c = normalize_det(c);
  }
  return ProductPoint(std::move(center), std::move(classes), theta.manifold());
}

ProductPoint retract(const ProductPoint& theta, const ProductTangent& xi) {
  require_shape(theta, xi, "retract");
  std::vector<SpdMatrix> classes;
  classes.reserve(theta.num_classes());
  for (std::size_t k = 0; k < theta.num_classes(); ++k) {
    classes.push_back(spd_retract(theta.classes()[k], xi.classes[k], theta.manifold()));
  }
  return ProductPoint(spd_retract(theta.center(), xi.center, theta.manifold()), std::move(classes),
                      theta.manifold());
}

ProductTangent egrad_to_rgrad(const ProductPoint& theta, const MatrixTuple& egrad) {
  require_shape(theta, egrad, "egrad_to_rgrad");
  MatrixTuple scaled;
  const Matrix& a = theta.center().mat();
  scaled.center = a * egrad.center * a;
  scaled.classes.reserve(theta.num_classes());
  for (std::size_t k = 0; k < theta.num_classes(); ++k) {
    const Matrix& ak = theta.classes()[k].mat();
    scaled.classes.push_back(ak * egrad.classes[k] * ak);
  }
  return project_tangent(theta, scaled);
}

ProductPoint geodesic(const ProductPoint& theta, const ProductPoint& other, double t) {
  if (theta.num_classes() != other.num_classes()) throw InvalidInput("geodesic: class count mismatch");
  if (theta.manifold() != other.manifold()) throw InvalidInput("geodesic: manifold mismatch");
  std::vector<SpdMatrix> classes;
  classes.reserve(theta.num_classes());
  for (std::size_t k = 0; k < theta.num_classes(); ++k) {
    classes.push_back(geodesic(theta.classes()[k], other.classes()[k], t));
  }
  SpdMatrix center = geodesic(theta.center(), other.center(), t);
  if (theta.manifold() == Manifold::UnitDet) {
    // The unit-determinant set is totally geodesic; renormalize rounding only.
    center = normalize_det(center);
    for (auto& c : classes) c = normalize_det(c);
  }
  return ProductPoint(std::move(center), std::move(classes), theta.manifold());
}

bool is_tangent(const ProductPoint& theta, const ProductTangent& xi, double tol) {
  if (xi.classes.size() != theta.num_classes()) return false;
  for (std::size_t i = 0; i <= theta.num_classes(); ++i) {
    const SymMatrix& x = i == 0 ? xi.center : xi.classes[i - 1];
    if (x.dim() != theta.dim()) return false;
    if (theta.manifold() == Manifold::UnitDet) {
      const double tr = solve_spd(theta.component(i), x.mat()).trace();
      if (std::abs(tr) > tol) return false;
    }
  }
  return true;
}

}  // namespace rgml
