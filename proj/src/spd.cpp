#include "rgml/spd.hpp"

#include <cmath>
#include <sstream>

namespace rgml {

SpdMatrix detail_make_spd(Matrix m) { return SpdMatrix(std::move(m), SpdMatrix::Trusted{}); }

namespace {

void require_square(const Matrix& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << who << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw InvalidInput(os.str());
  }
}

void require_finite(const Matrix& m, const char* who) {
  if (!m.allFinite()) throw InvalidInput(std::string(who) + ": non-finite entries");
}

// Throws unless lambda_min > kSpdRelTol * lambda_max.
void require_positive_spectrum(const Vector& values, const char* who) {
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  if (!(hi > 0.0) || !(lo > kSpdRelTol * hi)) {
    throw NotPositiveDefinite(std::string(who) + ": matrix is not positive definite", lo);
  }
}

double apply_scalar(double x, const MatrixFunction& f) {
  switch (f.kind) {
    case MatrixFunction::Kind::Log: return std::log(x);
    case MatrixFunction::Kind::Exp: return std::exp(x);
    case MatrixFunction::Kind::Sqrt: return std::sqrt(x);
    case MatrixFunction::Kind::InvSqrt: return 1.0 / std::sqrt(x);
    case MatrixFunction::Kind::Pow: return std::pow(x, f.exponent);
    case MatrixFunction::Kind::Inv: return 1.0 / x;
  }
  return x;
}

Matrix reconstruct(const EigenPair& eig, const Vector& mapped) {
  Matrix out = eig.vectors * mapped.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (out + out.transpose());
}

// Applies f to the spectrum and also reports the mapped spectrum so callers
// can decide positivity of the result without a second decomposition.
Matrix map_spectrum(const SymMatrix& m, const MatrixFunction& f, Vector* mapped_out) {
  const EigenPair eig = sym_eig(m);
  if (f.requires_positive() && !(eig.values.minCoeff() > 0.0)) {
    throw NotPositiveDefinite("spd_map: non-positive eigenvalue", eig.values.minCoeff());
  }
  Vector mapped = eig.values.unaryExpr([&](double x) { return apply_scalar(x, f); });
  Matrix out = reconstruct(eig, mapped);
  if (mapped_out) *mapped_out = std::move(mapped);
  return out;
}

SpdMatrix map_to_spd(const SymMatrix& m, const MatrixFunction& f) {
  Vector mapped;
  Matrix out = map_spectrum(m, f, &mapped);
  require_positive_spectrum(mapped, "spd_map result");
  return detail_make_spd(std::move(out));
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
  require_square(m, "SymMatrix");
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::zero(Index dim) { return SymMatrix(Matrix::Zero(dim, dim)); }
SymMatrix SymMatrix::identity(Index dim) { return SymMatrix(Matrix::Identity(dim, dim)); }

SymMatrix SymMatrix::operator+(const SymMatrix& o) const { return SymMatrix(m_ + o.m_); }
SymMatrix SymMatrix::operator-(const SymMatrix& o) const { return SymMatrix(m_ - o.m_); }
SymMatrix SymMatrix::operator*(double s) const { return SymMatrix(m_ * s); }

SpdMatrix::SpdMatrix(const Matrix& m) : SpdMatrix(SymMatrix(m)) {}

SpdMatrix::SpdMatrix(const SymMatrix& m) {
  const EigenPair eig = sym_eig(m);
  require_positive_spectrum(eig.values, "SpdMatrix");
  m_ = m.mat();
}

SpdMatrix SpdMatrix::identity(Index dim) { return detail_make_spd(Matrix::Identity(dim, dim)); }

SymMatrix SpdMatrix::sym() const { return SymMatrix(m_); }

double SpdMatrix::log_det() const {
  Eigen::LLT<Matrix> llt(m_);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("log_det: Cholesky failed", sym_eig(sym()).values.minCoeff());
  }
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

SymMatrix symmetrize(const Matrix& m) { return SymMatrix(m); }

EigenPair sym_eig(const SymMatrix& m) {
  require_finite(m.mat(), "sym_eig");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.mat());
  if (solver.info() != Eigen::Success) throw NumericalFailure("sym_eig: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

SymMatrix spd_map(const SymMatrix& m, MatrixFunction f) {
  return SymMatrix(map_spectrum(m, f, nullptr));
}

SymMatrix spd_map(const SpdMatrix& m, MatrixFunction f) { return spd_map(m.sym(), f); }

SymMatrix logm(const SpdMatrix& a) { return spd_map(a, MatrixFunction::log()); }
SpdMatrix expm(const SymMatrix& a) { return map_to_spd(a, MatrixFunction::exp()); }
SpdMatrix sqrtm(const SpdMatrix& a) { return map_to_spd(a.sym(), MatrixFunction::sqrt()); }
SpdMatrix inv_sqrtm(const SpdMatrix& a) { return map_to_spd(a.sym(), MatrixFunction::inv_sqrt()); }
SpdMatrix powm(const SpdMatrix& a, double t) { return map_to_spd(a.sym(), MatrixFunction::pow(t)); }
SpdMatrix inverse(const SpdMatrix& a) { return map_to_spd(a.sym(), MatrixFunction::inv()); }

SpdMatrix to_spd(const SymMatrix& m) { return SpdMatrix(m); }

SpdMatrix congruence(const Matrix& c, const SpdMatrix& m) {
  if (c.cols() != m.dim()) throw InvalidInput("congruence: dimension mismatch");
  return SpdMatrix(Matrix(c * m.mat() * c.transpose()));
}

SpdMatrix regularize_to_spd(const Matrix& m, double ridge_scale) {
  const SymMatrix s(m);
  const EigenPair eig = sym_eig(s);
  const double hi = eig.values.maxCoeff();
  if (hi > 0.0 && eig.values.minCoeff() > kSpdRelTol * hi) return detail_make_spd(s.mat());
  const Index p = s.dim();
  const double trace = s.mat().trace();
  if (!(trace > 0.0)) throw NotPositiveDefinite("regularize_to_spd: non-positive trace", trace);
  return SpdMatrix(Matrix(s.mat() + ridge_scale * trace / static_cast<double>(p) * Matrix::Identity(p, p)));
}

}  // namespace rgml
