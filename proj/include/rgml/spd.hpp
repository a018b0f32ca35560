#pragma once

// Dense symmetric / SPD matrices and eigenvalue-mapped matrix functions.
//
// Every matrix function in the library goes through one symmetric
// eigendecomposition: f(M) = V diag(f(lambda)) V^T.

#include <Eigen/Dense>

#include "rgml/errors.hpp"

namespace rgml {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Smallest admissible eigenvalue relative to the largest one.
inline constexpr double kSpdRelTol = 1e-12;

/// Square symmetric matrix. Symmetry is exact: the input is replaced by
/// (M + M^T) / 2 on construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix zero(Index dim);
  static SymMatrix identity(Index dim);

  const Matrix& mat() const { return m_; }
  Index dim() const { return m_.rows(); }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;

 private:
  Matrix m_;
};

/// Symmetric positive definite matrix. Construction symmetrizes the input and
/// throws NotPositiveDefinite when lambda_min <= kSpdRelTol * lambda_max.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(const Matrix& m);
  explicit SpdMatrix(const SymMatrix& m);

  static SpdMatrix identity(Index dim);

  const Matrix& mat() const { return m_; }
  Index dim() const { return m_.rows(); }
  SymMatrix sym() const;

  /// log|A| via Cholesky.
  double log_det() const;

 private:
  struct Trusted {};
  SpdMatrix(Matrix m, Trusted) : m_(std::move(m)) {}
  friend SpdMatrix detail_make_spd(Matrix m);

  Matrix m_;
};

struct EigenPair {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns
};

/// (M + M^T) / 2. Throws InvalidInput for non-square input.
SymMatrix symmetrize(const Matrix& m);

/// Eigendecomposition of a symmetric matrix. Ascending eigenvalues, columns of
/// `vectors` orthonormal. Throws InvalidInput on non-finite entries.
EigenPair sym_eig(const SymMatrix& m);

/// Scalar function applied to the spectrum.
struct MatrixFunction {
  enum class Kind { Log, Exp, Sqrt, InvSqrt, Pow, Inv };
  Kind kind;
  double exponent = 1.0;  // only used by Pow

  static MatrixFunction log() { return {Kind::Log}; }
  static MatrixFunction exp() { return {Kind::Exp}; }
  static MatrixFunction sqrt() { return {Kind::Sqrt}; }
  static MatrixFunction inv_sqrt() { return {Kind::InvSqrt}; }
  static MatrixFunction pow(double t) { return {Kind::Pow, t}; }
  static MatrixFunction inv() { return {Kind::Inv}; }

  bool requires_positive() const { return kind != Kind::Exp; }
};

/// V diag(f(lambda)) V^T. Positivity-requiring functions throw
/// NotPositiveDefinite carrying the offending eigenvalue when lambda_min <= 0.
/// Unlike SpdMatrix, no relative conditioning bound is imposed on the input.
SymMatrix spd_map(const SymMatrix& m, MatrixFunction f);
SymMatrix spd_map(const SpdMatrix& m, MatrixFunction f);

SymMatrix logm(const SpdMatrix& a);
SpdMatrix expm(const SymMatrix& a);
SpdMatrix sqrtm(const SpdMatrix& a);
SpdMatrix inv_sqrtm(const SpdMatrix& a);
SpdMatrix powm(const SpdMatrix& a, double t);
SpdMatrix inverse(const SpdMatrix& a);

/// Checks positivity of a symmetric matrix the same way SpdMatrix does and
/// returns it as SPD.
SpdMatrix to_spd(const SymMatrix& m);

/// C M C^T for SPD M and invertible C.
SpdMatrix congruence(const Matrix& c, const SpdMatrix& m);

/// M + (ridge_scale * Tr(M) / p) I if M fails the SPD check, otherwise M.
SpdMatrix regularize_to_spd(const Matrix& m, double ridge_scale = 1e-8);

}  // namespace rgml
