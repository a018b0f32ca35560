#include "rgml/costs.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace rgml {

namespace {

constexpr double kMinDifferenceNorm = 1e-12;
constexpr int kMaxRedraws = 100;

void require_nonzero_columns(const Matrix& v, const char* who) {
  for (Index i = 0; i < v.cols(); ++i) {
    if (!(v.col(i).norm() >= kMinDifferenceNorm)) {
      throw InvalidInput(std::string(who) + ": zero or non-finite difference vector");
    }
  }
}

Matrix columns_to_matrix(const std::vector<Vector>& cols, Index p) {
  Matrix out(p, static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Index>(i)) = cols[i];
  return out;
}

void require_compatible(const ProductPoint& theta, const PairDifferences& pairs, const RgmlParams& params,
                        const char* who) {
  if (theta.manifold() != manifold_for(params.cost)) {
    throw InvalidInput(std::string(who) + ": the Gaussian cost needs the SPD product manifold and the Tyler "
                       "cost the unit-determinant one");
  }
  if (theta.num_classes() != pairs.num_classes()) throw InvalidInput(std::string(who) + ": class count mismatch");
  if (theta.dim() != pairs.dim()) throw InvalidInput(std::string(who) + ": dimension mismatch");
  if (!(params.lambda >= 0.0)) throw InvalidInput(std::string(who) + ": lambda must be >= 0");
}

// Lower Cholesky factor of A; the whitened vectors L^-1 s give s^T A^-1 s as
// squared norms.
Eigen::LLT<Matrix> cholesky(const SpdMatrix& a) {
  Eigen::LLT<Matrix> llt(a.mat());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("cholesky failed", 0.0);
  return llt;
}

double log_det_from(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Vector quadratic_forms(const Eigen::LLT<Matrix>& llt, const Matrix& vectors) {
  const Matrix w = llt.matrixL().solve(vectors);
  return w.colwise().squaredNorm().transpose();
}

}  // namespace

// ---------------------------------------------------------------------------

PairDifferences::PairDifferences(std::vector<Matrix> per_class, Matrix cross_class)
    : per_class_(std::move(per_class)), cross_class_(std::move(cross_class)) {
  if (per_class_.empty()) throw InvalidInput("PairDifferences: no classes");
  const Index p = per_class_.front().rows();
  if (p == 0) throw InvalidInput("PairDifferences: zero dimension");
  double total = 0.0;
  for (std::size_t k = 0; k < per_class_.size(); ++k) {
    const Matrix& v = per_class_[k];
    if (v.rows() != p) throw InvalidInput("PairDifferences: dimension mismatch");
    if (v.cols() < 1) throw InvalidInput("PairDifferences: class " + std::to_string(k + 1) + " has no pairs");
    require_nonzero_columns(v, "PairDifferences");
    total += static_cast<double>(v.cols());
  }
  if (cross_class_.cols() > 0 && cross_class_.rows() != p) {
    throw InvalidInput("PairDifferences: cross-class dimension mismatch");
  }
  if (cross_class_.cols() == 0) cross_class_.resize(p, 0);
  require_nonzero_columns(cross_class_, "PairDifferences");
  weights_.reserve(per_class_.size());
  for (const auto& v : per_class_) weights_.push_back(static_cast<double>(v.cols()) / total);
}

Index PairDifferences::num_similar() const {
  Index n = 0;
  for (const auto& v : per_class_) n += v.cols();
  return n;
}

bool PairDifferences::operator==(const PairDifferences& o) const {
  if (per_class_.size() != o.per_class_.size()) return false;
  for (std::size_t k = 0; k < per_class_.size(); ++k) {
    if (per_class_[k].cols() != o.per_class_[k].cols() || per_class_[k] != o.per_class_[k]) return false;
  }
  return cross_class_.cols() == o.cross_class_.cols() && cross_class_ == o.cross_class_;
}

PairDifferences build_pairs(const LabeledDataset& data, Index n_similar, Index n_dissimilar, std::uint64_t seed) {
  const int num_classes = data.num_classes();
  const Index p = data.dim();
  if (n_similar < num_classes) throw InvalidInput("build_pairs: n_S must be at least the number of classes");
  if (n_dissimilar < 0) throw InvalidInput("build_pairs: n_D must be non-negative");
  if (num_classes < 2 && n_dissimilar > 0) throw InvalidInput("build_pairs: cross-class pairs need two classes");

  std::vector<std::vector<Index>> members(static_cast<std::size_t>(num_classes));
  for (int k = 1; k <= num_classes; ++k) {
    members[static_cast<std::size_t>(k - 1)] = data.class_indices(k);
    if (members[static_cast<std::size_t>(k - 1)].size() < 2) {
      throw InvalidInput("build_pairs: class " + std::to_string(k) + " has fewer than 2 samples");
    }
  }

  std::mt19937_64 rng(seed);
  const Matrix& x = data.features();

  std::vector<Matrix> per_class;
  per_class.reserve(members.size());
  const Index base = n_similar / num_classes;
  const Index remainder = n_similar % num_classes;
  for (std::size_t k = 0; k < members.size(); ++k) {
    const auto& idx = members[k];
    const Index target = base + (static_cast<Index>(k) < remainder ? 1 : 0);
    std::uniform_int_distribution<std::size_t> first(0, idx.size() - 1);
    std::uniform_int_distribution<std::size_t> second(0, idx.size() - 2);
    std::vector<Vector> diffs;
    diffs.reserve(static_cast<std::size_t>(target));
    for (Index draw = 0; draw < target; ++draw) {
      for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
        const std::size_t l = first(rng);
        std::size_t q = second(rng);
        if (q >= l) ++q;
        Vector s = x.row(idx[l]).transpose() - x.row(idx[q]).transpose();
        if (s.norm() >= kMinDifferenceNorm) {
          diffs.push_back(std::move(s));
          break;
        }
      }
    }
    per_class.push_back(columns_to_matrix(diffs, p));
  }

  // Uniform over ordered cross-class pairs by rejection.
  const std::vector<int>& labels = data.labels();
  std::uniform_int_distribution<Index> any(0, data.size() - 1);
  std::vector<Vector> cross;
  cross.reserve(static_cast<std::size_t>(n_dissimilar));
  for (Index draw = 0; draw < n_dissimilar; ++draw) {
    for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
      Index l = any(rng);
      Index q = any(rng);
      while (labels[static_cast<std::size_t>(l)] == labels[static_cast<std::size_t>(q)]) {
        l = any(rng);
        q = any(rng);
      }
      Vector d = x.row(l).transpose() - x.row(q).transpose();
      if (d.norm() >= kMinDifferenceNorm) {
        cross.push_back(std::move(d));
        break;
      }
    }
  }

  return PairDifferences(std::move(per_class), columns_to_matrix(cross, p));
}

ClassScatter scatter(const PairDifferences& pairs) {
  const Index p = pairs.dim();
  ClassScatter out;
  out.pooled = Matrix::Zero(p, p);
  for (std::size_t k = 0; k < pairs.num_classes(); ++k) {
    const Matrix& v = pairs.per_class()[k];
    Matrix sk = v * v.transpose() / static_cast<double>(v.cols());
    out.pooled += pairs.weights()[k] * sk;
    out.per_class.push_back(std::move(sk));
  }
  const Matrix& d = pairs.cross_class();
  out.dissimilar = d.cols() > 0 ? Matrix(d * d.transpose() / static_cast<double>(d.cols())) : Matrix::Zero(p, p);
  return out;
}

Manifold manifold_for(CostKind cost) { return cost == CostKind::Gaussian ? Manifold::Spd : Manifold::UnitDet; }

double gaussian_loss(const SpdMatrix& a, const Matrix& class_vectors) {
  if (class_vectors.rows() != a.dim() || class_vectors.cols() == 0) {
    throw InvalidInput("gaussian_loss: expected a non-empty p x n matrix of vectors");
  }
  const auto llt = cholesky(a);
  return quadratic_forms(llt, class_vectors).mean() + log_det_from(llt);
}

double tyler_loss(const SpdMatrix& a, const Matrix& class_vectors) {
  if (class_vectors.rows() != a.dim() || class_vectors.cols() == 0) {
    throw InvalidInput("tyler_loss: expected a non-empty p x n matrix of vectors");
  }
  const auto llt = cholesky(a);
  const Vector q = quadratic_forms(llt, class_vectors);
  if (!(q.minCoeff() > 0.0) || !q.allFinite()) throw NumericalFailure("tyler_loss: non-positive quadratic form");
  const double p = static_cast<double>(a.dim());
  return p * q.array().log().mean() + log_det_from(llt);
}

double rgml_cost(const ProductPoint& theta, const PairDifferences& pairs, const RgmlParams& params) {
  require_compatible(theta, pairs, params, "rgml_cost");
  double h = 0.0;
  for (std::size_t k = 0; k < pairs.num_classes(); ++k) {
    const SpdMatrix& ak = theta.classes()[k];
    const double loss = params.cost == CostKind::Gaussian ? gaussian_loss(ak, pairs.per_class()[k])
                                                          : tyler_loss(ak, pairs.per_class()[k]);
    const double d = params.lambda > 0.0 ? riemannian_distance(theta.center(), ak) : 0.0;
    h += pairs.weights()[k] * (loss + params.lambda * d * d);
  }
  return h;
}

Matrix sq_distance_egrad(const SpdMatrix& c, const SpdMatrix& b) {
  const SymMatrix w = spd_map(b, MatrixFunction::inv_sqrt());
  const SymMatrix whitened(w.mat() * c.mat() * w.mat());
  return -2.0 * w.mat() * spd_map(whitened, MatrixFunction::log()).mat() * w.mat();
}

MatrixTuple rgml_egrad(const ProductPoint& theta, const PairDifferences& pairs, const RgmlParams& params) {
  require_compatible(theta, pairs, params, "rgml_egrad");
  const Index p = theta.dim();
  const double pd = static_cast<double>(p);
  MatrixTuple g{Matrix::Zero(p, p), {}};
  g.classes.reserve(pairs.num_classes());

  for (std::size_t k = 0; k < pairs.num_classes(); ++k) {
    const SpdMatrix& ak = theta.classes()[k];
    const Matrix& v = pairs.per_class()[k];
    const double pik = pairs.weights()[k];
    const double nk = static_cast<double>(v.cols());
    const auto llt = cholesky(ak);
    const Matrix ak_inv = llt.solve(Matrix::Identity(p, p));
    const Matrix w = llt.solve(v);  // columns A_k^-1 s

    Matrix loss_grad;
    if (params.cost == CostKind::Gaussian) {
      loss_grad = -(w * w.transpose()) / nk + ak_inv;
    } else {
      const Vector q = (v.array() * w.array()).colwise().sum().transpose();
      if (!(q.minCoeff() > 0.0)) throw NumericalFailure("rgml_egrad: non-positive quadratic form");
      const Matrix ws = w * q.cwiseSqrt().cwiseInverse().asDiagonal();
      loss_grad = -(pd / nk) * (ws * ws.transpose()) + ak_inv;
    }

    Matrix gk = loss_grad;
    if (params.lambda > 0.0) {
      gk += params.lambda * sq_distance_egrad(theta.center(), ak);
      g.center += pik * params.lambda * sq_distance_egrad(ak, theta.center());
    }
    g.classes.push_back(pik * 0.5 * (gk + gk.transpose()));
  }
  g.center = 0.5 * (g.center + g.center.transpose());
  return g;
}

}  // namespace rgml
