#pragma once

// Riemannian steepest descent with Armijo backtracking along the retraction.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rgml/costs.hpp"
#include "rgml/manifold.hpp"

namespace rgml {

/// Where each backtracking search starts.
///   Fixed:    always at initial_step.
///   Adaptive: at initial_step on the first iteration, then at
///             2 * optimism * (f_prev - f) / ||g||^2, the minimizer of the
///             quadratic model fitted to the last decrease, scaled up.
enum class StepGuess { Fixed, Adaptive };

struct SolverOptions {
  int max_iters = 200;
  double grad_norm_tol = 1e-6;  // in the affine-invariant norm
  double initial_step = 1.0;
  double armijo_shrink = 0.5;
  double armijo_slope = 1e-4;
  double min_step = 1e-12;
  StepGuess step_guess = StepGuess::Adaptive;
  double optimism = 2.0;

  /// Throws InvalidInput unless every field is positive and armijo_shrink < 1.
  void validate() const;
};

enum class SolverStatus { Converged, MaxIters, LineSearchFailed };

std::string to_string(SolverStatus status);

struct IterationRecord {
  int iter = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;  // step accepted when leaving this iterate; 0 for the last one
};

struct SolverTrace {
  std::vector<IterationRecord> records;
  SolverStatus status = SolverStatus::MaxIters;

  /// Header `iter,cost,grad_norm,step`, one row per record.
  void write_csv(std::ostream& out) const;
};

struct SolverResult {
  ProductPoint point;
  SolverTrace trace;
};

using CostFunction = std::function<double(const ProductPoint&)>;
using GradientFunction = std::function<MatrixTuple(const ProductPoint&)>;

/// Minimizes `cost` from `start`. Each iteration steps along -grad with the
/// largest step guess * shrink^j meeting the Armijo condition
///   cost(R(-a g)) <= cost(x) - armijo_slope * a * ||g||^2.
/// Trial points the retraction cannot produce, or with non-finite cost, count
/// as rejections. Returns the last (and best) iterate with its trace.
SolverResult minimize(const CostFunction& cost, const GradientFunction& egrad, const ProductPoint& start,
                      const SolverOptions& opts = {});

/// A = A_k = S/2 (pooled similar-pair scatter, ridged to SPD when needed);
/// on UnitDet every matrix is scaled to determinant 1.
ProductPoint default_init(const PairDifferences& pairs, Manifold manifold);

/// Fits the RGML objective from default_init.
SolverResult fit_rgml(const PairDifferences& pairs, const RgmlParams& params, const SolverOptions& opts = {});

}  // namespace rgml
