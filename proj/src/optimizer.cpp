#include "rgml/optimizer.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>

namespace rgml {

void SolverOptions::validate() const {
  if (max_iters < 0) throw InvalidInput("SolverOptions: max_iters must be non-negative");
  if (!(grad_norm_tol > 0.0) || !(initial_step > 0.0) || !(armijo_slope > 0.0) || !(min_step > 0.0)) {
    throw InvalidInput("SolverOptions: tolerances and step sizes must be positive");
  }
  if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0)) throw InvalidInput("SolverOptions: armijo_shrink must lie in (0,1)");
  if (!(optimism > 0.0)) throw InvalidInput("SolverOptions: optimism must be positive");
}

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Converged: return "converged";
    case SolverStatus::MaxIters: return "max_iters";
    case SolverStatus::LineSearchFailed: return "line_search_failed";
  }
  return "unknown";
}

void SolverTrace::write_csv(std::ostream& out) const {
  out << "iter,cost,grad_norm,step\n";
  out << std::setprecision(17);
  for (const auto& r : records) out << r.iter << ',' << r.cost << ',' << r.grad_norm << ',' << r.step << '\n';
}

namespace {

struct Trial {
  ProductPoint point;
  double cost;
};

std::optional<Trial> try_step(const CostFunction& cost, const ProductPoint& x, const ProductTangent& direction,
                              double step) {
  try {
    ProductPoint y = retract(x, direction * step);
    const double fy = cost(y);
    if (!std::isfinite(fy)) return std::nullopt;
    return Trial{std::move(y), fy};
  } catch (const NotPositiveDefinite&) {
    return std::nullopt;
  } catch (const NumericalFailure&) {
    return std::nullopt;
  }
}

}  // namespace

SolverResult minimize(const CostFunction& cost, const GradientFunction& egrad, const ProductPoint& start,
                      const SolverOptions& opts) {
  opts.validate();
  SolverResult result{start, {}};
  ProductPoint& x = result.point;
  SolverTrace& trace = result.trace;

  double fx = cost(x);
  if (!std::isfinite(fx)) throw NumericalFailure("minimize: cost is not finite at the starting point");
  double previous_cost = std::numeric_limits<double>::quiet_NaN();

  for (int iter = 0;; ++iter) {
    const ProductTangent grad = egrad_to_rgrad(x, egrad(x));
    const double gnorm = norm(x, grad);
    trace.records.push_back({iter, fx, gnorm, 0.0});

    if (gnorm <= opts.grad_norm_tol) {
      trace.status = SolverStatus::Converged;
      break;
    }
    if (iter >= opts.max_iters) {
      trace.status = SolverStatus::MaxIters;
      break;
    }

    const ProductTangent descent = grad * -1.0;
    const double decrease = opts.armijo_slope * gnorm * gnorm;
    std::optional<Trial> accepted;
    double step = opts.initial_step;
    if (opts.step_guess == StepGuess::Adaptive && std::isfinite(previous_cost)) {
      const double guess = 2.0 * opts.optimism * (previous_cost - fx) / (gnorm * gnorm);
      if (std::isfinite(guess) && guess > opts.min_step) step = guess;
    }
    for (; step >= opts.min_step; step *= opts.armijo_shrink) {
      auto trial = try_step(cost, x, descent, step);
      if (trial && trial->cost <= fx - step * decrease) {
        accepted = std::move(trial);
        break;
      }
    }
    if (!accepted) {
      trace.status = SolverStatus::LineSearchFailed;
      break;
    }
    trace.records.back().step = step;
    previous_cost = fx;
    x = std::move(accepted->point);
    fx = accepted->cost;
  }
  return result;
}

ProductPoint default_init(const PairDifferences& pairs, Manifold manifold) {
  const ClassScatter sc = scatter(pairs);
  SpdMatrix a = regularize_to_spd(0.5 * sc.pooled);
  if (manifold == Manifold::UnitDet) a = normalize_det(a);
  return ProductPoint(a, std::vector<SpdMatrix>(pairs.num_classes(), a), manifold);
}

SolverResult fit_rgml(const PairDifferences& pairs, const RgmlParams& params, const SolverOptions& opts) {
  const ProductPoint start = default_init(pairs, manifold_for(params.cost));
  return minimize([&](const ProductPoint& t) { return rgml_cost(t, pairs, params); },
                  [&](const ProductPoint& t) { return rgml_egrad(t, pairs, params); }, start, opts);
}

}  // namespace rgml
