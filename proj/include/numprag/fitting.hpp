#pragma once

#include <map>
#include <string>
#include <vector>

#include "numprag/calibration.hpp"
#include "numprag/engine.hpp"
#include "numprag/judgments.hpp"

namespace numprag {

/// Half-open lattice {start + i * step : start + i * step < stop}.
struct GridRange {
  double start;
  double stop;
  double step;

  std::vector<double> points() const;

  /// Calibration exponent lattice [0, 1) in steps of 0.01.
  static GridRange default_lambda() { return {0.0, 1.0, 0.01}; }
  /// Sharp-cost lattice [1, 4) in steps of 0.1.
  static GridRange default_cost() { return {1.0, 4.0, 0.1}; }

  /// "<start>:<stop>:<step>".
  static GridRange parse(std::string_view spec);
};

struct FitResult {
  double lambda = 1.0;
  double sharp_cost = 1.0;
  double correlation = 0.0;
  int grid_evaluations = 0;
};

/// Sample Pearson correlation. Throws DomainError on length mismatch, fewer
/// than three points, or a constant vector.
template <typename DerivedX, typename DerivedY>
double pearson(const Eigen::MatrixBase<DerivedX>& xs, const Eigen::MatrixBase<DerivedY>& ys) {
  if (xs.size() != ys.size()) throw DomainError("pearson: vectors differ in length");
  if (xs.size() < 3) throw DomainError("pearson: need at least three points");
  if (xs.minCoeff() == xs.maxCoeff() || ys.minCoeff() == ys.maxCoeff()) {
    throw DomainError("pearson: correlation undefined for a constant vector");
  }
  const Eigen::ArrayXd dx = xs.array().template cast<double>() - xs.template cast<double>().mean();
  const Eigen::ArrayXd dy = ys.array().template cast<double>() - ys.template cast<double>().mean();
  const double r = (dx * dy).sum() / std::sqrt((dx * dx).sum() * (dy * dy).sum());
  return std::clamp(r, -1.0, 1.0);
}

inline double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  return pearson(Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())),
                 Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size())));
}

/// Model posteriors for all items flattened in judgment-table order
/// (item, u, s ascending).
Eigen::VectorXd flatten_posteriors(const std::map<std::string, PosteriorMatrix>& matrices);

/// Builds the InterpretationUS table a model would produce.
JudgmentTable posterior_table(const std::map<std::string, PosteriorMatrix>& matrices);

/// Exhaustive search over the (lambda, sharp cost) lattice maximizing the
/// pooled Pearson correlation between model posteriors and `target`. Ties go
/// to the smaller lambda, then the smaller cost. Lattice points whose
/// correlation is undefined are counted but never selected.
FitResult fit_grid(const std::map<std::string, PriorSet>& priors, const GoalPrior& goal_prior, const PriceGrid& grid,
                   const JudgmentTable& target, const GridRange& lambda_range = GridRange::default_lambda(),
                   const GridRange& cost_range = GridRange::default_cost());

/// Objective at a single lattice point.
double fit_objective(const std::map<std::string, PriorSet>& priors, const GoalPrior& goal_prior,
                     const PriceGrid& grid, const JudgmentTable& target, double lambda, double sharp_cost);

}  // namespace numprag
