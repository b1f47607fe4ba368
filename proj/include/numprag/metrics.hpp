#pragma once

#include <map>
#include <string>
#include <utility>

#include "numprag/engine.hpp"
#include "numprag/judgments.hpp"

namespace numprag {

/// Probability that the true price lies below the uttered one.
double hyperbole_prob(const Dist<Price>& posterior, Utterance u);

/// Mean hyperbole probability per magnitude block, over every offset in the block.
std::map<std::int64_t, double> hyperbole_profile(const PosteriorMatrix& matrix, const PriceGrid& grid);

/// P(s = u) minus the mass on grid states s != u with |s - u| <= 3.
double halo_bias(const Dist<Price>& posterior, Utterance u, const PriceGrid& grid);

struct HaloSummary {
  double sharp_mean = 0.0;
  double round_mean = 0.0;
};

HaloSummary halo_summary(const PosteriorMatrix& matrix, const PriceGrid& grid);

struct AffectComparison {
  double literal_mean = 0.0;
  double hyperbolic_mean = 0.0;
  std::size_t literal_cells = 0;
  std::size_t hyperbolic_cells = 0;
};

using AffectField = std::map<std::pair<Price, Price>, double>;  // (u, s) -> P(affect)

/// Cells are classified after rounding both prices to tens: literal when
/// equal, hyperbolic when u is larger; the rest are ignored.
AffectComparison affect_comparison(const AffectField& affect, const PriceGrid& grid);

/// Per-item comparisons plus a pooled entry under the key "*".
std::map<std::string, AffectComparison> affect_comparison_by_item(const JudgmentTable& table, const PriceGrid& grid);

/// Pearson correlation over the shared flattening order. Tables must have the
/// same kind and identical key sets.
double correlate_tables(const JudgmentTable& a, const JudgmentTable& b);

}  // namespace numprag
