#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "numprag/core.hpp"

namespace numprag {

/// Price prior P_S(s) and conditional affect prior P_A(a=1 | s) for one item.
struct PriorSet {
  std::string item;
  Dist<Price> price_prior;
  std::map<Price, double> affect_given_price;

  /// Throws DataError unless the priors cover exactly the grid's states.
  void validate(const PriceGrid& grid) const;

  double affect_prob(Price s, bool affect) const;
};

/// Extends priors elicited on a coarser lattice to `grid`. A state missing
/// from the priors takes the price weight and affect probability of the
/// offset-0 state in its magnitude block; price weights are then renormalized.
/// States in the priors that are not on `grid` are a DataError.
PriorSet adapt_to_grid(const PriorSet& priors, const PriceGrid& grid);

struct GoalPrior {
  Dist<Goal> dist;

  static GoalPrior uniform();
  /// Weights need not sum to one; goals absent from the map get zero weight.
  static GoalPrior from_weights(const std::map<Goal, double>& weights);
  /// "uniform" or "price-exact=1,affect=2,...".
  static GoalPrior parse(std::string_view spec);
};

/// Projection of a meaning onto the dimensions a goal communicates.
struct GoalProjection {
  std::optional<Price> price;
  std::optional<bool> affect;

  bool operator==(const GoalProjection&) const = default;
};

GoalProjection goal_project(const Goal& g, const Meaning& m);

/// L0: exact literal semantics, so all mass sits on state == u and the affect
/// split follows P_A(a | u). Support order is (u, false), (u, true).
Dist<Meaning> literal_listener(Utterance u, const PriorSet& priors, const PriceGrid& grid);

/// S1(u | s, a, g) over the grid's utterances.
Dist<Price> speaker(PriceState s, bool affect, const Goal& g, const PriorSet& priors, const CostModel& cost,
                    const PriceGrid& grid);

struct SpeakerKey {
  PriceState state;
  bool affect = false;
  Goal goal;

  auto operator<=>(const SpeakerKey&) const = default;
};

std::string to_string(const SpeakerKey& key);

/// Externally supplied speaker likelihoods P(u | s, a, g).
struct SpeakerTable {
  std::map<SpeakerKey, Dist<Price>> entries;

  /// Throws DataError naming the key when absent.
  const Dist<Price>& at(const SpeakerKey& key) const;
};

/// Speaker table computed by the engine itself. Meanings with zero prior
/// weight (P_S(s) P_A(a|s) == 0) are omitted: they can carry no S1 mass.
SpeakerTable engine_speaker_table(const PriorSet& priors, const CostModel& cost, const PriceGrid& grid,
                                  const std::vector<Goal>& goals = canonical_goals());

/// Meaning support used by listeners: states ascending, affect false then true.
std::vector<Meaning> meaning_support(const PriceGrid& grid);

/// L1(s, a | u) with the joint goal inference.
Dist<Meaning> pragmatic_listener(Utterance u, const PriorSet& priors, const GoalPrior& goal_prior,
                                 const CostModel& cost, const PriceGrid& grid);

/// L1 with S1 replaced by table lookups.
Dist<Meaning> pragmatic_listener_with_table(Utterance u, const SpeakerTable& table, const PriorSet& priors,
                                            const GoalPrior& goal_prior, const PriceGrid& grid);

/// Per-utterance price posteriors. Rows are utterances, columns states, both
/// in grid order; every row sums to one.
class PosteriorMatrix {
 public:
  PosteriorMatrix(std::vector<Price> utterances, std::vector<Price> states, Eigen::MatrixXd probs);

  const std::vector<Price>& utterances() const noexcept { return utterances_; }
  const std::vector<Price>& states() const noexcept { return states_; }
  const Eigen::MatrixXd& matrix() const noexcept { return probs_; }

  Dist<Price> row(Utterance u) const;
  double at(Utterance u, PriceState s) const;

 private:
  std::vector<Price> utterances_;
  std::vector<Price> states_;
  Eigen::MatrixXd probs_;
};

/// Affect-marginalized L1 rows, power-calibrated with exponent `lambda`
/// and renormalized per utterance.
PosteriorMatrix posterior_price_matrix(const PriorSet& priors, const GoalPrior& goal_prior, const CostModel& cost,
                                       const PriceGrid& grid, double lambda = 1.0);

PosteriorMatrix posterior_price_matrix_with_table(const SpeakerTable& table, const PriorSet& priors,
                                                  const GoalPrior& goal_prior, const PriceGrid& grid,
                                                  double lambda = 1.0);

/// Full L1 for every utterance: rows utterances, columns meaning_support(grid).
Eigen::MatrixXd listener_matrix(const PriorSet& priors, const GoalPrior& goal_prior, const CostModel& cost,
                                const PriceGrid& grid);

/// P(a = 1 | u, s) under L1, for every (u, s) cell with positive posterior mass.
std::map<std::pair<Price, Price>, double> affect_posterior(const PriorSet& priors, const GoalPrior& goal_prior,
                                                           const CostModel& cost, const PriceGrid& grid);

}  // namespace numprag
