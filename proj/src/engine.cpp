#include "numprag/engine.hpp"

#include <charconv>
#include <functional>

#include "numprag/calibration.hpp"

namespace numprag {

void PriorSet::validate(const PriceGrid& grid) const {
  const auto& states = grid.states();
  auto support = price_prior.support();
  std::sort(support.begin(), support.end());
  if (support != states) {
    throw DataError("price prior for '" + item + "' does not cover grid " + grid.spec() + " exactly");
  }
  for (const auto& s : states) {
    auto it = affect_given_price.find(s);
    if (it == affect_given_price.end()) {
      throw DataError("affect prior for '" + item + "' missing state " + to_string(s));
    }
    if (!(it->second >= 0.0 && it->second <= 1.0)) {
      throw DataError("affect prior for '" + item + "' at state " + to_string(s) + " outside [0, 1]");
    }
  }
}

double PriorSet::affect_prob(Price s, bool affect) const {
  auto it = affect_given_price.find(s);
  if (it == affect_given_price.end()) throw DataError("affect prior missing state " + to_string(s));
  return affect ? it->second : 1.0 - it->second;
}

PriorSet adapt_to_grid(const PriorSet& priors, const PriceGrid& grid) {
  for (const auto& s : priors.price_prior.support()) {
    if (!grid.contains(s)) {
      throw DataError("prior state " + to_string(s) + " for '" + priors.item + "' is not on grid " + grid.spec());
    }
  }
  std::vector<double> weights;
  std::map<Price, double> affect;
  for (const auto& s : grid.states()) {
    Price source = s;
    if (!priors.price_prior.index_of(s) || !priors.affect_given_price.count(s)) {
      source = Price(*grid.magnitude_of(s));
    }
    auto idx = priors.price_prior.index_of(source);
    auto aff = priors.affect_given_price.find(source);
    if (!idx || aff == priors.affect_given_price.end()) {
      throw DataError("priors for '" + priors.item + "' have no value for state " + to_string(s) +
                      " or its block anchor " + to_string(source));
    }
    weights.push_back(priors.price_prior.probs()(static_cast<Eigen::Index>(*idx)));
    affect[s] = aff->second;
  }
  return PriorSet{priors.item, normalize(weights, grid.states()), std::move(affect)};
}

GoalPrior GoalPrior::uniform() {
  std::vector<double> w(canonical_goals().size(), 1.0);
  return GoalPrior{normalize(w, canonical_goals())};
}

GoalPrior GoalPrior::from_weights(const std::map<Goal, double>& weights) {
  std::vector<double> w;
  for (const auto& g : canonical_goals()) {
    auto it = weights.find(g);
    w.push_back(it == weights.end() ? 0.0 : it->second);
  }
  return GoalPrior{normalize(w, canonical_goals())};
}

GoalPrior GoalPrior::parse(std::string_view spec) {
  if (spec.empty() || spec == "uniform") return uniform();
  std::map<Goal, double> weights;
  while (!spec.empty()) {
    auto comma = spec.find(',');
    auto token = spec.substr(0, comma);
    auto eq = token.find('=');
    if (eq == std::string_view::npos) throw UsageError("goal prior entry needs <goal>=<weight>");
    double w = 0;
    auto value = token.substr(eq + 1);
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), w);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw UsageError("bad goal prior weight '" + std::string(value) + "'");
    }
    weights[Goal::parse(token.substr(0, eq))] = w;
    if (comma == std::string_view::npos) break;
    spec.remove_prefix(comma + 1);
  }
  return from_weights(weights);
}

GoalProjection goal_project(const Goal& g, const Meaning& m) {
  GoalProjection p;
  if (g.communicates_price()) {
    p.price = g.precision() == Precision::Exact ? m.state : round10(m.state);
  }
  if (g.communicates_affect()) p.affect = m.affect;
  return p;
}

Dist<Meaning> literal_listener(Utterance u, const PriorSet& priors, const PriceGrid& grid) {
  if (!grid.contains(u)) throw DomainError("utterance " + to_string(u) + " is not on grid " + grid.spec());
  const double p_affect = priors.affect_prob(u, true);
  Eigen::VectorXd w(2);
  w << 1.0 - p_affect, p_affect;
  return normalize<Meaning, double>(w, {Meaning{u, false}, Meaning{u, true}});
}

std::string to_string(const SpeakerKey& key) {
  return "(s=" + to_string(key.state) + ", a=" + (key.affect ? "1" : "0") + ", g=" + key.goal.name() + ")";
}

const Dist<Price>& SpeakerTable::at(const SpeakerKey& key) const {
  auto it = entries.find(key);
  if (it == entries.end()) throw DataError("speaker table has no entry for " + to_string(key));
  return it->second;
}

std::vector<Meaning> meaning_support(const PriceGrid& grid) {
  std::vector<Meaning> out;
  out.reserve(grid.states().size() * 2);
  for (const auto& s : grid.states()) {
    out.push_back({s, false});
    out.push_back({s, true});
  }
  return out;
}

namespace {

// L0 for every utterance plus the e^{-c(u)} factors, computed once per model.
struct LiteralModel {
  std::vector<Dist<Meaning>> listeners;
  Eigen::VectorXd cost_factor;

  LiteralModel(const PriorSet& priors, const CostModel& cost, const PriceGrid& grid) {
    const auto& us = grid.states();
    cost_factor.resize(static_cast<Eigen::Index>(us.size()));
    listeners.reserve(us.size());
    for (std::size_t i = 0; i < us.size(); ++i) {
      listeners.push_back(literal_listener(us[i], priors, grid));
      cost_factor(static_cast<Eigen::Index>(i)) = std::exp(-cost.cost(us[i]));
    }
  }

  Eigen::VectorXd speaker_weights(const Meaning& intended, const Goal& g) const {
    const auto target = goal_project(g, intended);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(cost_factor.size());
    for (std::size_t i = 0; i < listeners.size(); ++i) {
      const auto& l0 = listeners[i];
      double mass = 0.0;
      for (std::size_t j = 0; j < l0.size(); ++j) {
        if (goal_project(g, l0.support()[j]) == target) mass += l0.probs()(static_cast<Eigen::Index>(j));
      }
      w(static_cast<Eigen::Index>(i)) = mass * cost_factor(static_cast<Eigen::Index>(i));
    }
    return w;
  }

  Dist<Price> speak(const Meaning& intended, const Goal& g, const PriceGrid& grid) const {
    auto w = speaker_weights(intended, g);
    if (!(w.sum() > 0.0)) {
      throw InferenceError("no utterance conveys " + to_string(SpeakerKey{intended.state, intended.affect, g}));
    }
    return normalize<Price, double>(w, grid.states());
  }
};

using SpeakerLookup = std::function<Eigen::VectorXd(const Meaning&, const Goal&)>;

// Unnormalized L1 weights: rows utterances, columns meaning_support(grid).
// Terms with zero prior weight are skipped so their (undefined) speaker is never queried.
Eigen::MatrixXd joint_weights(const SpeakerLookup& speak, const PriorSet& priors, const GoalPrior& goal_prior,
                              const PriceGrid& grid) {
  priors.validate(grid);
  const auto meanings = meaning_support(grid);
  const auto n_u = static_cast<Eigen::Index>(grid.states().size());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_u, static_cast<Eigen::Index>(meanings.size()));
  const auto& goals = goal_prior.dist.support();
  for (std::size_t m = 0; m < meanings.size(); ++m) {
    const auto& meaning = meanings[m];
    const double prior = priors.price_prior.prob(meaning.state) * priors.affect_prob(meaning.state, meaning.affect);
    if (prior == 0.0) continue;
    for (std::size_t gi = 0; gi < goals.size(); ++gi) {
      const double pg = goal_prior.dist.probs()(static_cast<Eigen::Index>(gi));
      if (pg == 0.0) continue;
      w.col(static_cast<Eigen::Index>(m)) += speak(meaning, goals[gi]) * (prior * pg);
    }
  }
  return w;
}

Eigen::MatrixXd normalize_rows(Eigen::MatrixXd w, const PriceGrid& grid) {
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    const double total = w.row(i).sum();
    if (!(total > 0.0)) {
      throw InferenceError("posterior for utterance " + to_string(grid.states()[static_cast<std::size_t>(i)]) +
                           " has no mass");
    }
    w.row(i) /= total;
  }
  return w;
}

SpeakerLookup engine_lookup(const LiteralModel& model, const PriceGrid& grid) {
  return [&model, &grid](const Meaning& m, const Goal& g) { return model.speak(m, g, grid).probs(); };
}

SpeakerLookup table_lookup(const SpeakerTable& table, const PriceGrid& grid) {
  return [&table, &grid](const Meaning& m, const Goal& g) {
    const auto& d = table.at(SpeakerKey{m.state, m.affect, g});
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.states().size()));
    for (std::size_t i = 0; i < grid.states().size(); ++i) {
      auto idx = d.index_of(grid.states()[i]);
      if (!idx) throw DataError("speaker table entry " + to_string(SpeakerKey{m.state, m.affect, g}) +
                                " lacks utterance " + to_string(grid.states()[i]));
      v(static_cast<Eigen::Index>(i)) = d.probs()(static_cast<Eigen::Index>(*idx));
    }
    if (d.size() != grid.states().size()) {
      throw DataError("speaker table entry " + to_string(SpeakerKey{m.state, m.affect, g}) +
                      " has utterances off the grid");
    }
    return v;
  };
}

Dist<Meaning> listener_row(const Eigen::MatrixXd& w, Utterance u, const PriceGrid& grid) {
  auto idx = grid.index_of(u);
  Eigen::VectorXd row = w.row(static_cast<Eigen::Index>(*idx)).transpose();
  if (!(row.sum() > 0.0)) throw InferenceError("posterior for utterance " + to_string(u) + " has no mass");
  return normalize<Meaning, double>(row, meaning_support(grid));
}

PosteriorMatrix marginalize_and_calibrate(const Eigen::MatrixXd& listener, const PriceGrid& grid, double lambda) {
  check_lambda(lambda);
  const auto n = static_cast<Eigen::Index>(grid.states().size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index u = 0; u < n; ++u) {
    Eigen::VectorXd marginal(n);
    for (Eigen::Index s = 0; s < n; ++s) marginal(s) = listener(u, 2 * s) + listener(u, 2 * s + 1);
    marginal /= marginal.sum();
    out.row(u) = calibrate_weights(marginal, lambda).transpose();
  }
  return PosteriorMatrix(grid.states(), grid.states(), std::move(out));
}

void require_on_grid(Utterance u, const PriceGrid& grid) {
  if (!grid.contains(u)) throw DomainError("utterance " + to_string(u) + " is not on grid " + grid.spec());
}

}  // namespace

Dist<Price> speaker(PriceState s, bool affect, const Goal& g, const PriorSet& priors, const CostModel& cost,
                    const PriceGrid& grid) {
  if (!grid.contains(s)) throw DomainError("state " + to_string(s) + " is not on grid " + grid.spec());
  LiteralModel model(priors, cost, grid);
  return model.speak(Meaning{s, affect}, g, grid);
}

SpeakerTable engine_speaker_table(const PriorSet& priors, const CostModel& cost, const PriceGrid& grid,
                                  const std::vector<Goal>& goals) {
  priors.validate(grid);
  LiteralModel model(priors, cost, grid);
  SpeakerTable table;
  for (const auto& m : meaning_support(grid)) {
    if (priors.price_prior.prob(m.state) * priors.affect_prob(m.state, m.affect) == 0.0) continue;
    for (const auto& g : goals) {
      table.entries.emplace(SpeakerKey{m.state, m.affect, g}, model.speak(m, g, grid));
    }
  }
  return table;
}

Eigen::MatrixXd listener_matrix(const PriorSet& priors, const GoalPrior& goal_prior, const CostModel& cost,
                                const PriceGrid& grid) {
  priors.validate(grid);
  LiteralModel model(priors, cost, grid);
  return normalize_rows(joint_weights(engine_lookup(model, grid), priors, goal_prior, grid), grid);
}

Dist<Meaning> pragmatic_listener(Utterance u, const PriorSet& priors, const GoalPrior& goal_prior,
                                 const CostModel& cost, const PriceGrid& grid) {
  require_on_grid(u, grid);
  priors.validate(grid);
  LiteralModel model(priors, cost, grid);
  return listener_row(joint_weights(engine_lookup(model, grid), priors, goal_prior, grid), u, grid);
}

Dist<Meaning> pragmatic_listener_with_table(Utterance u, const SpeakerTable& table, const PriorSet& priors,
                                            const GoalPrior& goal_prior, const PriceGrid& grid) {
  require_on_grid(u, grid);
  return listener_row(joint_weights(table_lookup(table, grid), priors, goal_prior, grid), u, grid);
}

PosteriorMatrix::PosteriorMatrix(std::vector<Price> utterances, std::vector<Price> states, Eigen::MatrixXd probs)
    : utterances_(std::move(utterances)), states_(std::move(states)), probs_(std::move(probs)) {
  if (probs_.rows() != static_cast<Eigen::Index>(utterances_.size()) ||
      probs_.cols() != static_cast<Eigen::Index>(states_.size())) {
    throw DomainError("posterior matrix shape does not match its labels");
  }
  for (Eigen::Index i = 0; i < probs_.rows(); ++i) {
    if (std::abs(probs_.row(i).sum() - 1.0) > kNormalizationTolerance || (probs_.row(i).array() < 0.0).any()) {
      throw DomainError("posterior row for " + to_string(utterances_[static_cast<std::size_t>(i)]) +
                        " is not a distribution");
    }
  }
}

Dist<Price> PosteriorMatrix::row(Utterance u) const {
  auto it = std::find(utterances_.begin(), utterances_.end(), u);
  if (it == utterances_.end()) throw DomainError("posterior matrix has no row for " + to_string(u));
  Eigen::VectorXd r = probs_.row(it - utterances_.begin()).transpose();
  return Dist<Price>(states_, std::move(r));
}

double PosteriorMatrix::at(Utterance u, PriceState s) const {
  auto ui = std::find(utterances_.begin(), utterances_.end(), u);
  auto si = std::find(states_.begin(), states_.end(), s);
  if (ui == utterances_.end() || si == states_.end()) {
    throw DomainError("posterior matrix has no cell (" + to_string(u) + ", " + to_string(s) + ")");
  }
  return probs_(ui - utterances_.begin(), si - states_.begin());
}

PosteriorMatrix posterior_price_matrix(const PriorSet& priors, const GoalPrior& goal_prior, const CostModel& cost,
                                       const PriceGrid& grid, double lambda) {
  return marginalize_and_calibrate(listener_matrix(priors, goal_prior, cost, grid), grid, lambda);
}

PosteriorMatrix posterior_price_matrix_with_table(const SpeakerTable& table, const PriorSet& priors,
                                                  const GoalPrior& goal_prior, const PriceGrid& grid,
                                                  double lambda) {
  auto w = normalize_rows(joint_weights(table_lookup(table, grid), priors, goal_prior, grid), grid);
  return marginalize_and_calibrate(w, grid, lambda);
}

std::map<std::pair<Price, Price>, double> affect_posterior(const PriorSet& priors, const GoalPrior& goal_prior,
                                                           const CostModel& cost, const PriceGrid& grid) {
  const auto l1 = listener_matrix(priors, goal_prior, cost, grid);
  const auto& states = grid.states();
  std::map<std::pair<Price, Price>, double> out;
  for (std::size_t u = 0; u < states.size(); ++u) {
    for (std::size_t s = 0; s < states.size(); ++s) {
      const auto r = static_cast<Eigen::Index>(u);
      const double no = l1(r, static_cast<Eigen::Index>(2 * s));
      const double yes = l1(r, static_cast<Eigen::Index>(2 * s + 1));
      if (no + yes > 0.0) out[{states[u], states[s]}] = yes / (no + yes);
    }
  }
  return out;
}

}  // namespace numprag
