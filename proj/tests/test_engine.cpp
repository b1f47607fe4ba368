#include <gtest/gtest.h>

#include <random>
#include <set>

#include "numprag/engine.hpp"
#include "support/fixtures.hpp"
#include "support/toy_instances.hpp"
#include "support/oracle.hpp"

using namespace numprag;
using fixtures::random_grid;
using fixtures::to_instance;

namespace {

const PriceGrid kToy({10, 100}, {0});

}  // namespace

TEST(LiteralListener, Examples) {
  const auto grid = PriceGrid::interpretation();
  auto p = fixtures::uniform_priors("x", grid, 0.2);
  const auto l0 = literal_listener(Price(50), p, grid);
  EXPECT_DOUBLE_EQ(l0.prob({Price(50), false}), 0.8);
  EXPECT_DOUBLE_EQ(l0.prob({Price(50), true}), 0.2);

  p.affect_given_price[Price(50)] = 0.0;
  const auto zero = literal_listener(Price(50), p, grid);
  EXPECT_DOUBLE_EQ(zero.prob({Price(50), false}), 1.0);

  auto toy = fixtures::uniform_priors("x", kToy, 0.9);
  const auto l100 = literal_listener(Price(100), toy, kToy);
  EXPECT_DOUBLE_EQ(l100.prob({Price(100), true}), 0.9);
  EXPECT_DOUBLE_EQ(l100.prob({Price(100), false}), 0.1);

  EXPECT_THROW(literal_listener(Price(49), p, grid), DomainError);
}

TEST(LiteralListener, SupportIsTheUtterance) {
  const auto grid = PriceGrid::interpretation();
  const auto p = fixtures::monotone_priors("x", grid, 0.3);
  for (const auto& u : grid.states()) {
    const auto l0 = literal_listener(u, p, grid);
    for (const auto& m : l0.support()) EXPECT_EQ(m.state, u);
  }
}

TEST(GoalProjection, Examples) {
  const Meaning m{Price(53), true};
  const auto both = goal_project(Goal::both_exact(), m);
  EXPECT_EQ(both.price, Price(53));
  EXPECT_EQ(both.affect, true);
  const auto approx = goal_project(Goal::price_approx(), m);
  EXPECT_EQ(approx.price, Price(50));
  EXPECT_FALSE(approx.affect.has_value());
  EXPECT_EQ(goal_project(Goal::affect_only(), m), goal_project(Goal::affect_only(), Meaning{Price(5000), true}));
}

TEST(Speaker, ExactPriceGoalPicksTheState) {
  const auto p = fixtures::uniform_priors("x", kToy, 0.5);
  const auto s1 = speaker(Price(10), false, Goal::price_exact(), p, CostModel(1.0), kToy);
  EXPECT_DOUBLE_EQ(s1.prob(Price(10)), 1.0);
  EXPECT_DOUBLE_EQ(s1.prob(Price(100)), 0.0);
}

TEST(Speaker, AffectGoalWithSymmetricEvidence) {
  const auto p = fixtures::uniform_priors("x", kToy, 0.5);
  const auto s1 = speaker(Price(10), true, Goal::affect_only(), p, CostModel(1.0), kToy);
  EXPECT_NEAR(s1.prob(Price(10)), 0.5, 1e-15);
  EXPECT_NEAR(s1.prob(Price(100)), 0.5, 1e-15);
}

TEST(Speaker, SingleUtterance) {
  const PriceGrid one({50}, {0});
  const auto p = fixtures::uniform_priors("x", one, 0.3);
  for (const auto& g : canonical_goals()) {
    EXPECT_DOUBLE_EQ(speaker(Price(50), true, g, p, CostModel(2.0), one).prob(Price(50)), 1.0);
  }
}

TEST(Speaker, MatchesOracle) {
  const auto grid = PriceGrid::interpretation();
  const auto p = fixtures::monotone_priors("x", grid, 0.3);
  const auto in = to_instance(p, grid, GoalPrior::uniform(), 1.7);
  for (std::size_t s = 0; s < grid.states().size(); s += 3) {
    for (int a = 0; a < 2; ++a) {
      for (std::size_t g = 0; g < 5; ++g) {
        const auto d = speaker(grid.states()[s], a == 1, canonical_goals()[g], p, CostModel(1.7), grid);
        for (std::size_t u = 0; u < grid.states().size(); ++u) {
          EXPECT_NEAR(d.prob(grid.states()[u]), oracle::speaker(in, u, s, a == 1, static_cast<int>(g)), 1e-12);
        }
      }
    }
  }
}

TEST(Speaker, NoConveyingUtteranceIsAnInferenceError) {
  auto p = fixtures::uniform_priors("x", kToy, 0.0);
  EXPECT_THROW(speaker(Price(10), true, Goal::both_exact(), p, CostModel(1.0), kToy), InferenceError);
}

TEST(Speaker, CostMonotonicity) {
  const auto grid = PriceGrid::interpretation();
  const auto p = fixtures::monotone_priors("x", grid, 0.3);
  for (const auto& g : {Goal::affect_only(), Goal::price_approx(), Goal::both_approx()}) {
    double previous = 2.0;
    for (double c = 1.0; c < 4.0; c += 0.25) {
      const auto d = speaker(Price(51), true, g, p, CostModel(c), grid);
      double sharp = 0.0;
      for (const auto& u : grid.states()) {
        if (!is_round(u)) sharp += d.prob(u);
      }
      EXPECT_LT(sharp, previous) << g.name() << " C=" << c;
      previous = sharp;
    }
  }
}

TEST(PragmaticListener, SingletonGrid) {
  const PriceGrid one({50}, {0});
  const auto p = fixtures::uniform_priors("x", one, 0.35);
  const auto l1 = pragmatic_listener(Price(50), p, GoalPrior::uniform(), CostModel(1.0), one);
  EXPECT_NEAR(l1.prob({Price(50), true}), 0.35, 1e-15);
  EXPECT_NEAR(l1.prob({Price(50), false}), 0.65, 1e-15);
}

TEST(PragmaticListener, SteepPriorToyPlacesMassOnHyperbole) {
  const auto p = fixtures::make_priors("x", kToy, {0.99, 0.01}, {0.1, 0.9});
  const auto l1 = pragmatic_listener(Price(100), p, GoalPrior::uniform(), CostModel(1.0), kToy);
  EXPECT_GT(l1.prob({Price(10), true}), 0.0);
  const auto expected = oracle::listener(to_instance(p, kToy, GoalPrior::uniform(), 1.0), 1);
  for (std::size_t i = 0; i < l1.size(); ++i) EXPECT_NEAR(l1.probs()(static_cast<Eigen::Index>(i)), expected[i], 1e-12);
}

TEST(PragmaticListener, SymmetricAffect) {
  const PriceGrid grid({10, 20}, {0, 1});
  const auto p = fixtures::uniform_priors("x", grid, 0.5);
  for (const auto& u : grid.states()) {
    const auto l1 = pragmatic_listener(u, p, GoalPrior::uniform(), CostModel(1.0), grid);
    for (const auto& s : grid.states()) EXPECT_NEAR(l1.prob({s, true}), l1.prob({s, false}), 1e-15);
  }
}

TEST(PragmaticListener, RandomInstancesMatchOracle) {
  std::mt19937_64 rng(20241014);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto grid = random_grid(rng);
    const auto p = fixtures::random_priors("x", grid, rng, trial % 3 == 0);
    std::map<Goal, double> w;
    for (const auto& g : canonical_goals()) w[g] = unit(rng) < 0.2 ? 0.0 : unit(rng);
    w[Goal::both_exact()] += 0.1;
    w[Goal::affect_only()] += 0.1;
    const auto gp = GoalPrior::from_weights(w);
    const double c = 1.0 + 3.0 * unit(rng);
    const auto in = to_instance(p, grid, gp, c);
    for (std::size_t u = 0; u < grid.states().size(); ++u) {
      const auto l1 = pragmatic_listener(grid.states()[u], p, gp, CostModel(c), grid);
      const auto expected = oracle::listener(in, u);
      ASSERT_EQ(l1.size(), expected.size());
      for (std::size_t i = 0; i < expected.size(); ++i) {
        EXPECT_NEAR(l1.probs()(static_cast<Eigen::Index>(i)), expected[i], 1e-10) << "trial " << trial;
      }
    }
  }
}

TEST(PragmaticListener, GoalPriorScaleInvariant) {
  const auto grid = PriceGrid::interpretation();
  const auto p = fixtures::monotone_priors("x", grid, 0.3);
  std::map<Goal, double> w{{Goal::price_exact(), 1}, {Goal::affect_only(), 3}, {Goal::both_approx(), 2}};
  std::map<Goal, double> scaled;
  for (const auto& [g, x] : w) scaled[g] = 37.5 * x;
  for (const auto& u : {Price(50), Price(1001), Price(10000)}) {
    const auto a = pragmatic_listener(u, p, GoalPrior::from_weights(w), CostModel(1.3), grid);
    const auto b = pragmatic_listener(u, p, GoalPrior::from_weights(scaled), CostModel(1.3), grid);
    EXPECT_LE((a.probs() - b.probs()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::Index ia, ib;
    a.probs().maxCoeff(&ia);
    b.probs().maxCoeff(&ib);
    EXPECT_EQ(ia, ib);
  }
}

TEST(PragmaticListener, SumsToOne) {
  const auto grid = PriceGrid::interpretation();
  const auto p = fixtures::monotone_priors("x", grid, 0.3);
  const auto m = listener_matrix(p, GoalPrior::uniform(), CostModel(1.2), grid);
  EXPECT_LE((m.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
}

TEST(WithTable, SubstitutionIdentity) {
  const auto grid = PriceGrid::interpretation();
  const auto p = fixtures::monotone_priors("x", grid, 0.3);
  const CostModel cost(1.2);
  const auto table = engine_speaker_table(p, cost, grid);
  for (const auto& u : grid.states()) {
    const auto a = pragmatic_listener(u, p, GoalPrior::uniform(), cost, grid);
    const auto b = pragmatic_listener_with_table(u, table, p, GoalPrior::uniform(), grid);
    EXPECT_LE((a.probs() - b.probs()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(WithTable, UniformTableGivesPrior) {
  const auto grid = PriceGrid::parse("custom:50,500:0,1");
  const auto p = fixtures::monotone_priors("x", grid, 0.3);
  SpeakerTable table;
  const auto uniform = normalize(std::vector<double>(grid.states().size(), 1.0), grid.states());
  for (const auto& g : canonical_goals()) {
    for (const auto& m : meaning_support(grid)) table.entries.emplace(SpeakerKey{m.state, m.affect, g}, uniform);
  }
  for (const auto& u : grid.states()) {
    const auto l1 = pragmatic_listener_with_table(u, table, p, GoalPrior::uniform(), grid);
    for (const auto& m : meaning_support(grid)) {
      EXPECT_NEAR(l1.prob(m), p.price_prior.prob(m.state) * p.affect_prob(m.state, m.affect), 1e-12);
    }
  }
}

TEST(WithTable, DeterministicRow) {
  const auto p = fixtures::uniform_priors("x", kToy, 0.5);
  const auto uniform = normalize(std::vector<double>{1, 1}, kToy.states());
  const auto only10 = normalize(std::vector<double>{1, 0}, kToy.states());
  SpeakerTable table;
  for (const auto& g : canonical_goals()) {
    for (const auto& m : meaning_support(kToy)) {
      const bool deterministic = m.state == Price(10) && !m.affect;
      table.entries.emplace(SpeakerKey{m.state, m.affect, g}, deterministic ? only10 : uniform);
    }
  }
  const auto l100 = pragmatic_listener_with_table(Price(100), table, p, GoalPrior::uniform(), kToy);
  EXPECT_DOUBLE_EQ(l100.prob({Price(10), false}), 0.0);
  EXPECT_NEAR(l100.prob({Price(10), true}), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(l100.prob({Price(100), false}), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(l100.prob({Price(100), true}), 1.0 / 3.0, 1e-15);
  // u = 10: (10, false) carries twice the likelihood of the rest.
  const auto l10 = pragmatic_listener_with_table(Price(10), table, p, GoalPrior::uniform(), kToy);
  EXPECT_NEAR(l10.prob({Price(10), false}), 0.4, 1e-15);
  EXPECT_NEAR(l10.prob({Price(100), true}), 0.2, 1e-15);
}

TEST(WithTable, MissingEntryNamesTheKey) {
  const auto p = fixtures::uniform_priors("x", kToy, 0.5);
  auto table = engine_speaker_table(p, CostModel(1.0), kToy);
  table.entries.erase(SpeakerKey{Price(100), true, Goal::price_approx()});
  try {
    pragmatic_listener_with_table(Price(10), table, p, GoalPrior::uniform(), kToy);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("price-approx"), std::string::npos) << e.what();
  }
}

TEST(PosteriorMatrix, LambdaOneIsMarginal) {
  const auto grid = PriceGrid::interpretation();
  const auto p = fixtures::monotone_priors("x", grid, 0.3);
  const CostModel cost(1.5);
  const auto m = posterior_price_matrix(p, GoalPrior::uniform(), cost, grid, 1.0);
  for (const auto& u : grid.states()) {
    const auto l1 = pragmatic_listener(u, p, GoalPrior::uniform(), cost, grid);
    for (const auto& s : grid.states()) {
      EXPECT_NEAR(m.at(u, s), l1.prob({s, false}) + l1.prob({s, true}), 1e-15);
    }
    EXPECT_NEAR(m.row(u).probs().sum(), 1.0, 1e-12);
  }
}

TEST(PosteriorMatrix, MatchesOraclePipeline) {
  const auto grid = PriceGrid::parse("custom:50,500:0,1,2");
  const auto p = fixtures::monotone_priors("x", grid, 0.2);
  const auto in = to_instance(p, grid, GoalPrior::uniform(), 2.2);
  for (double lambda : {0.0, 0.37, 0.8, 1.0}) {
    const auto m = posterior_price_matrix(p, GoalPrior::uniform(), CostModel(2.2), grid, lambda);
    for (std::size_t u = 0; u < grid.states().size(); ++u) {
      const auto expected = oracle::price_posterior(in, u, lambda);
      for (std::size_t s = 0; s < grid.states().size(); ++s) {
        EXPECT_NEAR(m.at(grid.states()[u], grid.states()[s]), expected[s], 1e-12) << "lambda " << lambda;
      }
    }
  }
}

TEST(PosteriorMatrix, TablePathMatchesEngine) {
  const auto grid = PriceGrid::interpretation();
  const auto p = fixtures::monotone_priors("x", grid, 0.3);
  const CostModel cost(1.2);
  const auto a = posterior_price_matrix(p, GoalPrior::uniform(), cost, grid, 0.44);
  const auto b = posterior_price_matrix_with_table(engine_speaker_table(p, cost, grid), p, GoalPrior::uniform(), grid,
                                                   0.44);
  EXPECT_LE((a.matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AffectPosterior, ConditionalOfListener) {
  const auto grid = PriceGrid::parse("custom:50,500:0,1");
  const auto p = fixtures::monotone_priors("x", grid, 0.3);
  const CostModel cost(1.2);
  const auto field = affect_posterior(p, GoalPrior::uniform(), cost, grid);
  for (const auto& [cell, pa] : field) {
    const auto l1 = pragmatic_listener(cell.first, p, GoalPrior::uniform(), cost, grid);
    const double t = l1.prob({cell.second, true});
    const double f = l1.prob({cell.second, false});
    EXPECT_NEAR(pa, t / (t + f), 1e-12);
  }
  EXPECT_EQ(field.size(), 16u);
}

TEST(EngineTable, OmitsZeroPriorMeanings) {
  auto p = fixtures::uniform_priors("x", kToy, 0.0);
  const auto table = engine_speaker_table(p, CostModel(1.0), kToy);
  EXPECT_EQ(table.entries.count(SpeakerKey{Price(10), true, Goal::both_exact()}), 0u);
  EXPECT_EQ(table.entries.count(SpeakerKey{Price(10), false, Goal::both_exact()}), 1u);
}

TEST(Priors, AdaptToGrid) {
  const auto coarse = PriceGrid::prior_elicitation();
  const auto fine = PriceGrid::interpretation();
  const auto p = fixtures::monotone_priors("x", coarse, 0.5);
  const auto q = adapt_to_grid(p, fine);
  q.validate(fine);
  EXPECT_DOUBLE_EQ(q.affect_given_price.at(Price(502)), p.affect_given_price.at(Price(500)));
  EXPECT_NEAR(q.price_prior.prob(Price(53)) / q.price_prior.prob(Price(51)), 1.0, 1e-12);
  EXPECT_THROW(adapt_to_grid(fixtures::uniform_priors("x", fine, 0.5), coarse), DataError);
}

TEST(Priors, ValidateRejectsMismatch) {
  const auto p = fixtures::uniform_priors("x", kToy, 0.5);
  EXPECT_THROW(p.validate(PriceGrid::interpretation()), DataError);
  auto bad = p;
  bad.affect_given_price[Price(10)] = 1.5;
  EXPECT_THROW(bad.validate(kToy), DataError);
}

TEST(GoalPriorSpec, Parse) {
  const auto u = GoalPrior::parse("uniform");
  EXPECT_DOUBLE_EQ(u.dist.prob(Goal::affect_only()), 0.2);
  const auto g = GoalPrior::parse("price-exact=1,affect=3");
  EXPECT_DOUBLE_EQ(g.dist.prob(Goal::affect_only()), 0.75);
  EXPECT_DOUBLE_EQ(g.dist.prob(Goal::both_exact()), 0.0);
  EXPECT_THROW(GoalPrior::parse("affect"), UsageError);
  EXPECT_THROW(GoalPrior::parse("affect=x"), UsageError);
}
