#include <gtest/gtest.h>

#include <random>

#include "numprag/fitting.hpp"
#include "support/fixtures.hpp"

using namespace numprag;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

const PriceGrid kSmall = PriceGrid::parse("custom:50,500,5000:0,1,2");

std::map<std::string, PosteriorMatrix> model(const std::map<std::string, PriorSet>& priors, double lambda,
                                             double cost, const PriceGrid& grid) {
  std::map<std::string, PosteriorMatrix> out;
  for (const auto& [item, p] : priors) {
    out.emplace(item, posterior_price_matrix(p, GoalPrior::uniform(), CostModel(cost), grid, lambda));
  }
  return out;
}

}  // namespace

TEST(Calibrate, Identity) {
  const auto d = normalize(std::vector<double>{0.2, 0.0, 0.8}, std::vector<int>{1, 2, 3});
  const auto c = calibrate(d, 1.0);
  EXPECT_EQ(c.probs(), d.probs());
}

TEST(Calibrate, Flattening) {
  const auto d = normalize(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 2});
  const auto c = calibrate(d, 0.0);
  EXPECT_DOUBLE_EQ(c.prob(1), 0.5);
  EXPECT_DOUBLE_EQ(c.prob(2), 0.5);
}

TEST(Calibrate, SquareRoot) {
  const auto d = normalize(std::vector<double>{0.81, 0.19}, std::vector<int>{1, 2});
  const auto c = calibrate(d, 0.5);
  const double a = 0.9;
  const double b = std::sqrt(0.19);
  EXPECT_NEAR(b, 0.43588989435406735, 1e-15);
  EXPECT_NEAR(c.prob(1), a / (a + b), 1e-15);
  EXPECT_NEAR(c.prob(2), b / (a + b), 1e-15);
}

TEST(Calibrate, PreservesZerosAndOrder) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> w(6);
    for (auto& x : w) x = unit(rng) < 0.3 ? 0.0 : unit(rng);
    w[0] += 0.01;
    const auto d = normalize(w, std::vector<int>{0, 1, 2, 3, 4, 5});
    const double lambda = unit(rng);
    const auto c = calibrate(d, lambda);
    EXPECT_EQ(c.support(), d.support());
    for (int i = 0; i < 6; ++i) {
      EXPECT_EQ(c.probs()(i) == 0.0, d.probs()(i) == 0.0);
      for (int j = 0; j < 6; ++j) {
        if (d.probs()(i) < d.probs()(j) && lambda > 0.0) EXPECT_LT(c.probs()(i), c.probs()(j));
      }
    }
  }
}

TEST(Calibrate, RejectsExponentOutsideUnitInterval) {
  const auto d = normalize(std::vector<double>{1, 1}, std::vector<int>{1, 2});
  EXPECT_THROW(calibrate(d, 1.5), DomainError);
  EXPECT_THROW(calibrate(d, -0.1), DomainError);
}

TEST(Pearson, ClosedForms) {
  EXPECT_NEAR(pearson(vec({1, 2, 3}), vec({1, 2, 3})), 1.0, 1e-12);
  EXPECT_NEAR(pearson(vec({1, 2, 3}), vec({3, 2, 1})), -1.0, 1e-12);
  EXPECT_NEAR(pearson(vec({1, 2, 3, 4}), vec({1, 3, 2, 4})), 0.8, 1e-12);
  EXPECT_NEAR(pearson(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}), 0.8, 1e-12);
}

TEST(Pearson, Errors) {
  EXPECT_THROW(pearson(vec({1, 1, 1}), vec({1, 2, 3})), DomainError);
  EXPECT_THROW(pearson(vec({1, 2}), vec({1, 2})), DomainError);
  EXPECT_THROW(pearson(vec({1, 2, 3}), vec({1, 2, 3, 4})), DomainError);
}

TEST(Pearson, AffineInvariant) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.1, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd x(30), y(30);
    for (int i = 0; i < 30; ++i) {
      x(i) = normal(rng);
      y(i) = 0.5 * x(i) + normal(rng);
    }
    const double r = pearson(x, y);
    const Eigen::VectorXd xa = (x.array() * unit(rng) + normal(rng)).matrix();
    const Eigen::VectorXd ya = (y.array() * unit(rng) - normal(rng)).matrix();
    EXPECT_NEAR(pearson(xa, ya), r, 1e-12);
  }
}

TEST(GridRange, Points) {
  EXPECT_EQ(GridRange::default_lambda().points().size(), 100u);
  EXPECT_EQ(GridRange::default_cost().points().size(), 30u);
  const auto c = GridRange::default_cost().points();
  EXPECT_DOUBLE_EQ(c.front(), 1.0);
  EXPECT_DOUBLE_EQ(c.back(), 3.9);
  const auto p = GridRange::parse("0.2:0.5:0.1").points();
  ASSERT_EQ(p.size(), 3u);
  EXPECT_DOUBLE_EQ(p[2], 0.4);
  EXPECT_THROW(GridRange::parse("0:1"), UsageError);
  EXPECT_THROW(GridRange::parse("0:1:0"), UsageError);
}

TEST(FitGrid, DefaultLatticeSize) {
  const auto grid = PriceGrid::parse("custom:50,500:0,1");
  const std::map<std::string, PriorSet> priors{{"x", fixtures::monotone_priors("x", grid, 0.3)}};
  const auto target = posterior_table(model(priors, 0.5, 2.0, grid));
  const auto fit = fit_grid(priors, GoalPrior::uniform(), grid, target);
  EXPECT_EQ(fit.grid_evaluations, 3000);
}

TEST(FitGrid, SelfRecovery) {
  const auto priors = fixtures::monotone_fixture(kSmall);
  const auto target = posterior_table(model(priors, 0.40, 1.5, kSmall));
  const auto fit = fit_grid(priors, GoalPrior::uniform(), kSmall, target);
  EXPECT_NEAR(fit.lambda, 0.40, 0.01 + 1e-9);
  EXPECT_NEAR(fit.sharp_cost, 1.5, 0.1 + 1e-9);
  EXPECT_NEAR(fit.correlation, 1.0, 1e-9);
}

TEST(FitGrid, ReturnsTheLatticeMaximum) {
  const auto priors = fixtures::monotone_fixture(kSmall);
  // Noisy target so that the optimum is not a perfect fit.
  auto clean = model(priors, 0.3, 2.0, kSmall);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 0.05);
  std::vector<JudgmentRow> rows;
  for (const auto& r : posterior_table(clean).rows()) rows.push_back({r.item, r.u, r.s, r.rating + unit(rng)});
  const JudgmentTable target(JudgmentKind::InterpretationUS, rows);
  const GridRange lambdas{0.0, 1.0, 0.1};
  const GridRange costs{1.0, 4.0, 0.5};
  const auto fit = fit_grid(priors, GoalPrior::uniform(), kSmall, target, lambdas, costs);
  EXPECT_EQ(fit.grid_evaluations, 60);
  for (double l : lambdas.points()) {
    for (double c : costs.points()) {
      double r;
      try {
        r = fit_objective(priors, GoalPrior::uniform(), kSmall, target, l, c);
      } catch (const DomainError&) {
        continue;
      }
      EXPECT_GE(fit.correlation, r) << l << " " << c;
    }
  }
  EXPECT_DOUBLE_EQ(fit_objective(priors, GoalPrior::uniform(), kSmall, target, fit.lambda, fit.sharp_cost),
                   fit.correlation);
}

TEST(FitGrid, TiesGoToSmallerParameters) {
  // A single round-only grid makes the cost irrelevant: every C ties.
  const auto grid = PriceGrid::parse("custom:50,500,5000:0");
  const auto priors = fixtures::monotone_fixture(grid);
  const auto target = posterior_table(model(priors, 1.0, 1.0, grid));
  const auto fit = fit_grid(priors, GoalPrior::uniform(), grid, target, {0.5, 1.0, 0.1}, {1.0, 3.0, 0.5});
  EXPECT_DOUBLE_EQ(fit.sharp_cost, 1.0);
}

TEST(FitGrid, IncompleteTarget) {
  const auto priors = fixtures::monotone_fixture(kSmall);
  auto rows = posterior_table(model(priors, 0.5, 1.5, kSmall)).rows();
  rows.erase(rows.begin() + 5);
  const JudgmentTable target(JudgmentKind::InterpretationUS, rows);
  try {
    fit_grid(priors, GoalPrior::uniform(), kSmall, target, {0.5, 0.6, 0.1}, {1.0, 1.1, 0.1});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("electric kettle"), std::string::npos) << e.what();
  }
}

TEST(Flatten, JudgmentOrder) {
  const auto priors = fixtures::monotone_fixture(kSmall);
  const auto m = model(priors, 0.5, 1.5, kSmall);
  const auto flat = flatten_posteriors(m);
  const auto table = posterior_table(m);
  ASSERT_EQ(flat.size(), table.values().size());
  EXPECT_LE((flat - table.values()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(flat.size(), 3 * 9 * 9);
}
