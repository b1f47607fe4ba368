#include "numprag/fitting.hpp"

#include <charconv>

namespace numprag {

std::vector<double> GridRange::points() const {
  if (!(step > 0.0) || !(stop > start)) throw UsageError("search range needs start < stop and step > 0");
  const auto n = static_cast<long>(std::ceil((stop - start) / step - 1e-9));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    // Snap to 1e-9 so lattice values print as their decimal names.
    out.push_back(std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9);
  }
  return out;
}

GridRange GridRange::parse(std::string_view spec) {
  double parts[3] = {0, 0, 0};
  for (int i = 0; i < 3; ++i) {
    auto colon = spec.find(':');
    auto token = spec.substr(0, colon);
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), parts[i]);
    if (ec != std::errc{} || ptr != token.data() + token.size() || (i < 2 && colon == std::string_view::npos) ||
        (i == 2 && colon != std::string_view::npos)) {
      throw UsageError("search range must be <start>:<stop>:<step>");
    }
    if (colon != std::string_view::npos) spec.remove_prefix(colon + 1);
  }
  GridRange r{parts[0], parts[1], parts[2]};
  r.points();
  return r;
}

Eigen::VectorXd flatten_posteriors(const std::map<std::string, PosteriorMatrix>& matrices) {
  Eigen::Index n = 0;
  for (const auto& [item, m] : matrices) n += m.matrix().size();
  Eigen::VectorXd out(n);
  Eigen::Index k = 0;
  for (const auto& [item, m] : matrices) {
    // Row-major walk: u outer, s inner.
    for (Eigen::Index u = 0; u < m.matrix().rows(); ++u) {
      for (Eigen::Index s = 0; s < m.matrix().cols(); ++s) out(k++) = m.matrix()(u, s);
    }
  }
  return out;
}

JudgmentTable posterior_table(const std::map<std::string, PosteriorMatrix>& matrices) {
  std::vector<JudgmentRow> rows;
  for (const auto& [item, m] : matrices) {
    for (std::size_t u = 0; u < m.utterances().size(); ++u) {
      for (std::size_t s = 0; s < m.states().size(); ++s) {
        rows.push_back({item, m.utterances()[u], m.states()[s],
                        m.matrix()(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(s))});
      }
    }
  }
  return JudgmentTable(JudgmentKind::InterpretationUS, std::move(rows));
}

namespace {

Eigen::VectorXd target_vector(const std::map<std::string, PriorSet>& priors, const PriceGrid& grid,
                              const JudgmentTable& target) {
  if (target.kind() != JudgmentKind::InterpretationUS) {
    throw DataError("fit target must be an interpretation table, got " + to_string(target.kind()));
  }
  if (priors.empty()) throw DataError("no items to fit");
  std::vector<double> values;
  std::vector<std::string> missing;
  std::size_t n_missing = 0;
  for (const auto& [item, p] : priors) {
    for (const auto& u : grid.states()) {
      for (const auto& s : grid.states()) {
        JudgmentKey key{item, u, s};
        if (auto v = target.find(key)) {
          values.push_back(*v);
        } else {
          if (missing.size() < 10) missing.push_back(to_string(key));
          ++n_missing;
        }
      }
    }
  }
  if (n_missing > 0) {
    std::string msg = "fit target lacks " + std::to_string(n_missing) + " (item, u, s) cells:";
    for (const auto& m : missing) msg += " " + m;
    if (n_missing > missing.size()) msg += " ...";
    throw DataError(msg);
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

double fit_objective(const std::map<std::string, PriorSet>& priors, const GoalPrior& goal_prior,
                     const PriceGrid& grid, const JudgmentTable& target, double lambda, double sharp_cost) {
  const auto y = target_vector(priors, grid, target);
  std::map<std::string, PosteriorMatrix> matrices;
  for (const auto& [item, p] : priors) {
    matrices.emplace(item, posterior_price_matrix(p, goal_prior, CostModel(sharp_cost), grid, lambda));
  }
  return pearson(flatten_posteriors(matrices), y);
}

FitResult fit_grid(const std::map<std::string, PriorSet>& priors, const GoalPrior& goal_prior, const PriceGrid& grid,
                   const JudgmentTable& target, const GridRange& lambda_range, const GridRange& cost_range) {
  const auto y = target_vector(priors, grid, target);
  const auto lambdas = lambda_range.points();
  const auto costs = cost_range.points();
  for (double l : lambdas) check_lambda(l);

  FitResult best;
  bool have_best = false;
  const auto n = static_cast<Eigen::Index>(grid.states().size());
  Eigen::VectorXd x(y.size());

  for (double c : costs) {
    std::vector<Eigen::MatrixXd> raw;
    for (const auto& [item, p] : priors) raw.push_back(posterior_price_matrix(p, goal_prior, CostModel(c), grid).matrix());

    for (double l : lambdas) {
      ++best.grid_evaluations;
      Eigen::Index k = 0;
      for (const auto& m : raw) {
        for (Eigen::Index u = 0; u < n; ++u) {
          x.segment(k, n) = calibrate_weights(m.row(u).transpose(), l);
          k += n;
        }
      }
      double r = 0.0;
      try {
        r = pearson(x, y);
      } catch (const DomainError&) {
        continue;
      }
      const bool better = !have_best || r > best.correlation ||
                          (r == best.correlation && (l < best.lambda || (l == best.lambda && c < best.sharp_cost)));
      if (better) {
        best.lambda = l;
        best.sharp_cost = c;
        best.correlation = r;
        have_best = true;
      }
    }
  }
  if (!have_best) throw InferenceError("correlation undefined at every lattice point");
  return best;
}

}  // namespace numprag
