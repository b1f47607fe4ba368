#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "numprag/engine.hpp"

namespace fixtures {

using numprag::Price;
using numprag::PriceGrid;
using numprag::PriorSet;

inline PriorSet make_priors(const std::string& item, const PriceGrid& grid, const std::vector<double>& weights,
                            const std::vector<double>& affect) {
  std::map<Price, double> pa;
  for (std::size_t i = 0; i < grid.states().size(); ++i) pa[grid.states()[i]] = affect[i];
  return PriorSet{item, numprag::normalize(weights, grid.states()), pa};
}

inline PriorSet uniform_priors(const std::string& item, const PriceGrid& grid, double affect) {
  const auto n = grid.states().size();
  return make_priors(item, grid, std::vector<double>(n, 1.0), std::vector<double>(n, affect));
}

/// Price prior decaying steeply with magnitude, affect rising with it; the
/// same within each magnitude block.
inline PriorSet monotone_priors(const std::string& item, const PriceGrid& grid, double decay) {
  const std::vector<double> affect_by_block = {0.1, 0.4, 0.7, 0.9, 0.97};
  std::vector<double> w;
  std::vector<double> a;
  for (const auto& s : grid.states()) {
    const auto mag = *grid.magnitude_of(s);
    std::size_t block = 0;
    while (grid.magnitudes()[block] != mag) ++block;
    w.push_back(std::pow(decay, static_cast<double>(block)));
    a.push_back(affect_by_block[std::min(block, affect_by_block.size() - 1)]);
  }
  return make_priors(item, grid, w, a);
}

inline std::map<std::string, PriorSet> monotone_fixture(const PriceGrid& grid) {
  std::map<std::string, PriorSet> out;
  out.emplace("electric kettle", monotone_priors("electric kettle", grid, 0.25));
  out.emplace("laptop", monotone_priors("laptop", grid, 0.4));
  out.emplace("watch", monotone_priors("watch", grid, 0.3));
  return out;
}

inline PriorSet random_priors(const std::string& item, const PriceGrid& grid, std::mt19937_64& rng,
                              bool allow_zero = false) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> w;
  std::vector<double> a;
  for (std::size_t i = 0; i < grid.states().size(); ++i) {
    w.push_back(allow_zero && unit(rng) < 0.15 ? 0.0 : 0.05 + unit(rng));
    const double r = unit(rng);
    a.push_back(allow_zero && r < 0.15 ? 0.0 : unit(rng));
  }
  if (allow_zero) w[0] = 1.0;
  return make_priors(item, grid, w, a);
}

}  // namespace fixtures
