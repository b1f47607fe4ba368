#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "numprag/errors.hpp"

namespace numprag {

/// Whole-dollar price. Used both for true price states and for uttered numbers,
/// which share one lattice.
struct Price {
  std::int64_t value = 0;

  constexpr Price() = default;
  constexpr explicit Price(std::int64_t v) : value(v) {}
  constexpr auto operator<=>(const Price&) const = default;
};

using PriceState = Price;
using Utterance = Price;

std::string to_string(Price p);

/// A price lattice {m + k : m in magnitudes, k in offsets}.
class PriceGrid {
 public:
  PriceGrid(std::vector<std::int64_t> magnitudes, std::vector<std::int64_t> offsets);

  /// Interpretation design: {50, 500, 1000, 5000, 10000} x {0, 1, 2, 3}.
  static PriceGrid interpretation();
  /// Prior elicitation design: same magnitudes x {0, 1}.
  static PriceGrid prior_elicitation();
  /// Accepts "exp1", "exp3" or "custom:<m1,m2,...>:<k1,k2,...>".
  static PriceGrid parse(std::string_view spec);

  const std::vector<std::int64_t>& magnitudes() const noexcept { return magnitudes_; }
  const std::vector<std::int64_t>& offsets() const noexcept { return offsets_; }

  /// Sorted states; cached at construction.
  const std::vector<Price>& states() const noexcept { return states_; }
  bool contains(Price p) const;
  std::optional<std::size_t> index_of(Price p) const;

  /// Magnitude block the price belongs to, if it is on the lattice.
  std::optional<std::int64_t> magnitude_of(Price p) const;

  std::string spec() const;

  bool operator==(const PriceGrid& other) const {
    return magnitudes_ == other.magnitudes_ && offsets_ == other.offsets_;
  }

 private:
  std::vector<std::int64_t> magnitudes_;
  std::vector<std::int64_t> offsets_;
  std::vector<Price> states_;
};

std::vector<Price> grid_states(const PriceGrid& grid);

bool is_round(Utterance u);

/// Nearest multiple of ten, halves rounding up.
Price round10(Price s);

struct Meaning {
  PriceState state;
  bool affect = false;

  auto operator<=>(const Meaning&) const = default;
};

enum class Precision { Exact, Approximate };

/// Which meaning dimensions a speaker communicates, and how precisely.
/// Always canonical: precision is Exact whenever the price is not communicated.
class Goal {
 public:
  static Goal make(bool communicate_price, bool communicate_affect, Precision precision);

  static Goal price_exact() { return make(true, false, Precision::Exact); }
  static Goal price_approx() { return make(true, false, Precision::Approximate); }
  static Goal affect_only() { return make(false, true, Precision::Exact); }
  static Goal both_exact() { return make(true, true, Precision::Exact); }
  static Goal both_approx() { return make(true, true, Precision::Approximate); }

  /// Parses the names produced by name().
  static Goal parse(std::string_view name);

  bool communicates_price() const noexcept { return price_; }
  bool communicates_affect() const noexcept { return affect_; }
  Precision precision() const noexcept { return precision_; }

  /// "price-exact", "price-approx", "affect", "both-exact", "both-approx".
  std::string name() const;

  auto operator<=>(const Goal&) const = default;

 private:
  Goal(bool price, bool affect, Precision precision) : price_(price), affect_(affect), precision_(precision) {}

  bool price_;
  bool affect_;
  Precision precision_;
};

/// The five distinct goals, in a fixed order.
const std::vector<Goal>& canonical_goals();

struct CostModel {
  double sharp_cost = 1.0;
  static constexpr double round_cost = 1.0;

  explicit CostModel(double sharp = 1.0);
  double cost(Utterance u) const { return is_round(u) ? round_cost : sharp_cost; }
};

struct SamplingConfig {
  double temperature = 1.0;
  int n_samples = 10;

  SamplingConfig() = default;
  SamplingConfig(double temp, int n);
};

inline constexpr double kNormalizationTolerance = 1e-9;

/// Finite distribution over an ordered support. Probabilities are stored in
/// linear space.
template <typename Outcome, typename Scalar = double>
class Dist {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Dist(std::vector<Outcome> support, Vector probs) : support_(std::move(support)), probs_(std::move(probs)) {
    if (static_cast<Eigen::Index>(support_.size()) != probs_.size()) {
      throw DomainError("distribution support and probabilities differ in length");
    }
    if (support_.empty()) throw DomainError("distribution with empty support");
    if ((probs_.array() < Scalar(0)).any() || !probs_.allFinite()) {
      throw DomainError("distribution with negative or non-finite probability");
    }
    if (std::abs(probs_.sum() - Scalar(1)) > Scalar(kNormalizationTolerance)) {
      throw DomainError("distribution does not sum to one");
    }
    auto sorted = support_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DomainError("distribution support has duplicate outcomes");
    }
  }

  const std::vector<Outcome>& support() const noexcept { return support_; }
  const Vector& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return support_.size(); }

  std::optional<std::size_t> index_of(const Outcome& o) const {
    auto it = std::find(support_.begin(), support_.end(), o);
    if (it == support_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - support_.begin());
  }

  /// Zero for outcomes outside the support.
  Scalar prob(const Outcome& o) const {
    auto i = index_of(o);
    return i ? probs_(static_cast<Eigen::Index>(*i)) : Scalar(0);
  }

 private:
  std::vector<Outcome> support_;
  Vector probs_;
};

/// Renormalizes non-negative weights. Throws NormalizationError on a negative
/// weight or a zero total.
template <typename Outcome, typename Scalar>
Dist<Outcome, Scalar> normalize(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& weights,
                                std::vector<Outcome> support) {
  if (static_cast<Eigen::Index>(support.size()) != weights.size()) {
    throw NormalizationError("weights and support differ in length");
  }
  if ((weights.array() < Scalar(0)).any() || !weights.allFinite()) {
    throw NormalizationError("negative or non-finite weight");
  }
  const Scalar total = weights.sum();
  if (!(total > Scalar(0))) throw NormalizationError("all weights are zero");
  return Dist<Outcome, Scalar>(std::move(support), weights / total);
}

template <typename Outcome>
Dist<Outcome> normalize(const std::vector<double>& weights, std::vector<Outcome> support) {
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  return normalize<Outcome, double>(w, std::move(support));
}

}  // namespace numprag
