#include "numprag/core.hpp"

#include <charconv>

namespace numprag {

namespace {

std::vector<std::int64_t> parse_int_list(std::string_view text, std::string_view what) {
  std::vector<std::int64_t> out;
  while (!text.empty()) {
    auto comma = text.find(',');
    auto token = text.substr(0, comma);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw UsageError("bad integer '" + std::string(token) + "' in grid " + std::string(what));
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) throw UsageError("empty grid " + std::string(what));
  return out;
}

std::string join(const std::vector<std::int64_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

}  // namespace

std::string to_string(Price p) { return std::to_string(p.value); }

PriceGrid::PriceGrid(std::vector<std::int64_t> magnitudes, std::vector<std::int64_t> offsets)
    : magnitudes_(std::move(magnitudes)), offsets_(std::move(offsets)) {
  if (magnitudes_.empty() || offsets_.empty()) throw DomainError("grid needs magnitudes and offsets");
  for (std::size_t i = 0; i < magnitudes_.size(); ++i) {
    if (magnitudes_[i] <= 0) throw DomainError("grid magnitudes must be positive");
    if (i && magnitudes_[i] <= magnitudes_[i - 1]) throw DomainError("grid magnitudes must be strictly increasing");
  }
  if (offsets_.front() != 0) throw DomainError("grid offsets must start at 0");
  for (std::size_t i = 1; i < offsets_.size(); ++i) {
    if (offsets_[i] <= offsets_[i - 1]) throw DomainError("grid offsets must be strictly increasing");
  }
  for (auto m : magnitudes_) {
    for (auto k : offsets_) states_.emplace_back(m + k);
  }
  std::sort(states_.begin(), states_.end());
  if (std::adjacent_find(states_.begin(), states_.end()) != states_.end()) {
    throw DomainError("grid offsets overlap the next magnitude block");
  }
}

PriceGrid PriceGrid::interpretation() { return PriceGrid({50, 500, 1000, 5000, 10000}, {0, 1, 2, 3}); }

PriceGrid PriceGrid::prior_elicitation() { return PriceGrid({50, 500, 1000, 5000, 10000}, {0, 1}); }

PriceGrid PriceGrid::parse(std::string_view spec) {
  if (spec == "exp1") return interpretation();
  if (spec == "exp3") return prior_elicitation();
  constexpr std::string_view prefix = "custom:";
  if (spec.substr(0, prefix.size()) != prefix) {
    throw UsageError("grid must be exp1, exp3 or custom:<magnitudes>:<offsets>, got '" + std::string(spec) + "'");
  }
  auto body = spec.substr(prefix.size());
  auto colon = body.find(':');
  if (colon == std::string_view::npos) throw UsageError("custom grid needs <magnitudes>:<offsets>");
  try {
    return PriceGrid(parse_int_list(body.substr(0, colon), "magnitudes"),
                     parse_int_list(body.substr(colon + 1), "offsets"));
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

bool PriceGrid::contains(Price p) const { return std::binary_search(states_.begin(), states_.end(), p); }

std::optional<std::size_t> PriceGrid::index_of(Price p) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), p);
  if (it == states_.end() || *it != p) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

std::optional<std::int64_t> PriceGrid::magnitude_of(Price p) const {
  for (auto m : magnitudes_) {
    for (auto k : offsets_) {
      if (m + k == p.value) return m;
    }
  }
  return std::nullopt;
}

std::string PriceGrid::spec() const {
  if (*this == interpretation()) return "exp1";
  if (*this == prior_elicitation()) return "exp3";
  return "custom:" + join(magnitudes_) + ":" + join(offsets_);
}

std::vector<Price> grid_states(const PriceGrid& grid) { return grid.states(); }

bool is_round(Utterance u) { return u.value % 10 == 0; }

Price round10(Price s) {
  auto r = s.value % 10;
  return Price(r >= 5 ? s.value - r + 10 : s.value - r);
}

Goal Goal::make(bool communicate_price, bool communicate_affect, Precision precision) {
  if (!communicate_price && !communicate_affect) {
    throw DomainError("goal must communicate the price, the affect, or both");
  }
  return Goal(communicate_price, communicate_affect, communicate_price ? precision : Precision::Exact);
}

Goal Goal::parse(std::string_view name) {
  for (const auto& g : canonical_goals()) {
    if (g.name() == name) return g;
  }
  throw DataError("unknown goal '" + std::string(name) + "'");
}

std::string Goal::name() const {
  const char* precision = precision_ == Precision::Exact ? "exact" : "approx";
  if (price_ && affect_) return std::string("both-") + precision;
  if (price_) return std::string("price-") + precision;
  return "affect";
}

const std::vector<Goal>& canonical_goals() {
  static const std::vector<Goal> goals = {Goal::price_exact(), Goal::price_approx(), Goal::affect_only(),
                                          Goal::both_exact(), Goal::both_approx()};
  return goals;
}

CostModel::CostModel(double sharp) : sharp_cost(sharp) {
  if (!(sharp >= 1.0) || !std::isfinite(sharp)) throw DomainError("sharp utterance cost must be >= 1");
}

SamplingConfig::SamplingConfig(double temp, int n) : temperature(temp), n_samples(n) {
  if (n < 1) throw DomainError("n_samples must be >= 1");
  if (!(temp >= 0.0)) throw DomainError("temperature must be >= 0");
}

}  // namespace numprag
