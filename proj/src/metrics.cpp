#include "numprag/metrics.hpp"

#include <set>

#include "numprag/fitting.hpp"

namespace numprag {

std::string to_string(JudgmentKind kind) {
  switch (kind) {
    case JudgmentKind::InterpretationUS: return "interpretation";
    case JudgmentKind::AffectUS: return "affect";
    case JudgmentKind::PricePrior: return "price-prior";
    case JudgmentKind::AffectPrior: return "affect-prior";
  }
  return "unknown";
}

JudgmentKind parse_judgment_kind(std::string_view name) {
  for (auto k : {JudgmentKind::InterpretationUS, JudgmentKind::AffectUS, JudgmentKind::PricePrior,
                 JudgmentKind::AffectPrior}) {
    if (to_string(k) == name) return k;
  }
  throw UsageError("unknown judgment kind '" + std::string(name) + "'");
}

std::string to_string(const JudgmentKey& key) {
  const auto& [item, u, s] = key;
  return "(" + item + ", " + to_string(u) + ", " + (s ? to_string(*s) : std::string("-")) + ")";
}

JudgmentKey key_of(const JudgmentRow& row) { return {row.item, row.u, row.s}; }

JudgmentTable::JudgmentTable(JudgmentKind kind, std::vector<JudgmentRow> rows) : kind_(kind), rows_(std::move(rows)) {
  const bool pair_kind = kind_ == JudgmentKind::InterpretationUS || kind_ == JudgmentKind::AffectUS;
  for (const auto& r : rows_) {
    if (r.item.empty()) throw DataError("judgment row with empty item name");
    if (r.u.value <= 0 || (r.s && r.s->value <= 0)) throw DataError("judgment prices must be positive at " + to_string(key_of(r)));
    if (pair_kind != r.s.has_value()) {
      throw DataError(to_string(kind_) + " row " + to_string(key_of(r)) +
                      (pair_kind ? " needs a state" : " must leave the state blank"));
    }
    if (!(r.rating >= 0.0 && r.rating <= 1.0)) {
      throw DataError("rating outside [0, 1] at " + to_string(key_of(r)));
    }
  }
  std::sort(rows_.begin(), rows_.end(), [](const auto& a, const auto& b) { return key_of(a) < key_of(b); });
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (key_of(rows_[i]) == key_of(rows_[i - 1])) throw DataError("duplicate judgment key " + to_string(key_of(rows_[i])));
  }
  if (kind_ == JudgmentKind::InterpretationUS) {
    std::size_t begin = 0;
    while (begin < rows_.size()) {
      std::size_t end = begin;
      double total = 0.0;
      while (end < rows_.size() && rows_[end].item == rows_[begin].item && rows_[end].u == rows_[begin].u) {
        total += rows_[end++].rating;
      }
      if (!(total > 0.0)) {
        throw DataError("interpretation ratings for (" + rows_[begin].item + ", " + to_string(rows_[begin].u) +
                        ") are all zero");
      }
      for (std::size_t i = begin; i < end; ++i) rows_[i].rating /= total;
      begin = end;
    }
  }
}

std::vector<JudgmentKey> JudgmentTable::keys() const {
  std::vector<JudgmentKey> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(key_of(r));
  return out;
}

std::optional<double> JudgmentTable::find(const JudgmentKey& key) const {
  auto it = std::lower_bound(rows_.begin(), rows_.end(), key,
                             [](const JudgmentRow& r, const JudgmentKey& k) { return key_of(r) < k; });
  if (it == rows_.end() || key_of(*it) != key) return std::nullopt;
  return it->rating;
}

std::vector<std::string> JudgmentTable::items() const {
  std::vector<std::string> out;
  for (const auto& r : rows_) {
    if (out.empty() || out.back() != r.item) out.push_back(r.item);
  }
  return out;
}

Eigen::VectorXd JudgmentTable::values() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(rows_.size()));
  for (std::size_t i = 0; i < rows_.size(); ++i) v(static_cast<Eigen::Index>(i)) = rows_[i].rating;
  return v;
}

double hyperbole_prob(const Dist<Price>& posterior, Utterance u) {
  double total = 0.0;
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    if (posterior.support()[i] < u) total += posterior.probs()(static_cast<Eigen::Index>(i));
  }
  return total;
}

std::map<std::int64_t, double> hyperbole_profile(const PosteriorMatrix& matrix, const PriceGrid& grid) {
  std::map<std::int64_t, double> out;
  for (auto m : grid.magnitudes()) {
    double sum = 0.0;
    for (auto k : grid.offsets()) {
      const Utterance u(m + k);
      sum += hyperbole_prob(matrix.row(u), u);
    }
    out[m] = sum / static_cast<double>(grid.offsets().size());
  }
  return out;
}

double halo_bias(const Dist<Price>& posterior, Utterance u, const PriceGrid& grid) {
  if (!grid.contains(u)) throw DomainError("utterance " + to_string(u) + " is not on grid " + grid.spec());
  double fuzzy = 0.0;
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    const auto s = posterior.support()[i];
    if (s != u && std::abs(s.value - u.value) <= 3 && grid.contains(s)) {
      fuzzy += posterior.probs()(static_cast<Eigen::Index>(i));
    }
  }
  return posterior.prob(u) - fuzzy;
}

HaloSummary halo_summary(const PosteriorMatrix& matrix, const PriceGrid& grid) {
  double sharp = 0.0, round = 0.0;
  std::size_t n_sharp = 0, n_round = 0;
  for (const auto& u : grid.states()) {
    const double h = halo_bias(matrix.row(u), u, grid);
    if (is_round(u)) {
      round += h;
      ++n_round;
    } else {
      sharp += h;
      ++n_sharp;
    }
  }
  if (!n_sharp || !n_round) throw DataError("halo summary needs both sharp and round utterances");
  return {sharp / static_cast<double>(n_sharp), round / static_cast<double>(n_round)};
}

AffectComparison affect_comparison(const AffectField& affect, const PriceGrid& grid) {
  AffectComparison out;
  double lit = 0.0, hyp = 0.0;
  for (const auto& [cell, p] : affect) {
    const auto& [u, s] = cell;
    if (!grid.contains(u) || !grid.contains(s)) {
      throw DataError("affect cell (" + to_string(u) + ", " + to_string(s) + ") is not on grid " + grid.spec());
    }
    const auto ru = round10(u), rs = round10(s);
    if (ru == rs) {
      lit += p;
      ++out.literal_cells;
    } else if (ru > rs) {
      hyp += p;
      ++out.hyperbolic_cells;
    }
  }
  if (!out.literal_cells) throw DataError("affect comparison has no literal cells");
  if (!out.hyperbolic_cells) throw DataError("affect comparison has no hyperbolic cells");
  out.literal_mean = lit / static_cast<double>(out.literal_cells);
  out.hyperbolic_mean = hyp / static_cast<double>(out.hyperbolic_cells);
  return out;
}

std::map<std::string, AffectComparison> affect_comparison_by_item(const JudgmentTable& table, const PriceGrid& grid) {
  if (table.kind() != JudgmentKind::AffectUS) throw DataError("affect comparison needs an affect table");
  std::map<std::string, AffectField> per_item;
  for (const auto& r : table.rows()) per_item[r.item][{r.u, *r.s}] = r.rating;

  std::map<std::string, AffectComparison> out;
  AffectComparison pooled;
  double lit = 0.0, hyp = 0.0;
  for (const auto& [item, field] : per_item) {
    auto c = affect_comparison(field, grid);
    lit += c.literal_mean * static_cast<double>(c.literal_cells);
    hyp += c.hyperbolic_mean * static_cast<double>(c.hyperbolic_cells);
    pooled.literal_cells += c.literal_cells;
    pooled.hyperbolic_cells += c.hyperbolic_cells;
    out[item] = c;
  }
  if (out.empty()) throw DataError("affect comparison on an empty table");
  pooled.literal_mean = lit / static_cast<double>(pooled.literal_cells);
  pooled.hyperbolic_mean = hyp / static_cast<double>(pooled.hyperbolic_cells);
  out["*"] = pooled;
  return out;
}

double correlate_tables(const JudgmentTable& a, const JudgmentTable& b) {
  if (a.kind() != b.kind()) {
    throw DataError("cannot correlate " + to_string(a.kind()) + " with " + to_string(b.kind()) + " table");
  }
  const auto ka = a.keys(), kb = b.keys();
  if (ka != kb) {
    std::vector<JudgmentKey> only_a, only_b;
    std::set_difference(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(only_a));
    std::set_difference(kb.begin(), kb.end(), ka.begin(), ka.end(), std::back_inserter(only_b));
    std::string msg = "judgment key sets differ:";
    auto list = [&msg](const char* label, const std::vector<JudgmentKey>& keys) {
      if (keys.empty()) return;
      msg += std::string(" ") + label + " " + std::to_string(keys.size()) + " [";
      for (std::size_t i = 0; i < keys.size() && i < 5; ++i) msg += (i ? " " : "") + to_string(keys[i]);
      msg += keys.size() > 5 ? " ...]" : "]";
    };
    list("only in first:", only_a);
    list("only in second:", only_b);
    throw DataError(msg);
  }
  return pearson(a.values(), b.values());
}

}  // namespace numprag
