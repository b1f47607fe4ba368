#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "numprag/core.hpp"

namespace numprag {

enum class JudgmentKind {
  InterpretationUS,  ///< P(s | u), renormalized per (item, u)
  AffectUS,          ///< P(affect | u, s)
  PricePrior,        ///< P_S(s); price stored in `u`, `s` absent
  AffectPrior,       ///< P_A(1 | s); price stored in `u`, `s` absent
};

std::string to_string(JudgmentKind kind);
JudgmentKind parse_judgment_kind(std::string_view name);

struct JudgmentRow {
  std::string item;
  Price u;
  std::optional<Price> s;
  double rating = 0.0;
};

using JudgmentKey = std::tuple<std::string, Price, std::optional<Price>>;

std::string to_string(const JudgmentKey& key);

/// Ratings from humans, a language model or the RSA model. Rows are kept in
/// the canonical flattening order: item (lexicographic), then u, then s, all
/// ascending. That order defines every correlation computed from a table.
class JudgmentTable {
 public:
  /// Validates ratings and key uniqueness; InterpretationUS rows are
  /// renormalized per (item, u).
  JudgmentTable(JudgmentKind kind, std::vector<JudgmentRow> rows);

  JudgmentKind kind() const noexcept { return kind_; }
  const std::vector<JudgmentRow>& rows() const noexcept { return rows_; }

  std::vector<JudgmentKey> keys() const;
  std::optional<double> find(const JudgmentKey& key) const;
  std::vector<std::string> items() const;

  /// Ratings in flattening order.
  Eigen::VectorXd values() const;

 private:
  JudgmentKind kind_;
  std::vector<JudgmentRow> rows_;
};

JudgmentKey key_of(const JudgmentRow& row);

}  // namespace numprag
