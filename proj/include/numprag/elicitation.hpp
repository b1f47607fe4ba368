#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "numprag/engine.hpp"
#include "numprag/judgments.hpp"
#include "numprag/prompts.hpp"
#include "numprag/transport.hpp"

namespace numprag {

/// Rating in [0, 1] from a completion: the last "A:" answer if there is one,
/// otherwise the last bare number that lies in [0, 1].
double parse_rating(const std::string& text);

/// Whole-dollar price from a free-generation completion ("A: $45" -> 45).
std::int64_t parse_price_completion(const std::string& text);

struct ElicitationOptions {
  SamplingConfig sampling;
  std::string person_name = "Daniel";
  /// Minimum parseable samples; defaults to ceil(n / 2).
  std::optional<int> min_parsed;

  int required_parsed() const { return min_parsed.value_or((sampling.n_samples + 1) / 2); }
};

struct ElicitationOutcome {
  double mean = 0.0;
  int parsed = 0;
  Transcript transcript;
  std::vector<std::string> diagnostics;  ///< one entry per unparseable sample
};

ElicitationOutcome elicit(ChatTransport& transport, PromptKind kind, const PromptContext& ctx,
                          const ElicitationOptions& opts);

/// Mean of the parseable ratings over n samples at the configured temperature.
double elicit_mean(ChatTransport& transport, PromptKind kind, const PromptContext& ctx,
                   const ElicitationOptions& opts);

/// Price prior (renormalized over the grid) and raw affect prior per item.
std::map<std::string, PriorSet> build_priors(ChatTransport& transport, const std::vector<std::string>& items,
                                             const PriceGrid& grid, const ElicitationOptions& opts);

/// Interpretation (hyperbole-halo or any CoT kind) or affect-subtext ratings
/// for every (item, u, s) cell of the grid.
JudgmentTable build_judgments(ChatTransport& transport, PromptKind kind, const std::vector<std::string>& items,
                              const PriceGrid& grid, const ElicitationOptions& opts);

using RawSpeakerScores = std::map<SpeakerKey, std::map<Price, double>>;  // (s, a, g) -> u -> mean rating

/// Sums raw scores over every (s', a') the goal cannot tell apart from (s, a),
/// then renormalizes over the grid's utterances.
SpeakerTable aggregate_speaker_scores(const RawSpeakerScores& raw, const PriceGrid& grid,
                                      const std::vector<Goal>& goals);

/// Elicits raw P(u | s, a, g) for the grid and aggregates it. Prompts that
/// render identically (e.g. price-only goals for either affect) are queried once.
std::map<std::string, SpeakerTable> build_speaker_table(ChatTransport& transport,
                                                        const std::vector<std::string>& items, const PriceGrid& grid,
                                                        const std::vector<Goal>& goals,
                                                        const ElicitationOptions& opts);

struct FreeGeneration {
  std::vector<std::int64_t> prices;
  std::vector<std::string> diagnostics;
};

/// Raw price completions per item; unparseable samples are skipped, and an
/// item with none left is an ElicitationError.
std::map<std::string, FreeGeneration> free_generate(ChatTransport& transport, const std::vector<std::string>& items,
                                                    PriceState s, const Goal& goal, const ElicitationOptions& opts);

}  // namespace numprag
