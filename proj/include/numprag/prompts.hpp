#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "numprag/core.hpp"

namespace numprag {

enum class PromptKind {
  HyperboleHalo,
  AffectSubtext,
  PricePrior,
  AffectPrior,
  CoTFullRSA,
  CoTGoalsOnly,
  CoTPriorsOnly,
  SpeakerLikelihood,
  FreeGeneration,
};

const std::vector<PromptKind>& all_prompt_kinds();
std::string to_string(PromptKind kind);
/// Throws UsageError for unknown names.
PromptKind parse_prompt_kind(std::string_view name);

/// Trial-specific slots of a prompt.
struct PromptContext {
  std::string person_name;
  std::string item_name;
  std::optional<Utterance> u;
  std::optional<PriceState> s;
  std::optional<Goal> goal;
  std::optional<bool> affect;
};

struct RenderedPrompt {
  std::string system;
  std::string user;

  bool operator==(const RenderedPrompt&) const = default;
};

/// Instantiates the fixed template for `kind`. The constant instructions go
/// to the system text and the trial scenario to the user text. Throws
/// TemplateError naming the first missing context field.
RenderedPrompt render_prompt(PromptKind kind, const PromptContext& ctx);

/// Fields render_prompt requires for `kind`, in the order they are checked.
std::vector<std::string> required_fields(PromptKind kind);

}  // namespace numprag
