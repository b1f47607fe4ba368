#include "numprag/prompts.hpp"

namespace numprag {

namespace {

constexpr std::string_view kInterpretationSystem =
    "In each scenario, two friends are talking about the price of an item.\n"
    "Please read the scenarios carefully and provide the probability that the item has the described price.\n"
    "Provide the estimates on a continuous scale between 0 and 1, where 0 stands for \"impossible\" and 1 stands "
    "for \"extremely likely\".";

constexpr std::string_view kInterpretationUser =
    "{person} bought a new {item}. A friend asked him, \"Was it expensive?\" {person} said, \"It cost ${u}.\" "
    "Please provide the probability that the {item} costs ${s}.";

constexpr std::string_view kAffectSubtextSystem =
    "In each scenario, a person has just bought an item and is talking to a friend about the price.\n"
    "Please read the scenarios carefully and provide the probability that the person thinks that the item is "
    "expensive.\n"
    "Provide the estimates on a continuous scale between 0 and 1, where 0 stands for \"impossible\" and 1 stands "
    "for \"absolutely certain\".";

constexpr std::string_view kAffectSubtextUser =
    "{person} bought a new {item}. It cost ${s}. A friend asked him, \"Was it expensive?\" {person} said, \"It cost "
    "${u}.\" Please provide the probability that {person} thinks that the {item} is expensive.";

constexpr std::string_view kPricePriorSystem =
    "Each scenario is about the price of an item.\n"
    "Please read the scenarios carefully and provide the probability that someone buys the item with the given "
    "price.\n"
    "Provide the estimates on a continuous scale between 0 and 1, where 0 stands for \"impossible\" and 1 stands "
    "for \"extremely likely\".";

constexpr std::string_view kPricePriorUser =
    "{person} bought a new {item}. It cost ${s}. Please provide the probability that someone buys the {item} with "
    "this price.";

constexpr std::string_view kAffectPriorSystem =
    "In each scenario, someone has just bought an item.\n"
    "Please read the scenarios carefully and provide the probability that the buyer thinks that the item is "
    "expensive.\n"
    "Provide the estimates on a continuous scale between 0 and 1, where 0 stands for \"impossible\" and 1 stands "
    "for \"absolutely certain\".";

constexpr std::string_view kAffectPriorUser =
    "{person} bought a new {item}. It cost ${s}. Please provide the probability that the buyer thinks that the "
    "{item} is expensive.";

constexpr std::string_view kFullRsaExample =
    "EXAMPLE:\n"
    "Anne bought a new toaster. A friend asked her, \"Was it expensive?\" Anne said, \"It cost $1000.\"\n"
    "Please provide the probability that Anne thinks that the toaster is expensive.\n"
    "Let's think step by step and consider Anne's goals. To answer her friend's question, Anne might want to tell "
    "her friend the price, so that her friend can judge whether the toaster is expensive or not.\n"
    "She could have the goal to communicate the exact price, or to communicate her attitude about the price or "
    "both.\n"
    "Anne said \"$1000\", but given general world knowledge, it is unlikely that a toaster costs literally $1000. "
    "Therefore, it is unlikely that Anne wants to communicate the exact price. A toaster that costs $1000 would be "
    "considered expensive, which would be upsetting. Therefore, it is more likely that Anne wants to communicate "
    "that she is upset and felt that the toaster was too expensive, using a hyperbole to talk about the price.\n"
    "Therefore, it is likely that Anne thinks that the toaster is expensive. The answer is: 0.9\n"
    "A: 0.9";

// The ablation prompts are reproduced as they were run, spelling included.
constexpr std::string_view kAblationPreamble =
    "In each scenario, two friends are talking about the price of an item.\n"
    "Please read the scenarios carefully and provide the probability that the item has the desribed price.\n"
    "Provide the estimates on a continuous scale between 0 and 1, where 0 stands for \"impossible\" and 1 stands "
    "for \"extremely likely\".\n"
    "Write ONLY your final answer as 'A:<rating>'.\n"
    "\n"
    "EXAMPLE:\n"
    "Anne bought a new toaster. A friend asked her, \"Was it expensive?\" Anne said, \"It cost $1000.\"\n"
    "Please provide the probability that the toaster cost $50.\n";

constexpr std::string_view kGoalsOnlyReasoning =
    "Let's think step by step and consider the possible communicative goals of Anne.\n"
    "Anne might want to communicate about the price, about her attitude towards the price, or both.\n"
    "For communicating the price, she would choose to be precise, ignoring other possible meaning dimesnions. For "
    "communicating her attitude, she would choose a an expression that signal attitude, where other possible "
    "dimensions like being precise don't matter. For communicating both, she might choose an utterance that trades "
    "off both goals.\n"
    "Thr utterance seems to fit the goals attitude communication and both. Therefore, the answer is: 0.75\n"
    "A: 0.75\n"
    "\n"
    "YOUR TURN:";

constexpr std::string_view kPriorsOnlyReasoning =
    "Let's think step by step and consider the prior probability of toaster prices.\n"
    "Given general world knowledge, it is unlikely that a toaster costs literally $1000. Rather, a price around $50 "
    "would be considered a normal price for a toaster. Therefore, a toaster that costs $1000 would be considered "
    "expensive.\n"
    "Since Anne stated an unlikely price for the toaster, it is likely that the true price of the toaster was not "
    "what would normally be expected a priori. Therefore, the answer is: 0.75\n"
    "A: 0.75\n"
    "\n"
    "YOUR TURN:";

constexpr std::string_view kSpeakerSystem =
    "In each scenario, two friends are talking about the price of an item.\n"
    "Please read the scenarios carefully and provide the probability that the speaker would say the following "
    "utterance, given their communicative goal and the true price of the item.\n"
    "Provide the estimates on a continuous scale between 0 and 1, where 0 stands for \"impossible\" and 1 stands "
    "for \"extremely likely\".\n"
    "Write ONLY your final answer as 'A:rating'.";

constexpr std::string_view kFreeGenerationSystem =
    "In each scenario, two friends are talking about the price of an item.\n"
    "Please read the scenarios carefully and complete the speaker's utterance with your best guess, given their "
    "communicative goal and the true price of the item.\n"
    "Write ONLY your numerical completion for the utterance as 'A:<completion>'.";

constexpr std::string_view kSpeakerScene =
    "{person} bought a {item}. The {item} cost ${s}. A friend asked {person} if the {item} was expensive.";

struct KindInfo {
  PromptKind kind;
  const char* name;
  std::vector<std::string> fields;
};

const std::vector<KindInfo>& kind_table() {
  static const std::vector<KindInfo> table = {
      {PromptKind::HyperboleHalo, "hyperbole-halo", {"person_name", "item_name", "u", "s"}},
      {PromptKind::AffectSubtext, "affect-subtext", {"person_name", "item_name", "u", "s"}},
      {PromptKind::PricePrior, "price-prior", {"person_name", "item_name", "s"}},
      {PromptKind::AffectPrior, "affect-prior", {"person_name", "item_name", "s"}},
      {PromptKind::CoTFullRSA, "cot-full-rsa", {"person_name", "item_name", "u", "s"}},
      {PromptKind::CoTGoalsOnly, "cot-goals-only", {"person_name", "item_name", "u", "s"}},
      {PromptKind::CoTPriorsOnly, "cot-priors-only", {"person_name", "item_name", "u", "s"}},
      {PromptKind::SpeakerLikelihood, "speaker-likelihood", {"person_name", "item_name", "s", "goal", "affect", "u"}},
      {PromptKind::FreeGeneration, "free-generation", {"person_name", "item_name", "s", "goal"}},
  };
  return table;
}

const KindInfo& info(PromptKind kind) {
  for (const auto& k : kind_table()) {
    if (k.kind == kind) return k;
  }
  throw UsageError("unknown prompt kind");
}

bool has_field(const PromptContext& ctx, const std::string& field) {
  if (field == "person_name") return !ctx.person_name.empty();
  if (field == "item_name") return !ctx.item_name.empty();
  if (field == "u") return ctx.u.has_value();
  if (field == "s") return ctx.s.has_value();
  if (field == "goal") return ctx.goal.has_value();
  if (field == "affect") return ctx.affect.has_value();
  return false;
}

void replace_all(std::string& text, std::string_view slot, const std::string& value) {
  for (auto pos = text.find(slot); pos != std::string::npos; pos = text.find(slot, pos + value.size())) {
    text.replace(pos, slot.size(), value);
  }
}

std::string fill(std::string_view tmpl, const PromptContext& ctx) {
  std::string out(tmpl);
  replace_all(out, "{person}", ctx.person_name);
  replace_all(out, "{item}", ctx.item_name);
  if (ctx.u) replace_all(out, "{u}", to_string(*ctx.u));
  if (ctx.s) replace_all(out, "{s}", to_string(*ctx.s));
  return out;
}

// Goal lines shared by the speaker-likelihood and free-generation scenes. The
// affect line is dropped when the goal ignores affect, the precision line when
// it ignores the price.
std::string goal_lines(const Goal& g, bool affect) {
  std::string out;
  if (g.communicates_price() && g.communicates_affect()) {
    out += "\n{person} wants to communicate both their attitude towards the price of the {item} they bought and the "
           "price of the {item}.";
  } else if (g.communicates_price()) {
    out += "\n{person} wants to communicate the price of the {item} they bought.";
  } else {
    out += "\n{person} wants to communicate their attitude towards the price of the {item} they bought.";
  }
  if (g.communicates_price()) {
    out += g.precision() == Precision::Exact ? "\n{person} wants to precisely communicate the price of the {item} they bought."
                                             : "\n{person} wants to approximately communicate the price of the {item} they bought.";
  }
  if (g.communicates_affect()) {
    out += affect ? "\n{person} thinks the {item} is too expensive." : "\n{person} does not think the {item} is too expensive.";
  }
  return out;
}

}  // namespace

const std::vector<PromptKind>& all_prompt_kinds() {
  static const std::vector<PromptKind> kinds = [] {
    std::vector<PromptKind> out;
    for (const auto& k : kind_table()) out.push_back(k.kind);
    return out;
  }();
  return kinds;
}

std::string to_string(PromptKind kind) { return info(kind).name; }

PromptKind parse_prompt_kind(std::string_view name) {
  for (const auto& k : kind_table()) {
    if (name == k.name) return k.kind;
  }
  throw UsageError("unknown prompt kind '" + std::string(name) + "'");
}

std::vector<std::string> required_fields(PromptKind kind) { return info(kind).fields; }

RenderedPrompt render_prompt(PromptKind kind, const PromptContext& ctx) {
  for (const auto& f : info(kind).fields) {
    if (!has_field(ctx, f)) throw TemplateError(to_string(kind) + " prompt needs context field '" + f + "'");
  }
  switch (kind) {
    case PromptKind::HyperboleHalo:
      return {std::string(kInterpretationSystem), fill(kInterpretationUser, ctx)};
    case PromptKind::AffectSubtext:
      return {std::string(kAffectSubtextSystem), fill(kAffectSubtextUser, ctx)};
    case PromptKind::PricePrior:
      return {std::string(kPricePriorSystem), fill(kPricePriorUser, ctx)};
    case PromptKind::AffectPrior:
      return {std::string(kAffectPriorSystem), fill(kAffectPriorUser, ctx)};
    case PromptKind::CoTFullRSA:
      return {std::string(kInterpretationSystem) + "\n\n" + std::string(kFullRsaExample),
              fill(kInterpretationUser, ctx)};
    case PromptKind::CoTGoalsOnly:
      return {std::string(kAblationPreamble) + std::string(kGoalsOnlyReasoning), fill(kInterpretationUser, ctx)};
    case PromptKind::CoTPriorsOnly:
      return {std::string(kAblationPreamble) + std::string(kPriorsOnlyReasoning), fill(kInterpretationUser, ctx)};
    case PromptKind::SpeakerLikelihood:
      return {std::string(kSpeakerSystem),
              fill(std::string(kSpeakerScene) + goal_lines(*ctx.goal, *ctx.affect) +
                       "\nHow likely is it that {person} will say: 'The {item} cost ${u}.'?",
                   ctx)};
    case PromptKind::FreeGeneration:
      return {std::string(kFreeGenerationSystem),
              fill(std::string(kSpeakerScene) + goal_lines(*ctx.goal, ctx.goal->communicates_affect()) +
                       "\nComplete what {person} will say: 'The {item} cost $<completion>.'",
                   ctx)};
  }
  throw UsageError("unknown prompt kind");
}

}  // namespace numprag
