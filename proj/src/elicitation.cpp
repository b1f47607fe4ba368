#include "numprag/elicitation.hpp"

#include <cstdlib>
#include <regex>

namespace numprag {

namespace {

const std::regex& answer_re() {
  static const std::regex re(R"(\bA\s*:\s*<?\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))");
  return re;
}

const std::regex& number_re() {
  static const std::regex re(R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)");
  return re;
}

const std::regex& price_answer_re() {
  static const std::regex re(R"(\bA\s*:\s*<?\s*\$?\s*(\d[\d,]*(?:\.\d+)?))");
  return re;
}

const std::regex& price_re() {
  static const std::regex re(R"(\$?\s*(\d[\d,]*(?:\.\d+)?))");
  return re;
}

std::optional<std::string> last_match(const std::string& text, const std::regex& re, int group) {
  std::optional<std::string> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
    out = (*it)[group].str();
  }
  return out;
}

std::string excerpt(const std::string& text) { return text.size() > 80 ? text.substr(0, 77) + "..." : text; }

// Infinity on overflow, which every range check rejects.
double to_double(const std::string& token) { return std::strtod(token.c_str(), nullptr); }

}  // namespace

double parse_rating(const std::string& text) {
  if (auto answer = last_match(text, answer_re(), 1)) {
    const double v = to_double(*answer);
    if (!(v >= 0.0 && v <= 1.0)) throw ParseError("answer " + *answer + " outside [0, 1]", text);
    return v;
  }
  bool saw_number = false;
  std::optional<double> best;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), number_re()); it != std::sregex_iterator(); ++it) {
    saw_number = true;
    const double v = to_double(it->str());
    if (v >= 0.0 && v <= 1.0) best = v;
  }
  if (best) return *best;
  throw ParseError(saw_number ? "no number in [0, 1]: '" + excerpt(text) + "'" : "no rating in '" + excerpt(text) + "'",
                   text);
}

std::int64_t parse_price_completion(const std::string& text) {
  auto token = last_match(text, price_answer_re(), 1);
  if (!token) token = last_match(text, price_re(), 1);
  if (!token) throw ParseError("no price in '" + excerpt(text) + "'", text);
  std::string digits;
  for (char c : *token) {
    if (c != ',') digits += c;
  }
  const double d = to_double(digits);
  if (!(d >= 0.5 && d < 9e18)) throw ParseError("price out of range in '" + excerpt(text) + "'", text);
  const auto v = std::llround(d);
  if (v <= 0) throw ParseError("price must be positive in '" + excerpt(text) + "'", text);
  return v;
}

ElicitationOutcome elicit(ChatTransport& transport, PromptKind kind, const PromptContext& ctx,
                          const ElicitationOptions& opts) {
  const auto prompt = render_prompt(kind, ctx);
  const ChatRequest request{prompt.system, prompt.user, opts.sampling.temperature};
  ElicitationOutcome out;
  out.transcript = {fingerprint(request), request.system, request.user, request.temperature,
                    transport.sample(request, opts.sampling.n_samples)};
  double sum = 0.0;
  for (std::size_t i = 0; i < out.transcript.samples.size(); ++i) {
    try {
      sum += parse_rating(out.transcript.samples[i]);
      ++out.parsed;
    } catch (const ParseError& e) {
      out.diagnostics.push_back("sample " + std::to_string(i) + ": " + e.what());
    }
  }
  if (out.parsed < opts.required_parsed() || out.parsed == 0) {
    std::string msg = to_string(kind) + " prompt " + out.transcript.fingerprint + ": only " +
                      std::to_string(out.parsed) + " of " + std::to_string(out.transcript.samples.size()) +
                      " samples parsed";
    for (const auto& d : out.diagnostics) msg += "\n  " + d;
    throw ElicitationError(msg);
  }
  out.mean = sum / out.parsed;
  return out;
}

double elicit_mean(ChatTransport& transport, PromptKind kind, const PromptContext& ctx,
                   const ElicitationOptions& opts) {
  return elicit(transport, kind, ctx, opts).mean;
}

std::map<std::string, PriorSet> build_priors(ChatTransport& transport, const std::vector<std::string>& items,
                                             const PriceGrid& grid, const ElicitationOptions& opts) {
  auto sorted = items;
  std::sort(sorted.begin(), sorted.end());
  std::map<std::string, PriorSet> out;
  for (const auto& item : sorted) {
    std::vector<double> price;
    std::map<Price, double> affect;
    for (const auto& s : grid.states()) {
      PromptContext ctx{opts.person_name, item, std::nullopt, s, std::nullopt, std::nullopt};
      price.push_back(elicit_mean(transport, PromptKind::PricePrior, ctx, opts));
      affect[s] = elicit_mean(transport, PromptKind::AffectPrior, ctx, opts);
    }
    try {
      out.emplace(item, PriorSet{item, normalize(price, grid.states()), std::move(affect)});
    } catch (const NormalizationError&) {
      throw ElicitationError("every price prior rating for '" + item + "' is zero");
    }
  }
  return out;
}

JudgmentTable build_judgments(ChatTransport& transport, PromptKind kind, const std::vector<std::string>& items,
                              const PriceGrid& grid, const ElicitationOptions& opts) {
  JudgmentKind table_kind;
  switch (kind) {
    case PromptKind::HyperboleHalo:
    case PromptKind::CoTFullRSA:
    case PromptKind::CoTGoalsOnly:
    case PromptKind::CoTPriorsOnly:
      table_kind = JudgmentKind::InterpretationUS;
      break;
    case PromptKind::AffectSubtext:
      table_kind = JudgmentKind::AffectUS;
      break;
    default:
      throw UsageError(to_string(kind) + " prompts do not produce a (u, s) judgment table");
  }
  auto sorted = items;
  std::sort(sorted.begin(), sorted.end());
  std::vector<JudgmentRow> rows;
  for (const auto& item : sorted) {
    for (const auto& u : grid.states()) {
      for (const auto& s : grid.states()) {
        PromptContext ctx{opts.person_name, item, u, s, std::nullopt, std::nullopt};
        rows.push_back({item, u, s, elicit_mean(transport, kind, ctx, opts)});
      }
    }
  }
  return JudgmentTable(table_kind, std::move(rows));
}

SpeakerTable aggregate_speaker_scores(const RawSpeakerScores& raw, const PriceGrid& grid,
                                      const std::vector<Goal>& goals) {
  const auto meanings = meaning_support(grid);
  auto raw_at = [&](const SpeakerKey& key, Price u) {
    auto it = raw.find(key);
    if (it == raw.end()) throw DataError("raw speaker scores lack condition " + to_string(key));
    auto ut = it->second.find(u);
    if (ut == it->second.end()) {
      throw DataError("raw speaker scores for " + to_string(key) + " lack utterance " + to_string(u));
    }
    return ut->second;
  };
  SpeakerTable table;
  for (const auto& g : goals) {
    for (const auto& m : meanings) {
      const auto target = goal_project(g, m);
      std::vector<double> w;
      for (const auto& u : grid.states()) {
        double sum = 0.0;
        for (const auto& other : meanings) {
          if (goal_project(g, other) == target) sum += raw_at(SpeakerKey{other.state, other.affect, g}, u);
        }
        w.push_back(sum);
      }
      const SpeakerKey key{m.state, m.affect, g};
      try {
        table.entries.emplace(key, normalize(w, grid.states()));
      } catch (const NormalizationError&) {
        throw DataError("speaker scores for " + to_string(key) + " are all zero");
      }
    }
  }
  return table;
}

std::map<std::string, SpeakerTable> build_speaker_table(ChatTransport& transport,
                                                        const std::vector<std::string>& items, const PriceGrid& grid,
                                                        const std::vector<Goal>& goals,
                                                        const ElicitationOptions& opts) {
  auto sorted = items;
  std::sort(sorted.begin(), sorted.end());
  std::map<std::string, SpeakerTable> out;
  for (const auto& item : sorted) {
    std::map<std::string, double> by_fingerprint;
    RawSpeakerScores raw;
    for (const auto& g : goals) {
      for (const auto& m : meaning_support(grid)) {
        for (const auto& u : grid.states()) {
          PromptContext ctx{opts.person_name, item, u, m.state, g, m.affect};
          const auto prompt = render_prompt(PromptKind::SpeakerLikelihood, ctx);
          const auto fp = fingerprint({prompt.system, prompt.user, opts.sampling.temperature});
          auto it = by_fingerprint.find(fp);
          if (it == by_fingerprint.end()) {
            it = by_fingerprint.emplace(fp, elicit_mean(transport, PromptKind::SpeakerLikelihood, ctx, opts)).first;
          }
          raw[SpeakerKey{m.state, m.affect, g}][u] = it->second;
        }
      }
    }
    out.emplace(item, aggregate_speaker_scores(raw, grid, goals));
  }
  return out;
}

std::map<std::string, FreeGeneration> free_generate(ChatTransport& transport, const std::vector<std::string>& items,
                                                    PriceState s, const Goal& goal, const ElicitationOptions& opts) {
  auto sorted = items;
  std::sort(sorted.begin(), sorted.end());
  std::map<std::string, FreeGeneration> out;
  for (const auto& item : sorted) {
    PromptContext ctx{opts.person_name, item, std::nullopt, s, goal, std::nullopt};
    const auto prompt = render_prompt(PromptKind::FreeGeneration, ctx);
    const auto samples = transport.sample({prompt.system, prompt.user, opts.sampling.temperature},
                                          opts.sampling.n_samples);
    FreeGeneration gen;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      try {
        gen.prices.push_back(parse_price_completion(samples[i]));
      } catch (const ParseError& e) {
        gen.diagnostics.push_back("sample " + std::to_string(i) + ": " + e.what());
      }
    }
    if (gen.prices.empty()) {
      std::string msg = "no parseable free-generation completion for '" + item + "'";
      for (const auto& d : gen.diagnostics) msg += "\n  " + d;
      throw ElicitationError(msg);
    }
    out.emplace(item, std::move(gen));
  }
  return out;
}

}  // namespace numprag
