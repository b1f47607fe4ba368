#include "numprag/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <memory>
#include <set>

#include "numprag/dataio.hpp"
#include "numprag/elicitation.hpp"
#include "numprag/fitting.hpp"
#include "numprag/metrics.hpp"

namespace numprag {

int exit_code_for(ErrorClass cls) {
  switch (cls) {
    case ErrorClass::Usage: return exit_code::kUsage;
    case ErrorClass::Data: return exit_code::kData;
    case ErrorClass::Inference: return exit_code::kInference;
    case ErrorClass::Elicitation: return exit_code::kElicitation;
    case ErrorClass::Io: return exit_code::kIo;
  }
  return 1;
}

namespace {

struct RunOptions {
  std::string priors;
  std::string speaker_table;
  double lambda = 1.0;
  double cost = 1.0;
  std::string grid = "exp1";
  std::vector<std::string> items;
  std::string goal_prior = "uniform";
  bool with_affect = false;
  std::string out = "-";
};

struct FitOptions {
  std::string priors;
  std::string judgments;
  std::string grid = "exp1";
  std::vector<std::string> items;
  std::string goal_prior = "uniform";
  std::string lambda_range = "0:1:0.01";
  std::string cost_range = "1:4:0.1";
  std::string out = "-";
};

struct MetricsOptions {
  std::string posteriors;
  std::string judgments;
  std::string kind = "interpretation";
  std::string reference;
  std::string grid = "exp1";
  std::string out = "-";
};

struct ElicitOptions {
  std::string what;
  std::string prompt_kind = "hyperbole-halo";
  std::vector<std::string> items;
  std::string grid = "exp1";
  std::string transport = "replay";
  std::string transcripts;
  bool record = false;
  std::string live_config;
  int samples = 10;
  double temperature = 1.0;
  int min_parsed = 0;
  std::string person = "Daniel";
  std::vector<std::string> goals;
  std::int64_t free_state = 0;
  std::string goal = "both-exact";
  std::string out = "-";
};

struct PromptOptions {
  std::string kind;
  std::string person = "Daniel";
  std::string item;
  std::int64_t u = 0;
  std::int64_t s = 0;
  std::string goal;
  int affect = -1;
  std::string out = "-";
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path == "-" || path.empty()) {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

std::map<std::string, PriorSet> select_items(std::map<std::string, PriorSet> priors,
                                             const std::vector<std::string>& items, const PriceGrid& grid) {
  std::map<std::string, PriorSet> out;
  if (items.empty()) {
    for (auto& [name, p] : priors) out.emplace(name, adapt_to_grid(p, grid));
    return out;
  }
  for (const auto& name : items) {
    auto it = priors.find(name);
    if (it == priors.end()) throw DataError("priors have no item '" + name + "'");
    out.emplace(name, adapt_to_grid(it->second, grid));
  }
  return out;
}

CostModel checked_parameters(double lambda, double cost) {
  try {
    check_lambda(lambda);
    return CostModel(cost);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

void cmd_run(const RunOptions& o, std::ostream& out) {
  const CostModel cost = checked_parameters(o.lambda, o.cost);
  const auto grid = PriceGrid::parse(o.grid);
  const auto goal_prior = GoalPrior::parse(o.goal_prior);
  const auto priors = select_items(load_priors(o.priors), o.items, grid);
  std::map<std::string, SpeakerTable> tables;
  if (!o.speaker_table.empty()) tables = load_speaker_tables(o.speaker_table);

  std::vector<ResultRecord> records;
  for (const auto& [item, p] : priors) {
    std::optional<PosteriorMatrix> m;
    if (!o.speaker_table.empty()) {
      auto t = tables.find(item);
      if (t == tables.end()) throw DataError("speaker table has no item '" + item + "'");
      m = posterior_price_matrix_with_table(t->second, p, goal_prior, grid, o.lambda);
    } else {
      m = posterior_price_matrix(p, goal_prior, cost, grid, o.lambda);
    }
    for (const auto& u : m->utterances()) {
      for (const auto& s : m->states()) records.push_back({"posterior", item, to_string(u), to_string(s), m->at(u, s)});
    }
    if (o.with_affect) {
      if (!o.speaker_table.empty()) throw UsageError("--with-affect is only available for the engine speaker");
      for (const auto& [cell, pa] : affect_posterior(p, goal_prior, cost, grid)) {
        records.push_back({"affect_posterior", item, to_string(cell.first), to_string(cell.second), pa});
      }
    }
  }
  emit(serialize_results(std::move(records)), o.out, out);
}

void cmd_fit(const FitOptions& o, std::ostream& out) {
  const auto grid = PriceGrid::parse(o.grid);
  const auto goal_prior = GoalPrior::parse(o.goal_prior);
  const auto priors = select_items(load_priors(o.priors), o.items, grid);
  const auto target = load_judgments(o.judgments, JudgmentKind::InterpretationUS);
  const auto lambdas = GridRange::parse(o.lambda_range);
  const auto costs = GridRange::parse(o.cost_range);
  for (double l : lambdas.points()) {
    for (double c : costs.points()) checked_parameters(l, c);
  }
  const auto fit = fit_grid(priors, goal_prior, grid, target, lambdas, costs);
  std::vector<ResultRecord> records = {
      {"fit", "*", "lambda", "", fit.lambda},
      {"fit", "*", "sharp_cost", "", fit.sharp_cost},
      {"fit", "*", "correlation", "", fit.correlation},
      {"fit", "*", "grid_evaluations", "", static_cast<double>(fit.grid_evaluations)},
  };
  emit(serialize_results(std::move(records)), o.out, out);
}

std::map<std::string, PosteriorMatrix> matrices_from_table(const JudgmentTable& table, const PriceGrid& grid) {
  std::map<std::string, PosteriorMatrix> out;
  const auto n = static_cast<Eigen::Index>(grid.states().size());
  for (const auto& item : table.items()) {
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index u = 0; u < n; ++u) {
      for (Eigen::Index s = 0; s < n; ++s) {
        JudgmentKey key{item, grid.states()[static_cast<std::size_t>(u)], grid.states()[static_cast<std::size_t>(s)]};
        auto v = table.find(key);
        if (!v) throw DataError("interpretation table lacks cell " + to_string(key) + " of grid " + grid.spec());
        m(u, s) = *v;
      }
    }
    out.emplace(item, PosteriorMatrix(grid.states(), grid.states(), std::move(m)));
  }
  return out;
}

void interpretation_metrics(const JudgmentTable& table, const PriceGrid& grid, std::vector<ResultRecord>& records) {
  for (const auto& [item, m] : matrices_from_table(table, grid)) {
    for (const auto& u : grid.states()) {
      const auto row = m.row(u);
      records.push_back({"hyperbole", item, to_string(u), "", hyperbole_prob(row, u)});
      records.push_back({"halo", item, to_string(u), "", halo_bias(row, u, grid)});
    }
    for (const auto& [mag, v] : hyperbole_profile(m, grid)) {
      records.push_back({"hyperbole_profile", item, std::to_string(mag), "", v});
    }
    const auto halo = halo_summary(m, grid);
    records.push_back({"halo_summary", item, "round", "", halo.round_mean});
    records.push_back({"halo_summary", item, "sharp", "", halo.sharp_mean});
  }
}

void affect_metrics(const JudgmentTable& table, const PriceGrid& grid, std::vector<ResultRecord>& records) {
  for (const auto& [item, c] : affect_comparison_by_item(table, grid)) {
    records.push_back({"affect_comparison", item, "hyperbolic", "", c.hyperbolic_mean});
    records.push_back({"affect_comparison", item, "literal", "", c.literal_mean});
  }
}

JudgmentTable table_from_results(const std::vector<ResultRecord>& results, const std::string& record_kind,
                                 JudgmentKind kind) {
  std::vector<JudgmentRow> rows;
  for (const auto& r : results) {
    if (r.record_kind != record_kind) continue;
    try {
      rows.push_back({r.item, Price(std::stoll(r.key1)), Price(std::stoll(r.key2)), r.value});
    } catch (const std::logic_error&) {
      throw DataError("results row " + r.record_kind + "," + r.item + "," + r.key1 + "," + r.key2 +
                      " has non-integer prices");
    }
  }
  return JudgmentTable(kind, std::move(rows));
}

void cmd_metrics(const MetricsOptions& o, std::ostream& out) {
  const auto grid = PriceGrid::parse(o.grid);
  if (o.posteriors.empty() == o.judgments.empty()) {
    throw UsageError("metrics needs exactly one of --posteriors or --judgments");
  }
  std::vector<ResultRecord> records;
  std::optional<JudgmentTable> primary;
  if (!o.posteriors.empty()) {
    const auto results = load_results(o.posteriors);
    auto interp = table_from_results(results, "posterior", JudgmentKind::InterpretationUS);
    if (interp.rows().empty()) throw DataError("'" + o.posteriors + "' has no posterior rows");
    interpretation_metrics(interp, grid, records);
    auto aff = table_from_results(results, "affect_posterior", JudgmentKind::AffectUS);
    if (!aff.rows().empty()) affect_metrics(aff, grid, records);
    primary = std::move(interp);
  } else {
    const auto kind = parse_judgment_kind(o.kind);
    auto table = load_judgments(o.judgments, kind);
    if (kind == JudgmentKind::InterpretationUS) {
      interpretation_metrics(table, grid, records);
    } else if (kind == JudgmentKind::AffectUS) {
      affect_metrics(table, grid, records);
    } else if (o.reference.empty()) {
      throw UsageError("prior tables only support --reference correlation");
    }
    primary = std::move(table);
  }
  if (!o.reference.empty()) {
    const auto ref = load_judgments(o.reference, primary->kind());
    records.push_back({"correlation", "*", to_string(primary->kind()), "", correlate_tables(*primary, ref)});
  }
  emit(serialize_results(std::move(records)), o.out, out);
}

std::unique_ptr<ChatTransport> make_transport(const ElicitOptions& o, std::unique_ptr<ChatTransport>& live_holder) {
  if (o.transport == "replay") {
    if (o.transcripts.empty()) throw UsageError("replay transport needs --transcripts <dir>");
    return std::make_unique<ReplayTransport>(o.transcripts);
  }
  if (o.transport == "live") {
    std::optional<std::filesystem::path> cfg;
    if (!o.live_config.empty()) cfg = o.live_config;
    live_holder = std::make_unique<HttpChatTransport>(LiveConfig::load(cfg));
    if (o.record) {
      if (o.transcripts.empty()) throw UsageError("--record needs --transcripts <dir>");
      return std::make_unique<RecordingTransport>(*live_holder, o.transcripts);
    }
    return std::move(live_holder);
  }
  throw UsageError("--transport must be live or replay");
}

void cmd_elicit(const ElicitOptions& o, std::ostream& out) {
  const auto grid = PriceGrid::parse(o.grid);
  if (o.items.empty()) throw UsageError("elicit needs --items");
  ElicitationOptions opts;
  try {
    opts.sampling = SamplingConfig(o.temperature, o.samples);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  opts.person_name = o.person;
  if (o.min_parsed > 0) opts.min_parsed = o.min_parsed;

  std::unique_ptr<ChatTransport> live;
  auto transport = make_transport(o, live);

  if (o.what == "priors") {
    emit(serialize_priors(build_priors(*transport, o.items, grid, opts)), o.out, out);
  } else if (o.what == "interpretation") {
    const auto kind = parse_prompt_kind(o.prompt_kind);
    emit(serialize_judgments(build_judgments(*transport, kind, o.items, grid, opts)), o.out, out);
  } else if (o.what == "affect") {
    emit(serialize_judgments(build_judgments(*transport, PromptKind::AffectSubtext, o.items, grid, opts)), o.out, out);
  } else if (o.what == "speaker") {
    std::vector<Goal> goals;
    for (const auto& g : o.goals) goals.push_back(Goal::parse(g));
    if (goals.empty()) goals = canonical_goals();
    std::sort(goals.begin(), goals.end());
    goals.erase(std::unique(goals.begin(), goals.end()), goals.end());
    emit(serialize_speaker_tables(build_speaker_table(*transport, o.items, grid, goals, opts)), o.out, out);
  } else if (o.what == "free") {
    if (o.free_state <= 0) throw UsageError("free generation needs --state <price>");
    std::vector<ResultRecord> records;
    for (const auto& [item, gen] : free_generate(*transport, o.items, Price(o.free_state), Goal::parse(o.goal), opts)) {
      for (std::size_t i = 0; i < gen.prices.size(); ++i) {
        records.push_back({"free_generation", item, std::to_string(i), "", static_cast<double>(gen.prices[i])});
      }
    }
    emit(serialize_results(std::move(records)), o.out, out);
  } else {
    throw UsageError("--what must be priors, interpretation, affect, speaker or free");
  }
}

void cmd_prompts(const PromptOptions& o, std::ostream& out) {
  PromptContext ctx;
  ctx.person_name = o.person;
  ctx.item_name = o.item;
  if (o.u > 0) ctx.u = Price(o.u);
  if (o.s > 0) ctx.s = Price(o.s);
  if (!o.goal.empty()) ctx.goal = Goal::parse(o.goal);
  if (o.affect >= 0) ctx.affect = o.affect == 1;

  std::vector<PromptKind> kinds;
  if (o.kind == "all") {
    kinds = all_prompt_kinds();
  } else {
    kinds.push_back(parse_prompt_kind(o.kind));
  }
  std::string text;
  for (auto k : kinds) {
    const auto p = render_prompt(k, ctx);
    text += "### " + to_string(k) + "\n[system]\n" + p.system + "\n[user]\n" + p.user + "\n";
  }
  emit(text, o.out, out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rational Speech Act models of hyperbole and pragmatic halo: inference, fitting, metrics, elicitation"};
  app.name("numprag");
  app.set_config("--config", "", "INI/TOML file supplying any flag; command-line flags win");
  app.require_subcommand(1, 1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Per-utterance price posteriors for each item");
  run_cmd->add_option("--priors", run.priors, "Priors JSON")->required();
  run_cmd->add_option("--speaker-table", run.speaker_table, "Elicited speaker-table JSON (full LM-RSA)");
  run_cmd->add_option("--lambda", run.lambda, "Calibration exponent in [0, 1]");
  run_cmd->add_option("--cost", run.cost, "Cost of sharp utterances (>= 1)");
  run_cmd->add_option("--grid", run.grid, "exp1 | exp3 | custom:<magnitudes>:<offsets>");
  run_cmd->add_option("--items", run.items, "Comma-separated item subset")->delimiter(',');
  run_cmd->add_option("--goal-prior", run.goal_prior, "uniform or goal=weight,...");
  run_cmd->add_flag("--with-affect", run.with_affect, "Also emit P(affect | u, s)");
  run_cmd->add_option("--out", run.out, "Output path, - for stdout");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Grid-search calibration exponent and sharp cost");
  fit_cmd->add_option("--priors", fit.priors, "Priors JSON")->required();
  fit_cmd->add_option("--judgments", fit.judgments, "Target interpretation CSV")->required();
  fit_cmd->add_option("--grid", fit.grid, "exp1 | exp3 | custom:<magnitudes>:<offsets>");
  fit_cmd->add_option("--items", fit.items, "Comma-separated item subset")->delimiter(',');
  fit_cmd->add_option("--goal-prior", fit.goal_prior, "uniform or goal=weight,...");
  fit_cmd->add_option("--lambda-range", fit.lambda_range, "<start>:<stop>:<step>");
  fit_cmd->add_option("--cost-range", fit.cost_range, "<start>:<stop>:<step>");
  fit_cmd->add_option("--out", fit.out, "Output path, - for stdout");

  MetricsOptions metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Hyperbole, halo and affect summaries");
  metrics_cmd->add_option("--posteriors", metrics.posteriors, "Results CSV written by run");
  metrics_cmd->add_option("--judgments", metrics.judgments, "Judgment CSV");
  metrics_cmd->add_option("--kind", metrics.kind, "interpretation | affect | price-prior | affect-prior");
  metrics_cmd->add_option("--reference", metrics.reference, "Judgment CSV to correlate against");
  metrics_cmd->add_option("--grid", metrics.grid, "exp1 | exp3 | custom:<magnitudes>:<offsets>");
  metrics_cmd->add_option("--out", metrics.out, "Output path, - for stdout");

  ElicitOptions elicit;
  auto* elicit_cmd = app.add_subcommand("elicit", "Query a language model and aggregate its ratings");
  elicit_cmd->add_option("--what", elicit.what, "priors | interpretation | affect | speaker | free")->required();
  elicit_cmd->add_option("--prompt-kind", elicit.prompt_kind, "Interpretation prompt: hyperbole-halo or cot-*");
  elicit_cmd->add_option("--items", elicit.items, "Comma-separated items")->delimiter(',');
  elicit_cmd->add_option("--grid", elicit.grid, "exp1 | exp3 | custom:<magnitudes>:<offsets>");
  elicit_cmd->add_option("--transport", elicit.transport, "live | replay");
  elicit_cmd->add_option("--transcripts", elicit.transcripts, "Transcript directory");
  elicit_cmd->add_flag("--record", elicit.record, "Store live completions as transcripts");
  elicit_cmd->add_option("--live-config", elicit.live_config, "Live transport JSON config");
  elicit_cmd->add_option("--samples", elicit.samples, "Samples per prompt");
  elicit_cmd->add_option("--temperature", elicit.temperature, "Sampling temperature");
  elicit_cmd->add_option("--min-parsed", elicit.min_parsed, "Minimum parseable samples (default ceil(n/2))");
  elicit_cmd->add_option("--person", elicit.person, "Name used in the scenarios");
  elicit_cmd->add_option("--goals", elicit.goals, "Speaker goals (default all)")->delimiter(',');
  elicit_cmd->add_option("--state", elicit.free_state, "True price for free generation");
  elicit_cmd->add_option("--goal", elicit.goal, "Goal for free generation");
  elicit_cmd->add_option("--out", elicit.out, "Output path, - for stdout");

  PromptOptions prompts;
  auto* prompts_cmd = app.add_subcommand("prompts", "Render prompt templates");
  prompts_cmd->add_option("--kind", prompts.kind, "Prompt kind or 'all'")->required();
  prompts_cmd->add_option("--person", prompts.person, "Person name");
  prompts_cmd->add_option("--item", prompts.item, "Item name");
  prompts_cmd->add_option("--u", prompts.u, "Uttered price");
  prompts_cmd->add_option("--s", prompts.s, "True price");
  prompts_cmd->add_option("--goal", prompts.goal, "Speaker goal");
  prompts_cmd->add_option("--affect", prompts.affect, "Speaker affect, 0 or 1")->check(CLI::Range(0, 1));
  prompts_cmd->add_option("--out", prompts.out, "Output path, - for stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_code::kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_code::kUsage;
  }

  try {
    if (run_cmd->parsed()) cmd_run(run, out);
    if (fit_cmd->parsed()) cmd_fit(fit, out);
    if (metrics_cmd->parsed()) cmd_metrics(metrics, out);
    if (elicit_cmd->parsed()) cmd_elicit(elicit, out);
    if (prompts_cmd->parsed()) cmd_prompts(prompts, out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.error_class());
  } catch (const std::filesystem::filesystem_error& e) {
    err << e.what() << "\n";
    return exit_code::kIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return exit_code::kOk;
}

}  // namespace numprag
