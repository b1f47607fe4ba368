#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "numprag/engine.hpp"
#include "numprag/judgments.hpp"

namespace numprag {

inline constexpr int kSchemaVersion = 1;

/// "%.17g": enough digits for every double to round-trip.
std::string format_double(double v);

// Priors document:
//   {"schema_version": 1,
//    "items": [{"item_name": "...",
//               "price_prior": [{"state": 50, "p": 0.2}, ...],
//               "affect_prior": [{"state": 50, "p_affect": 0.1}, ...]}]}
// Price weights must be non-negative and are renormalized per item.
std::map<std::string, PriorSet> parse_priors(const std::string& json_text);
std::map<std::string, PriorSet> load_priors(const std::filesystem::path& path);
std::string serialize_priors(const std::map<std::string, PriorSet>& priors);
void write_priors(const std::map<std::string, PriorSet>& priors, const std::filesystem::path& path);

// Speaker-table document:
//   {"schema_version": 1,
//    "rows": [{"item": "...", "s": 50, "a": 1, "goal": "both-exact", "u": 51, "p": 0.3}, ...]}
// Probabilities are renormalized over u per (item, s, a, goal).
std::map<std::string, SpeakerTable> parse_speaker_tables(const std::string& json_text);
std::map<std::string, SpeakerTable> load_speaker_tables(const std::filesystem::path& path);
std::string serialize_speaker_tables(const std::map<std::string, SpeakerTable>& tables);
void write_speaker_tables(const std::map<std::string, SpeakerTable>& tables, const std::filesystem::path& path);

// Judgment CSV, header "item,u,s,rating"; s is blank for prior kinds.
JudgmentTable parse_judgments(const std::string& csv_text, JudgmentKind kind);
JudgmentTable load_judgments(const std::filesystem::path& path, JudgmentKind kind);
std::string serialize_judgments(const JudgmentTable& table);
void write_judgments(const JudgmentTable& table, const std::filesystem::path& path);

struct ResultRecord {
  std::string record_kind;
  std::string item;
  std::string key1;
  std::string key2;
  double value = 0.0;

  bool operator==(const ResultRecord&) const = default;
};

/// Sorts by record_kind, item, key1, key2; keys that are integers compare numerically.
void sort_results(std::vector<ResultRecord>& records);

// Results CSV, header "record_kind,item,key1,key2,value".
std::string serialize_results(std::vector<ResultRecord> records);
void write_results(std::vector<ResultRecord> records, const std::filesystem::path& path);
std::vector<ResultRecord> parse_results(const std::string& csv_text);
std::vector<ResultRecord> load_results(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and rename.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Minimal RFC 4180 reader/writer used by the CSV formats above.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string csv_escape(const std::string& field);

}  // namespace numprag
