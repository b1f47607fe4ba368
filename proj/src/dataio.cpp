#include "numprag/dataio.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace numprag {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out.flush()) throw IoError("failed writing '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move output into '" + path.string() + "': " + ec.message());
}

namespace {

// Stored weights that already sum to one are kept as written, so rewriting a file is a fixed point.
template <typename Outcome>
Dist<Outcome> normalize_stored(const std::vector<double>& w, std::vector<Outcome> support) {
  double total = 0.0;
  for (double x : w) total += x;
  if (std::abs(total - 1.0) <= 1e-12 && std::all_of(w.begin(), w.end(), [](double x) { return x >= 0.0; })) {
    return Dist<Outcome>(std::move(support), Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())));
  }
  return normalize(w, std::move(support));
}

json parse_document(const std::string& text, const char* what) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed ") + what + " document: " + e.what());
  }
  if (!doc.is_object()) throw DataError(std::string(what) + " document must be a JSON object");
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    throw DataError(std::string(what) + " document lacks an integer schema_version");
  }
  if (doc["schema_version"].get<int>() != kSchemaVersion) {
    throw DataError(std::string("unsupported ") + what + " schema_version " + doc["schema_version"].dump());
  }
  return doc;
}

const json& field(const json& obj, const char* name, const std::string& where) {
  if (!obj.is_object() || !obj.contains(name)) throw DataError(where + " lacks field '" + name + "'");
  return obj[name];
}

std::int64_t price_field(const json& obj, const char* name, const std::string& where) {
  const auto& v = field(obj, name, where);
  if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
    throw DataError(where + " field '" + name + "' must be a positive integer");
  }
  return v.get<std::int64_t>();
}

double number_field(const json& obj, const char* name, const std::string& where) {
  const auto& v = field(obj, name, where);
  if (!v.is_number()) throw DataError(where + " field '" + name + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw DataError(where + " field '" + name + "' is not finite");
  return d;
}

std::string string_field(const json& obj, const char* name, const std::string& where) {
  const auto& v = field(obj, name, where);
  if (!v.is_string() || v.get<std::string>().empty()) {
    throw DataError(where + " field '" + name + "' must be a non-empty string");
  }
  return v.get<std::string>();
}

const json& array_field(const json& obj, const char* name, const std::string& where) {
  const auto& v = field(obj, name, where);
  if (!v.is_array()) throw DataError(where + " field '" + name + "' must be an array");
  return v;
}

std::int64_t parse_int(const std::string& s, const std::string& where) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw DataError(where + ": bad integer '" + s + "'");
  return v;
}

double parse_real(const std::string& s, const std::string& where) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw DataError(where + ": bad number '" + s + "'");
  }
  return v;
}

std::optional<std::int64_t> as_int(const std::string& s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool key_less(const std::string& a, const std::string& b) {
  auto ia = as_int(a), ib = as_int(b);
  if (ia && ib) return *ia < *ib;
  if (ia != ib && (ia || ib)) return ia.has_value();  // integers before text
  return a < b;
}

}  // namespace

std::map<std::string, PriorSet> parse_priors(const std::string& json_text) {
  const auto doc = parse_document(json_text, "priors");
  std::map<std::string, PriorSet> out;
  const auto& items = array_field(doc, "items", "priors document");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto where = "priors item #" + std::to_string(i);
    const auto& it = items[i];
    const auto name = string_field(it, "item_name", where);
    if (out.count(name)) throw DataError("duplicate priors item '" + name + "'");

    std::map<Price, double> weights;
    for (const auto& rec : array_field(it, "price_prior", where)) {
      const Price s(price_field(rec, "state", where + " price_prior"));
      const double p = number_field(rec, "p", where + " price_prior");
      if (p < 0.0) throw DataError(where + " price weight for state " + to_string(s) + " is negative");
      if (!weights.emplace(s, p).second) throw DataError(where + " duplicate price state " + to_string(s));
    }
    std::map<Price, double> affect;
    for (const auto& rec : array_field(it, "affect_prior", where)) {
      const Price s(price_field(rec, "state", where + " affect_prior"));
      const double p = number_field(rec, "p_affect", where + " affect_prior");
      if (p < 0.0 || p > 1.0) throw DataError(where + " affect probability for state " + to_string(s) + " outside [0, 1]");
      if (!affect.emplace(s, p).second) throw DataError(where + " duplicate affect state " + to_string(s));
    }
    if (weights.empty()) throw DataError(where + " has an empty price prior");
    std::vector<Price> support;
    std::vector<double> w;
    for (const auto& [s, p] : weights) {
      support.push_back(s);
      w.push_back(p);
    }
    try {
      out.emplace(name, PriorSet{name, normalize_stored(w, support), std::move(affect)});
    } catch (const NormalizationError&) {
      throw DataError(where + " price weights are all zero");
    }
  }
  return out;
}

std::map<std::string, PriorSet> load_priors(const std::filesystem::path& path) {
  return parse_priors(read_text_file(path));
}

std::string serialize_priors(const std::map<std::string, PriorSet>& priors) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["items"] = ordered_json::array();
  for (const auto& [name, p] : priors) {
    ordered_json item;
    item["item_name"] = name;
    item["price_prior"] = ordered_json::array();
    for (std::size_t i = 0; i < p.price_prior.size(); ++i) {
      item["price_prior"].push_back(
          {{"state", p.price_prior.support()[i].value}, {"p", p.price_prior.probs()(static_cast<Eigen::Index>(i))}});
    }
    item["affect_prior"] = ordered_json::array();
    for (const auto& [s, pa] : p.affect_given_price) {
      item["affect_prior"].push_back({{"state", s.value}, {"p_affect", pa}});
    }
    doc["items"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

void write_priors(const std::map<std::string, PriorSet>& priors, const std::filesystem::path& path) {
  write_text_file(path, serialize_priors(priors));
}

std::map<std::string, SpeakerTable> parse_speaker_tables(const std::string& json_text) {
  const auto doc = parse_document(json_text, "speaker table");
  using GroupKey = std::pair<std::string, SpeakerKey>;
  std::map<GroupKey, std::map<Price, double>> groups;
  const auto& rows = array_field(doc, "rows", "speaker table document");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto where = "speaker table row #" + std::to_string(i);
    const auto& r = rows[i];
    const auto item = string_field(r, "item", where);
    const Price s(price_field(r, "s", where));
    const auto& a = field(r, "a", where);
    if (!a.is_number_integer() || (a.get<int>() != 0 && a.get<int>() != 1)) {
      throw DataError(where + " field 'a' must be 0 or 1");
    }
    Goal g = [&] {
      try {
        return Goal::parse(string_field(r, "goal", where));
      } catch (const DataError& e) {
        throw DataError(where + ": " + e.what());
      }
    }();
    const Price u(price_field(r, "u", where));
    const double p = number_field(r, "p", where);
    if (p < 0.0) throw DataError(where + " has a negative probability");
    SpeakerKey key{s, a.get<int>() == 1, g};
    if (!groups[{item, key}].emplace(u, p).second) {
      throw DataError(where + " duplicates utterance " + to_string(u) + " for " + to_string(key));
    }
  }
  std::map<std::string, SpeakerTable> out;
  for (auto& [gk, dist] : groups) {
    std::vector<Price> support;
    std::vector<double> w;
    for (const auto& [u, p] : dist) {
      support.push_back(u);
      w.push_back(p);
    }
    try {
      out[gk.first].entries.emplace(gk.second, normalize_stored(w, support));
    } catch (const NormalizationError&) {
      throw DataError("speaker table entry " + to_string(gk.second) + " for '" + gk.first + "' has no mass");
    }
  }
  return out;
}

std::map<std::string, SpeakerTable> load_speaker_tables(const std::filesystem::path& path) {
  return parse_speaker_tables(read_text_file(path));
}

std::string serialize_speaker_tables(const std::map<std::string, SpeakerTable>& tables) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["rows"] = ordered_json::array();
  for (const auto& [item, table] : tables) {
    for (const auto& [key, dist] : table.entries) {
      for (std::size_t i = 0; i < dist.size(); ++i) {
        ordered_json row;
        row["item"] = item;
        row["s"] = key.state.value;
        row["a"] = key.affect ? 1 : 0;
        row["goal"] = key.goal.name();
        row["u"] = dist.support()[i].value;
        row["p"] = dist.probs()(static_cast<Eigen::Index>(i));
        doc["rows"].push_back(std::move(row));
      }
    }
  }
  return doc.dump(2) + "\n";
}

void write_speaker_tables(const std::map<std::string, SpeakerTable>& tables, const std::filesystem::path& path) {
  write_text_file(path, serialize_speaker_tables(tables));
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, cell_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"' && cell.empty()) {
      quoted = true;
      cell_started = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      cell_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (cell_started || !cell.empty() || !row.empty()) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
      }
      row.clear();
      cell.clear();
      cell_started = false;
    } else {
      cell += c;
      cell_started = true;
    }
  }
  if (quoted) throw DataError("unterminated quoted CSV field");
  if (cell_started || !cell.empty() || !row.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

void check_header(const std::vector<std::vector<std::string>>& rows, const std::vector<std::string>& header,
                  const char* what) {
  std::string expected;
  for (std::size_t i = 0; i < header.size(); ++i) expected += (i ? "," : "") + header[i];
  if (rows.empty() || rows.front() != header) throw DataError(std::string(what) + " CSV must start with header '" + expected + "'");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != header.size()) {
      throw DataError(std::string(what) + " CSV line " + std::to_string(i + 1) + " has " +
                      std::to_string(rows[i].size()) + " fields, expected " + std::to_string(header.size()));
    }
  }
}

}  // namespace

JudgmentTable parse_judgments(const std::string& csv_text, JudgmentKind kind) {
  const auto rows = parse_csv(csv_text);
  check_header(rows, {"item", "u", "s", "rating"}, "judgment");
  std::vector<JudgmentRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto where = "judgment CSV line " + std::to_string(i + 1);
    const auto& r = rows[i];
    JudgmentRow row;
    row.item = r[0];
    row.u = Price(parse_int(r[1], where));
    if (!r[2].empty()) row.s = Price(parse_int(r[2], where));
    row.rating = parse_real(r[3], where);
    out.push_back(std::move(row));
  }
  return JudgmentTable(kind, std::move(out));
}

JudgmentTable load_judgments(const std::filesystem::path& path, JudgmentKind kind) {
  return parse_judgments(read_text_file(path), kind);
}

std::string serialize_judgments(const JudgmentTable& table) {
  std::string out = "item,u,s,rating\n";
  for (const auto& r : table.rows()) {
    out += csv_escape(r.item) + "," + to_string(r.u) + "," + (r.s ? to_string(*r.s) : std::string()) + "," +
           format_double(r.rating) + "\n";
  }
  return out;
}

void write_judgments(const JudgmentTable& table, const std::filesystem::path& path) {
  write_text_file(path, serialize_judgments(table));
}

void sort_results(std::vector<ResultRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const ResultRecord& a, const ResultRecord& b) {
    if (a.record_kind != b.record_kind) return a.record_kind < b.record_kind;
    if (a.item != b.item) return a.item < b.item;
    if (a.key1 != b.key1) return key_less(a.key1, b.key1);
    return key_less(a.key2, b.key2);
  });
}

std::string serialize_results(std::vector<ResultRecord> records) {
  sort_results(records);
  std::string out = "record_kind,item,key1,key2,value\n";
  for (const auto& r : records) {
    out += csv_escape(r.record_kind) + "," + csv_escape(r.item) + "," + csv_escape(r.key1) + "," +
           csv_escape(r.key2) + "," + format_double(r.value) + "\n";
  }
  return out;
}

void write_results(std::vector<ResultRecord> records, const std::filesystem::path& path) {
  write_text_file(path, serialize_results(std::move(records)));
}

std::vector<ResultRecord> parse_results(const std::string& csv_text) {
  const auto rows = parse_csv(csv_text);
  check_header(rows, {"record_kind", "item", "key1", "key2", "value"}, "results");
  std::vector<ResultRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out.push_back({r[0], r[1], r[2], r[3], parse_real(r[4], "results CSV line " + std::to_string(i + 1))});
  }
  return out;
}

std::vector<ResultRecord> load_results(const std::filesystem::path& path) { return parse_results(read_text_file(path)); }

}  // namespace numprag
