#include "numprag/transport.hpp"

// Eigen-based headers must precede httplib: <resolv.h> defines a `_res` macro.
#include "numprag/dataio.hpp"
#include "numprag/errors.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <cstdlib>

namespace numprag {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string fingerprint(const ChatRequest& request) {
  const std::string payload = request.system + '\x1f' + request.user + '\x1f' + format_double(request.temperature);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(payload.data(), payload.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw ElicitationError("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string serialize_transcript(const Transcript& t) {
  ordered_json doc;
  doc["fingerprint"] = t.fingerprint;
  doc["system"] = t.system;
  doc["user"] = t.user;
  doc["temperature"] = t.temperature;
  doc["samples"] = t.samples;
  return doc.dump(2) + "\n";
}

Transcript parse_transcript(const std::string& json_text) {
  try {
    const auto doc = json::parse(json_text);
    Transcript t;
    t.fingerprint = doc.at("fingerprint").get<std::string>();
    t.system = doc.at("system").get<std::string>();
    t.user = doc.at("user").get<std::string>();
    t.temperature = doc.at("temperature").get<double>();
    t.samples = doc.at("samples").get<std::vector<std::string>>();
    return t;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed transcript: ") + e.what());
  }
}

TranscriptStore::TranscriptStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::optional<Transcript> TranscriptStore::load(const std::string& fp) const {
  std::lock_guard lock(mutex_);
  const auto path = dir_ / (fp + ".json");
  if (!std::filesystem::exists(path)) return std::nullopt;
  auto t = parse_transcript(read_text_file(path));
  if (t.fingerprint != fp) throw DataError("transcript " + path.string() + " carries fingerprint " + t.fingerprint);
  return t;
}

void TranscriptStore::save(const Transcript& t) {
  std::lock_guard lock(mutex_);
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create transcript directory '" + dir_.string() + "': " + ec.message());
  write_text_file(dir_ / (t.fingerprint + ".json"), serialize_transcript(t));
}

std::vector<std::string> ReplayTransport::sample(const ChatRequest& request, int n) {
  const auto fp = fingerprint(request);
  auto t = store_.load(fp);
  if (!t) throw ElicitationError("no transcript for fingerprint " + fp + " in " + store_.dir().string());
  if (static_cast<int>(t->samples.size()) < n) {
    throw ElicitationError("transcript " + fp + " has " + std::to_string(t->samples.size()) + " samples, " +
                           std::to_string(n) + " requested");
  }
  t->samples.resize(static_cast<std::size_t>(n));
  return t->samples;
}

std::vector<std::string> RecordingTransport::sample(const ChatRequest& request, int n) {
  auto samples = inner_.sample(request, n);
  store_.save(Transcript{fingerprint(request), request.system, request.user, request.temperature, samples});
  return samples;
}

LiveConfig LiveConfig::load(const std::optional<std::filesystem::path>& path) {
  LiveConfig c;
  if (path) {
    try {
      const auto doc = json::parse(read_text_file(*path));
      c.endpoint = doc.value("endpoint", c.endpoint);
      c.model = doc.value("model", c.model);
      c.token_env = doc.value("token_env", c.token_env);
      c.timeout_seconds = doc.value("timeout_seconds", c.timeout_seconds);
      c.retries = doc.value("retries", c.retries);
    } catch (const json::exception& e) {
      throw DataError("malformed live transport config: " + std::string(e.what()));
    }
  }
  if (const char* e = std::getenv("NUMPRAG_ENDPOINT")) c.endpoint = e;
  if (const char* m = std::getenv("NUMPRAG_MODEL")) c.model = m;
  if (c.endpoint.empty()) throw UsageError("live transport needs an endpoint URL");
  if (c.model.empty()) throw UsageError("live transport needs a model identifier");
  if (c.retries < 0) throw UsageError("live transport retries must be >= 0");
  return c;
}

HttpChatTransport::HttpChatTransport(LiveConfig config) : config_(std::move(config)) {
  const auto scheme_end = config_.endpoint.find("://");
  if (scheme_end == std::string::npos) throw UsageError("endpoint must be an http(s) URL: " + config_.endpoint);
  const auto path_start = config_.endpoint.find('/', scheme_end + 3);
  base_ = config_.endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
}

std::string HttpChatTransport::complete(const ChatRequest& request) {
  httplib::Client client(base_);
  const auto secs = static_cast<time_t>(config_.timeout_seconds);
  const auto usecs = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);

  httplib::Headers headers;
  if (const char* token = std::getenv(config_.token_env.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  json body = {{"model", config_.model},
               {"temperature", request.temperature},
               {"messages", json::array({{{"role", "system"}, {"content", request.system}},
                                         {{"role", "user"}, {"content", request.user}}})}};
  const auto payload = body.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
      if (res->status >= 400 && res->status < 500 && res->status != 429) break;
      continue;
    }
    try {
      const auto doc = json::parse(res->body);
      return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      last_error = std::string("unexpected response body: ") + e.what();
    }
  }
  throw ElicitationError("live transport " + config_.endpoint + ": " + last_error);
}

std::vector<std::string> HttpChatTransport::sample(const ChatRequest& request, int n) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(complete(request));
  return out;
}

}  // namespace numprag
