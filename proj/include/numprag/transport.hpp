#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace numprag {

struct ChatRequest {
  std::string system;
  std::string user;
  double temperature = 1.0;
};

/// Hex SHA-256 over the system text, user text and temperature (as %.17g),
/// separated by 0x1f. Stable across platforms and runs.
std::string fingerprint(const ChatRequest& request);

/// Request/response contract: raw completions for one prompt.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::vector<std::string> sample(const ChatRequest& request, int n) = 0;
};

struct Transcript {
  std::string fingerprint;
  std::string system;
  std::string user;
  double temperature = 1.0;
  std::vector<std::string> samples;

  bool operator==(const Transcript&) const = default;
};

std::string serialize_transcript(const Transcript& t);
Transcript parse_transcript(const std::string& json_text);

/// Directory of transcript documents, one file per fingerprint named
/// "<fingerprint>.json". Writes are serialized.
class TranscriptStore {
 public:
  explicit TranscriptStore(std::filesystem::path dir);

  std::optional<Transcript> load(const std::string& fingerprint) const;
  void save(const Transcript& t);
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

/// Serves recorded completions. A missing transcript, or one with fewer than
/// `n` samples, is an ElicitationError.
class ReplayTransport : public ChatTransport {
 public:
  explicit ReplayTransport(std::filesystem::path dir) : store_(std::move(dir)) {}
  std::vector<std::string> sample(const ChatRequest& request, int n) override;

 private:
  TranscriptStore store_;
};

/// Forwards to another transport and stores every response as a transcript.
class RecordingTransport : public ChatTransport {
 public:
  RecordingTransport(ChatTransport& inner, std::filesystem::path dir) : inner_(inner), store_(std::move(dir)) {}
  std::vector<std::string> sample(const ChatRequest& request, int n) override;

 private:
  ChatTransport& inner_;
  TranscriptStore store_;
};

struct LiveConfig {
  std::string endpoint;  ///< full URL of a chat-completions style endpoint
  std::string model;
  std::string token_env = "OPENAI_API_KEY";  ///< variable holding the bearer token
  double timeout_seconds = 60.0;
  int retries = 2;

  /// JSON {"endpoint", "model", "token_env", "timeout_seconds", "retries"};
  /// NUMPRAG_ENDPOINT and NUMPRAG_MODEL override the file.
  static LiveConfig load(const std::optional<std::filesystem::path>& path);
};

/// POSTs {"model", "messages": [system, user], "temperature"} and reads
/// choices[0].message.content; one request per sample.
class HttpChatTransport : public ChatTransport {
 public:
  explicit HttpChatTransport(LiveConfig config);
  std::vector<std::string> sample(const ChatRequest& request, int n) override;

 private:
  std::string complete(const ChatRequest& request);

  LiveConfig config_;
  std::string base_;
  std::string path_;
};

}  // namespace numprag
