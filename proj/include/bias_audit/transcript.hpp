#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bias_audit/backend.hpp"

namespace bias_audit {

/// One recorded backend exchange. Serialized as a JSON Lines object with the
/// keys statement_id, stage, prompt_hash, request_text, response_text,
/// attempt, latency_ms; failed exchanges add "error" (the BackendError kind)
/// and carry the error message in response_text.
struct TranscriptEntry {
  StatementId statement_id = 0;
  Stage stage = Stage::Checker;
  std::string prompt_hash;
  std::string request_text;
  std::string response_text;
  int attempt = 1;
  double latency_ms = 0.0;
  std::optional<std::string> error;

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

/// Thread-safe ordered log of exchanges.
class Transcript {
 public:
  Transcript() = default;
  explicit Transcript(std::vector<TranscriptEntry> entries) : entries_(std::move(entries)) {}

  void append(TranscriptEntry entry);

  /// Entries ordered by statement id; calls for one statement keep their
  /// call order. Independent of how concurrent statements interleaved.
  std::vector<TranscriptEntry> entries() const;

  void save(const std::filesystem::path& path) const;
  /// Throws IoError or ConfigError (with line number) on malformed input.
  static Transcript load(const std::filesystem::path& path);

 private:
  mutable std::mutex mu_;
  std::vector<TranscriptEntry> entries_;
};

/// Forwards to `inner` and logs every exchange, including failures.
class RecordingBackend : public Backend {
 public:
  RecordingBackend(Backend& inner, Transcript& transcript) : inner_(inner), transcript_(transcript) {}

  BackendResponse complete(const BackendRequest& request) override;
  std::string id() const override { return inner_.id(); }

 private:
  Backend& inner_;
  Transcript& transcript_;
};

/// Serves recorded responses. The n-th call for a (statement, stage) key
/// returns the n-th recorded exchange for that key, including its latency
/// and attempt number; recorded failures are rethrown with their kind.
/// Throws MissingTranscript when the key has no remaining exchange.
class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(const Transcript& transcript, std::string name = "replay");

  BackendResponse complete(const BackendRequest& request) override;
  std::string id() const override { return name_; }

 private:
  std::string name_;
  std::map<std::pair<StatementId, Stage>, std::vector<TranscriptEntry>> by_key_;
  std::mutex mu_;
  std::map<std::pair<StatementId, Stage>, std::size_t> cursor_;
};

}  // namespace bias_audit
