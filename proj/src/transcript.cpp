#include "bias_audit/transcript.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace bias_audit {

using ojson = nlohmann::ordered_json;

void Transcript::append(TranscriptEntry entry) {
  std::lock_guard lock(mu_);
  entries_.push_back(std::move(entry));
}

std::vector<TranscriptEntry> Transcript::entries() const {
  std::vector<TranscriptEntry> out;
  {
    std::lock_guard lock(mu_);
    out = entries_;
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.statement_id < b.statement_id;
  });
  return out;
}

void Transcript::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write transcript " + path.string());
  for (const auto& e : entries()) {
    ojson j;
    j["statement_id"] = e.statement_id;
    j["stage"] = to_string(e.stage);
    j["prompt_hash"] = e.prompt_hash;
    j["request_text"] = e.request_text;
    j["response_text"] = e.response_text;
    j["attempt"] = e.attempt;
    j["latency_ms"] = e.latency_ms;
    if (e.error) j["error"] = *e.error;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Transcript Transcript::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open transcript " + path.string());
  std::vector<TranscriptEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TranscriptEntry e;
      e.statement_id = j.at("statement_id").get<StatementId>();
      const auto stage = parse_stage(j.at("stage").get<std::string>());
      if (!stage) throw ConfigError("unknown stage");
      e.stage = *stage;
      e.prompt_hash = j.at("prompt_hash").get<std::string>();
      e.request_text = j.at("request_text").get<std::string>();
      e.response_text = j.at("response_text").get<std::string>();
      e.attempt = j.at("attempt").get<int>();
      e.latency_ms = j.at("latency_ms").get<double>();
      if (j.contains("error")) e.error = j.at("error").get<std::string>();
      entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    } catch (const ConfigError& ex) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return Transcript(std::move(entries));
}

BackendResponse RecordingBackend::complete(const BackendRequest& request) {
  TranscriptEntry e{request.statement_id, request.stage, request.prompt_hash, request.prompt, "", 1, 0.0,
                    std::nullopt};
  try {
    BackendResponse r = inner_.complete(request);
    e.response_text = r.text;
    e.attempt = r.attempt;
    e.latency_ms = r.latency_ms;
    transcript_.append(std::move(e));
    return r;
  } catch (const BackendError& err) {
    e.response_text = err.what();
    e.error = err.kind();
    transcript_.append(std::move(e));
    throw;
  }
}

ReplayBackend::ReplayBackend(const Transcript& transcript, std::string name) : name_(std::move(name)) {
  for (auto& e : transcript.entries()) {
    by_key_[{e.statement_id, e.stage}].push_back(std::move(e));
  }
}

BackendResponse ReplayBackend::complete(const BackendRequest& request) {
  const std::pair key{request.statement_id, request.stage};
  const auto it = by_key_.find(key);
  std::size_t index = 0;
  {
    std::lock_guard lock(mu_);
    index = cursor_[key]++;
  }
  if (it == by_key_.end() || index >= it->second.size()) {
    throw MissingTranscript("no recorded exchange #" + std::to_string(index + 1) + " for statement " +
                            std::to_string(request.statement_id) + " stage " +
                            std::string(to_string(request.stage)));
  }
  const TranscriptEntry& e = it->second[index];
  if (e.error) {
    const std::string& kind = *e.error;
    if (kind == "provider_exhausted") throw ProviderExhausted(e.response_text);
    if (kind == "auth_error") throw AuthError(e.response_text);
    throw ProviderError(e.response_text);
  }
  return BackendResponse{e.response_text, name_, e.latency_ms, e.attempt};
}

}  // namespace bias_audit
