#include "bias_audit/scripted_backend.hpp"

#include <fstream>
#include <thread>

#include <json.hpp>

namespace bias_audit {

namespace {

[[noreturn]] void throw_scripted_error(const std::string& kind, StatementId id, Stage stage) {
  const std::string where =
      "scripted " + kind + " for statement " + std::to_string(id) + " stage " + std::string(to_string(stage));
  if (kind == "provider_exhausted") throw ProviderExhausted(where);
  if (kind == "auth_error") throw AuthError(where);
  if (kind == "provider_error") throw ProviderError(where);
  throw ProviderError("unknown scripted error kind '" + kind + "'");
}

ScriptStep parse_step(const nlohmann::json& j) {
  if (j.is_string()) return ScriptStep{j.get<std::string>(), std::nullopt};
  if (j.is_object() && j.contains("error")) return ScriptStep{"", j.at("error").get<std::string>()};
  throw ConfigError("script step must be a string or {\"error\": kind}");
}

}  // namespace

ScriptedBackend::ScriptedBackend(std::string name) : name_(std::move(name)) {}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open script " + path.string());
  auto backend = std::make_unique<ScriptedBackend>("scripted:" + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto stage = parse_stage(j.at("stage").get<std::string>());
      if (!stage) throw ConfigError("unknown stage");
      std::vector<ScriptStep> steps;
      if (j.contains("responses")) {
        for (const auto& s : j.at("responses")) steps.push_back(parse_step(s));
      } else if (j.contains("response")) {
        steps.push_back(parse_step(j.at("response")));
      } else if (j.contains("error")) {
        steps.push_back(parse_step(j));
      }
      if (steps.empty()) throw ConfigError("entry has no response");
      if (j.contains("statement_id") && !j.at("statement_id").is_null()) {
        backend->script(j.at("statement_id").get<StatementId>(), *stage, std::move(steps));
      } else {
        backend->script_default(*stage, std::move(steps));
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return backend;
}

void ScriptedBackend::script(StatementId id, Stage stage, std::vector<ScriptStep> steps) {
  steps_[{id, stage}] = std::move(steps);
}

void ScriptedBackend::script(StatementId id, Stage stage, const std::string& text) {
  script(id, stage, std::vector<ScriptStep>{{text, std::nullopt}});
}

void ScriptedBackend::script_default(Stage stage, std::vector<ScriptStep> steps) {
  steps_[{std::nullopt, stage}] = std::move(steps);
}

BackendResponse ScriptedBackend::complete(const BackendRequest& request) {
  validate(request);
  auto it = steps_.find({request.statement_id, request.stage});
  if (it == steps_.end()) it = steps_.find({std::nullopt, request.stage});

  std::size_t index = 0;
  {
    std::lock_guard lock(mu_);
    ++calls_;
    ++per_statement_[request.statement_id];
    index = cursor_[{request.statement_id, request.stage}]++;
    max_in_flight_ = std::max(max_in_flight_, ++in_flight_);
  }
  struct Leave {
    ScriptedBackend* self;
    ~Leave() {
      std::lock_guard lock(self->mu_);
      --self->in_flight_;
    }
  } leave{this};

  if (delay_.count() > 0) std::this_thread::sleep_for(delay_);

  if (it == steps_.end() || it->second.empty()) {
    throw ProviderError("no scripted response for statement " + std::to_string(request.statement_id) +
                        " stage " + std::string(to_string(request.stage)));
  }
  const auto& steps = it->second;
  const ScriptStep& step = steps[std::min(index, steps.size() - 1)];
  if (step.error) throw_scripted_error(*step.error, request.statement_id, request.stage);
  return BackendResponse{step.text, name_, 0.0, 1};
}

std::size_t ScriptedBackend::call_count() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::size_t ScriptedBackend::call_count(StatementId id) const {
  std::lock_guard lock(mu_);
  auto it = per_statement_.find(id);
  return it == per_statement_.end() ? 0 : it->second;
}

std::size_t ScriptedBackend::max_in_flight() const {
  std::lock_guard lock(mu_);
  return max_in_flight_;
}

}  // namespace bias_audit
