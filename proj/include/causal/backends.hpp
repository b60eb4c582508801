#pragma once

#include "causal/agent.hpp"
#include "causal/bench.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace causal {

/// Replays model outputs in order, one per call.
class ScriptedBackend : public Backend {
public:
    explicit ScriptedBackend(std::vector<std::string> outputs);
    std::string complete(const std::string& prompt, const Transcript& so_far) override;
    std::size_t calls() const { return next_; }

private:
    std::vector<std::string> outputs_;
    std::size_t next_ = 0;
};

/// Reads a replay file: a JSON array of strings.
std::vector<std::string> load_replay(const std::filesystem::path& path);

/// Model outputs that reproduce the one-shot demo dialogue.
std::vector<std::string> demo_replay_script();

/// OpenAI-compatible chat completion endpoint. The API key is read from
/// CAUSAL_AGENT_API_KEY, then OPENAI_API_KEY.
class HttpChatBackend : public Backend {
public:
    explicit HttpChatBackend(BackendConfig config);
    std::string complete(const std::string& prompt, const Transcript& so_far) override;

private:
    BackendConfig config_;
    std::string api_key_;
};

/// Deterministic policy that issues the canonical tool calls for a benchmark
/// item and maps the observations to a final answer.
class OraclePolicyBackend : public Backend {
public:
    explicit OraclePolicyBackend(BenchItem item);
    std::string complete(const std::string& prompt, const Transcript& so_far) override;

private:
    BenchItem item_;
};

}  // namespace causal
