#pragma once

#include "sforge/diagnostics.hpp"
#include "sforge/graph_ir.hpp"
#include "sforge/registry.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sforge {

// ---------------------------------------------------------------------------
// Backends

enum class BackendKind { live, mock };
enum class MockFallback { error, echo };

struct BackendConfig {
    BackendKind kind{BackendKind::mock};
    std::string endpoint;  // live only
    std::string model{"gpt-4o"};
    double temperature{0.2};
    int max_tokens{2048};
    std::string api_key;
    std::filesystem::path fixtures_dir;
    MockFallback fallback{MockFallback::error};
    std::chrono::seconds timeout{120};

    // SF_BACKEND, SF_API_URL, SF_API_KEY, SF_MODEL, SF_TEMPERATURE over the given defaults.
    static BackendConfig from_env();
    static BackendConfig from_env(BackendConfig defaults);
};

class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BackendRequest {
    int stage{1};
    std::string system;
    std::string user;   // the stage input: prompt, rendered brief or rendered chain
    std::string hint;   // set on retries, describes why the previous reply was rejected
    int attempt{1};
};

class Backend {
public:
    virtual ~Backend() = default;
    // Must be safe to call from several threads at once.
    virtual std::string complete(const BackendRequest& request) = 0;
};

// FNV-1a 64 over the lower-cased, whitespace-collapsed, trimmed stage input; 16 hex digits.
std::string normalize_stage_input(std::string_view text);
std::string mock_key(std::string_view stage_input);

struct MockFixture {
    int stage{1};
    std::string key;
    std::string reply;
};

class MockBackend : public Backend {
public:
    MockBackend(std::vector<MockFixture> fixtures, MockFallback fallback);
    static std::unique_ptr<MockBackend> from_dir(const std::filesystem::path& dir, MockFallback fallback);

    std::string complete(const BackendRequest& request) override;
    std::size_t calls() const { return calls_.load(); }
    std::size_t size() const { return replies_.size(); }

private:
    std::map<std::pair<int, std::string>, std::string> replies_;
    MockFallback fallback_;
    std::atomic<std::size_t> calls_{0};
};

class LiveBackend : public Backend {
public:
    explicit LiveBackend(BackendConfig config);
    std::string complete(const BackendRequest& request) override;

private:
    BackendConfig config_;
};

// Process-wide count of requests the live backend has attempted to send.
std::size_t live_backend_calls();

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

// ---------------------------------------------------------------------------
// Stage products

struct DesignInput {
    std::string name;
    double min{0.0};
    double max{1.0};
    double value{0.0};
    bool operator==(const DesignInput&) const = default;
};

struct DesignBrief {
    std::string intent;
    std::vector<DesignInput> inputs;
    std::vector<std::string> logic;
    bool operator==(const DesignBrief&) const = default;
};

struct Binding {
    enum class Kind { ref, number, text, slider };
    Kind kind{Kind::number};
    std::string label;  // ref
    std::string port;   // ref, optional output port
    double number{0.0};
    std::string text;
    SliderPin slider;
    bool operator==(const Binding&) const = default;
};

struct ChainStep {
    std::string label;
    std::string component;
    std::vector<std::pair<std::string, Binding>> bindings;
    bool in_catalog{true};
    bool operator==(const ChainStep&) const = default;
};

struct ComponentChain {
    std::vector<ChainStep> steps;
    bool operator==(const ComponentChain&) const = default;
};

class ExtractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Templated replies: labelled sections, each parser throws ExtractError with the reason.
DesignBrief parse_brief(std::string_view reply);
ComponentChain parse_chain(std::string_view reply);
std::string extract_notes(std::string_view reply);
std::string render_brief(const DesignBrief& brief);
std::string render_chain(const ComponentChain& chain);

// Longest balanced {...} after code fences are removed.
std::string extract_json(std::string_view raw);

std::string stage1_system_prompt();
std::string stage2_system_prompt(const Catalog& catalog);
std::string stage3_system_prompt();

constexpr int kMaxAttempts = 3;

struct StageOutput {
    int stage{1};
    std::string input;  // what the stage was asked
    std::string raw;    // last reply
    std::optional<std::variant<DesignBrief, ComponentChain, ScriptDocument>> parsed;
    std::string notes;
    int attempts{0};
    std::string error;
    bool backend_failed{false};
    std::vector<Diagnostic> diagnostics;
    double seconds{0.0};

    bool ok() const { return parsed.has_value(); }
};

StageOutput run_stage1(const std::string& prompt, Backend& backend);
StageOutput run_stage2(const DesignBrief& brief, const Catalog& catalog, Backend& backend);
StageOutput run_stage3(const ComponentChain& chain, Backend& backend);

struct PipelineTranscript {
    std::string prompt;
    std::vector<StageOutput> stages;
    std::optional<ScriptDocument> document;
    std::vector<Diagnostic> diagnostics;
    std::string error;

    bool backend_failed() const;
};

PipelineTranscript run_pipeline(const std::string& prompt, const Catalog& catalog, Backend& backend);

nlohmann::ordered_json to_json(const DesignBrief& brief);
nlohmann::ordered_json to_json(const ComponentChain& chain);
// Stage timings vary run to run, so they are left out unless asked for.
nlohmann::ordered_json to_json(const PipelineTranscript& t, bool include_timing = false);

}  // namespace sforge
