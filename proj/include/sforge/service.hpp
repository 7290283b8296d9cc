#pragma once

#include "sforge/agents.hpp"
#include "sforge/diagnostics.hpp"
#include "sforge/graph_ir.hpp"
#include "sforge/registry.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sforge {

// The JSON operations behind both the CLI and the HTTP endpoints. One serializer per answer.

class ApiError : public std::runtime_error {
public:
    ApiError(int status, std::string code, std::string message, nlohmann::ordered_json extra = nlohmann::ordered_json::object());
    int status() const { return status_; }
    const std::string& code() const { return code_; }
    const nlohmann::ordered_json& extra() const { return extra_; }
    // {"schema_version":1,"error":{"code","message",...extra}}
    nlohmann::ordered_json body() const;

private:
    int status_;
    std::string code_;
    nlohmann::ordered_json extra_;
};

struct LoadedDocument {
    ScriptDocument document;
    std::vector<Diagnostic> diagnostics;  // tolerant-parse notes; empty for strict input
};

// Strict first, tolerant as a fallback. Throws ApiError 422 "invalid_document".
LoadedDocument load_document(std::string_view text);
LoadedDocument load_document(const nlohmann::json& value);  // an object, or a string holding the text

// {"schema_version":1,"diagnostics":[...],"suggested_repairs":[ids]}. Throws ApiError 422 "cycle".
nlohmann::ordered_json validate_response(const LoadedDocument& doc, const Catalog& catalog);
// Absent ids apply the suggested set. {"schema_version":1,"applied":[ids],"document":{...},"diagnostics":[...]}
nlohmann::ordered_json repair_response(const LoadedDocument& doc, const std::optional<std::vector<std::string>>& ids,
                                       const Catalog& catalog);
nlohmann::ordered_json evaluate_response(const LoadedDocument& doc, const std::map<NodeId, double>& overrides,
                                         const Catalog& catalog);
nlohmann::ordered_json registry_response(const Catalog& catalog);

std::map<NodeId, double> overrides_from_json(const nlohmann::json& j);  // {"<id>": value, ...}

bool has_errors(const nlohmann::ordered_json& validate_body);

struct ServiceOptions {
    std::string host{"127.0.0.1"};
    int port{7878};
    std::optional<std::filesystem::path> static_dir;
};

class Service {
public:
    Service(const Catalog& catalog, std::shared_ptr<Backend> backend, ServiceOptions options = {});
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Binds; port 0 picks a free port. Returns the bound port, or -1.
    int bind();
    // Blocks until stop().
    bool run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sforge
