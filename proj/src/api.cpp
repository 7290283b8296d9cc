#include "sforge/evaluator.hpp"
#include "sforge/service.hpp"
#include "sforge/validator.hpp"

#include <fmt/format.h>

namespace sforge {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

ApiError::ApiError(int status, std::string code, std::string message, ojson extra)
    : std::runtime_error(std::move(message)), status_(status), code_(std::move(code)), extra_(std::move(extra)) {}

ojson ApiError::body() const {
    ojson err{{"code", code_}, {"message", what()}};
    for (const auto& [k, v] : extra_.items()) err[k] = v;
    return {{"schema_version", kSchemaVersion}, {"error", err}};
}

namespace {

ApiError invalid_document(const ParseError& e) {
    ojson extra = ojson::object();
    ojson loc{{"kind", to_string(e.kind())}};
    if (!e.path().empty()) loc["path"] = e.path();
    if (e.offset()) loc["offset"] = *e.offset();
    extra["location"] = loc;
    return ApiError(422, "invalid_document", e.what(), extra);
}

BuildResult build_or_throw(const ScriptDocument& doc, const Catalog& catalog) {
    try {
        return build_graph(doc, catalog);
    } catch (const CycleError& e) {
        throw ApiError(422, "cycle", e.what(), {{"location", {{"cycle", e.cycle()}}}});
    }
}

std::vector<Diagnostic> all_diagnostics(const LoadedDocument& doc, const BuildResult& built) {
    std::vector<Diagnostic> diags = doc.diagnostics;
    diags.insert(diags.end(), built.diagnostics.begin(), built.diagnostics.end());
    auto found = validate(built.graph);
    diags.insert(diags.end(), found.begin(), found.end());
    sort_diagnostics(diags);
    return diags;
}

}  // namespace

LoadedDocument load_document(std::string_view text) {
    try {
        return {parse_document_strict(text), {}};
    } catch (const ParseError&) {
    }
    try {
        auto parsed = parse_document_tolerant(text);
        return {std::move(parsed.document), std::move(parsed.diagnostics)};
    } catch (const ParseError& e) {
        throw invalid_document(e);
    }
}

LoadedDocument load_document(const json& value) {
    if (value.is_string()) return load_document(std::string_view(value.get_ref<const std::string&>()));
    if (!value.is_object()) throw ApiError(422, "invalid_document", "document must be an object or a string");
    return load_document(std::string_view(value.dump()));
}

ojson validate_response(const LoadedDocument& doc, const Catalog& catalog) {
    BuildResult built = build_or_throw(doc.document, catalog);
    const auto diags = all_diagnostics(doc, built);
    ojson ids = ojson::array();
    for (const auto& r : suggest_repairs(built.graph, diags)) ids.push_back(r.id());
    return {{"schema_version", kSchemaVersion}, {"diagnostics", to_json(diags)}, {"suggested_repairs", ids}};
}

ojson repair_response(const LoadedDocument& doc, const std::optional<std::vector<std::string>>& ids,
                      const Catalog& catalog) {
    BuildResult built = build_or_throw(doc.document, catalog);
    const auto diags = all_diagnostics(doc, built);
    std::vector<Repair> chosen;
    if (!ids) {
        chosen = suggest_repairs(built.graph, diags);
    } else {
        std::map<std::string, Repair> offered;
        for (const auto& d : diags) {
            if (d.repair) offered.emplace(d.repair->id(), *d.repair);
        }
        for (const auto& id : *ids) {
            auto it = offered.find(id);
            if (it == offered.end()) {
                throw ApiError(422, "unknown_repair", fmt::format("no diagnostic offers repair '{}'", id),
                               {{"location", {{"repair_id", id}}}});
            }
            chosen.push_back(it->second);
        }
    }
    ScriptDocument repaired;
    try {
        repaired = apply_repairs(doc.document, chosen);
    } catch (const RepairError& e) {
        throw ApiError(409, "repair_conflict", e.what(), {{"conflicts", e.conflicts()}});
    }
    ojson applied = ojson::array();
    for (const auto& r : chosen) applied.push_back(r.id());
    BuildResult rebuilt = build_or_throw(repaired, catalog);
    const auto after = all_diagnostics(LoadedDocument{repaired, {}}, rebuilt);
    return {{"schema_version", kSchemaVersion},
            {"applied", applied},
            {"document", document_to_json(repaired)},
            {"diagnostics", to_json(after)}};
}

ojson evaluate_response(const LoadedDocument& doc, const std::map<NodeId, double>& overrides, const Catalog& catalog) {
    BuildResult built = build_or_throw(doc.document, catalog);
    try {
        return to_json(evaluate_with_overrides(built.graph, overrides));
    } catch (const OverrideError& e) {
        throw ApiError(422, "bad_override", e.what(), {{"location", {{"node", e.node()}}}});
    }
}

ojson registry_response(const Catalog& catalog) {
    ojson j = ojson::object();
    j["schema_version"] = kSchemaVersion;
    const ojson body = catalog_to_json(catalog);
    for (const auto& [k, v] : body.items()) j[k] = v;
    return j;
}

std::map<NodeId, double> overrides_from_json(const json& j) {
    std::map<NodeId, double> out;
    if (j.is_null()) return out;
    if (!j.is_object()) throw ApiError(422, "bad_override", "overrides must be an object of node id to number");
    for (const auto& [key, value] : j.items()) {
        NodeId id = 0;
        try {
            std::size_t used = 0;
            const long long parsed = std::stoll(key, &used);
            if (used != key.size() || parsed <= 0) throw std::invalid_argument(key);
            id = static_cast<NodeId>(parsed);
        } catch (const std::exception&) {
            throw ApiError(422, "bad_override", fmt::format("override key '{}' is not a node id", key));
        }
        if (!value.is_number()) {
            throw ApiError(422, "bad_override", fmt::format("override for node {} is not a number", id),
                           {{"location", {{"node", id}}}});
        }
        out[id] = value.get<double>();
    }
    return out;
}

bool has_errors(const ojson& validate_body) {
    for (const auto& d : validate_body.at("diagnostics")) {
        if (d.at("severity") == "error") return true;
    }
    return false;
}

}  // namespace sforge
