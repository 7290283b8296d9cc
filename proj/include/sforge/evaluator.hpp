#pragma once

#include "sforge/diagnostics.hpp"
#include "sforge/graph_ir.hpp"

#include <json.hpp>

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sforge {

struct NodeFailure {
    NodeId node{0};
    NodeId origin{0};  // == node when the failure started here
    std::string message;
    bool operator==(const NodeFailure&) const = default;
};

struct Drawable {
    NodeId node{0};
    std::string port;
    GeomValue value;  // error items removed
    bool operator==(const Drawable&) const = default;
};

struct EvalResult {
    std::map<NodeId, std::map<std::string, GeomValue>> values;
    std::vector<NodeFailure> failures;  // ascending node id
    std::vector<Drawable> drawables;    // ascending node id, then output order
    std::vector<Diagnostic> notes;      // override clamping

    std::set<NodeId> origins() const;
    bool failed(NodeId id) const;
    bool operator==(const EvalResult&) const = default;
};

class OverrideError : public std::runtime_error {
public:
    OverrideError(NodeId node, std::string message) : std::runtime_error(std::move(message)), node_(node) {}
    NodeId node() const { return node_; }

private:
    NodeId node_;
};

EvalResult evaluate(const ScriptGraph& graph);
// Overrides replace slider values for this run only; they are clamped to the slider range.
EvalResult evaluate_with_overrides(const ScriptGraph& graph, const std::map<NodeId, double>& overrides);

// Every non-error geometry item among the drawables, lists flattened.
std::vector<GeomValue> drawable_items(const EvalResult& result);

constexpr int kMeshU = 32;
constexpr int kMeshV = 16;

nlohmann::ordered_json value_to_json(const GeomValue& v, int u_count = kMeshU, int v_count = kMeshV);
nlohmann::ordered_json to_json(const EvalResult& result, int u_count = kMeshU, int v_count = kMeshV);

}  // namespace sforge
