#pragma once

#include "sforge/diagnostics.hpp"
#include "sforge/registry.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sforge {

constexpr int kSchemaVersion = 1;

struct Position {
    double x{0.0};
    double y{0.0};
    bool operator==(const Position&) const = default;
};

struct SliderPin {
    double min{0.0};
    double max{1.0};
    double value{0.0};
    bool operator==(const SliderPin&) const = default;
};

using PinnedValue = std::variant<double, std::string, SliderPin>;

struct ScriptNode {
    NodeId id{0};
    std::string component;
    Position position;
    std::map<std::string, PinnedValue> pins;  // raw port names, resolved by the validator
    bool operator==(const ScriptNode&) const = default;
};

using ScriptEdge = EdgeRef;

struct ScriptDocument {
    int schema_version{kSchemaVersion};
    std::optional<std::string> prompt;
    std::vector<ScriptNode> nodes;
    std::vector<ScriptEdge> edges;

    const ScriptNode* find(NodeId id) const;
    ScriptNode* find(NodeId id);
    // Structural equality: node and edge order do not matter.
    bool operator==(const ScriptDocument& other) const;
};

// Nodes by id, edges by (to.node, to.port, from.node, from.port).
ScriptDocument canonicalized(ScriptDocument doc);

class ParseError : public std::runtime_error {
public:
    enum class Kind { syntax, schema, duplicate_id, dangling_edge, self_loop };

    ParseError(Kind kind, std::string message, std::string path = {}, std::optional<std::size_t> offset = {});

    Kind kind() const { return kind_; }
    const std::string& path() const { return path_; }
    std::optional<std::size_t> offset() const { return offset_; }

private:
    Kind kind_;
    std::string path_;
    std::optional<std::size_t> offset_;
};

std::string_view to_string(ParseError::Kind k);

ScriptDocument parse_document_strict(std::string_view text);
ScriptDocument document_from_json(const nlohmann::json& j);  // strict rules on an already-parsed value

struct TolerantParse {
    ScriptDocument document;
    std::vector<Diagnostic> diagnostics;
};

TolerantParse parse_document_tolerant(std::string_view text);

nlohmann::ordered_json document_to_json(const ScriptDocument& doc);
std::string serialize(const ScriptDocument& doc);

// Column = longest-path depth x 220, row = rank within the column x 120.
constexpr double kLayoutColumn = 220.0;
constexpr double kLayoutRow = 120.0;
Position auto_layout_position(int depth, int row);

struct GraphNode {
    NodeId id{0};
    std::string raw_component;
    Resolution resolution;
    const ComponentSpec* spec{nullptr};  // null for placeholders
    const ScriptNode* source{nullptr};
    bool placeholder() const { return spec == nullptr; }
};

struct GraphEdge {
    EdgeRef ref;
    int occurrence{0};  // n-th copy of an identical edge
    Resolution from_port;
    Resolution to_port;
    bool from_known() const { return from_port.match.has_value(); }
    bool to_known() const { return to_port.match.has_value(); }
};

class CycleError : public std::runtime_error {
public:
    explicit CycleError(std::vector<NodeId> cycle);
    const std::vector<NodeId>& cycle() const { return cycle_; }

private:
    std::vector<NodeId> cycle_;
};

// Immutable once built. Holds its own copy of the document; the catalog is borrowed.
class ScriptGraph {
public:
    const ScriptDocument& document() const { return *doc_; }
    const Catalog& catalog() const { return *catalog_; }  // must outlive the graph
    const std::vector<GraphNode>& nodes() const { return nodes_; }
    const std::vector<GraphEdge>& edges() const { return edges_; }
    const std::vector<NodeId>& order() const { return order_; }

    bool contains(NodeId id) const;
    const GraphNode& node(NodeId id) const;
    std::size_t index_of(NodeId id) const;
    const std::vector<std::size_t>& in_edges(NodeId id) const;
    const std::vector<std::size_t>& out_edges(NodeId id) const;

private:
    friend struct GraphBuilder;

    std::shared_ptr<const ScriptDocument> doc_;
    const Catalog* catalog_{nullptr};
    std::vector<GraphNode> nodes_;  // ascending id
    std::vector<GraphEdge> edges_;  // canonical edge order
    std::vector<std::vector<std::size_t>> in_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<NodeId> order_;
};

struct BuildResult {
    ScriptGraph graph;
    std::vector<Diagnostic> diagnostics;
};

BuildResult build_graph(const ScriptDocument& doc, const Catalog& catalog);
std::vector<NodeId> topo_order(const ScriptGraph& graph);

// Pin key on `node` that resolves to input port `port`, if any.
std::optional<std::string> pin_key_for(const ScriptNode& node, const ComponentSpec& spec, std::string_view port);

}  // namespace sforge
