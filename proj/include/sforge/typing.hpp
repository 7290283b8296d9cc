#pragma once

#include "sforge/graph_ir.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sforge {

struct EdgeTyping {
    bool checked{false};  // false when either endpoint is unresolved
    bool ok{true};
    ValueKind from{ValueKind::any};
    ValueKind to{ValueKind::any};
    std::string message;
};

struct PinTyping {
    NodeId node{0};
    std::string key;
    std::optional<std::size_t> port;  // resolved input index
    bool ok{true};
    std::string message;
};

struct NodeTyping {
    std::vector<ValueKind> outputs;               // effective kinds, parallel to spec outputs
    std::map<std::string, ValueKind> groups;      // item kind per port group, once known
};

// Static kinds for every port, shared by the validator (R3) and the evaluator's pre-kernel check.
struct GraphTyping {
    std::map<NodeId, NodeTyping> nodes;
    std::vector<EdgeTyping> edges;  // parallel to ScriptGraph::edges()
    std::vector<PinTyping> pins;    // node id, then key order
};

GraphTyping infer_types(const ScriptGraph& graph);

bool is_number_slider(const ComponentSpec* spec);
ValueKind pin_kind(const PinnedValue& pin);

// "a number", "a vector", "an axis"...
std::string with_article(const std::string& noun);
std::string kind_phrase(ValueKind k);
std::string mismatch_message(const ComponentSpec& spec, const PortSpec& port, ValueKind from, ValueKind expected);

}  // namespace sforge
