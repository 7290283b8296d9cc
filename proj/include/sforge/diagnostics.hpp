#pragma once

#include "sforge/geometry.hpp"

#include <json.hpp>

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace sforge {

struct Endpoint {
    NodeId node{0};
    std::string port;
    auto operator<=>(const Endpoint&) const = default;
};

// One connection: output port of `from` feeds input port of `to`.
struct EdgeRef {
    Endpoint from;
    Endpoint to;
    auto operator<=>(const EdgeRef&) const = default;
};

std::string to_string(const EdgeRef& e);

enum class Severity { error, warning, info };
std::string_view to_string(Severity s);

struct Location {
    std::optional<NodeId> node;
    std::optional<std::string> port;
    std::optional<EdgeRef> edge;
    bool operator==(const Location&) const = default;
};

enum class RepairKind { rename_component, rename_port, insert_default, delete_edge, retarget_edge };
std::string_view to_string(RepairKind k);

enum class EdgeSide { from, to };

// Payload fields are kind-specific:
//   rename_component: node, old_name, new_name
//   rename_port:      edge + side (edge endpoint) or node (pin key), old_name, new_name
//   insert_default:   node, port, value
//   delete_edge:      edge, occurrence (n-th identical copy)
//   retarget_edge:    edge, new_to
struct Repair {
    RepairKind kind{RepairKind::delete_edge};
    NodeId node{0};
    std::optional<EdgeRef> edge;
    EdgeSide side{EdgeSide::to};
    std::string port;
    std::string old_name;
    std::string new_name;
    double value{0.0};
    int occurrence{0};
    std::optional<Endpoint> new_to;

    std::string id() const;
    bool operator==(const Repair&) const = default;
};

struct Diagnostic {
    std::string rule;
    Severity severity{Severity::info};
    Location location;
    std::string message;
    std::optional<Repair> repair;
    bool operator==(const Diagnostic&) const = default;
};

Diagnostic make_diagnostic(std::string rule, Severity severity, Location location, std::string message);

// Deterministic report order: severity, node id (document-level first), rule, port, message.
bool diagnostic_less(const Diagnostic& a, const Diagnostic& b);
void sort_diagnostics(std::vector<Diagnostic>& diags);
std::size_t count_rule(const std::vector<Diagnostic>& diags, std::string_view rule);
std::size_t count_severity(const std::vector<Diagnostic>& diags, Severity s);

nlohmann::ordered_json to_json(const EdgeRef& e);
nlohmann::ordered_json to_json(const Repair& r);
nlohmann::ordered_json to_json(const Diagnostic& d);
nlohmann::ordered_json to_json(const std::vector<Diagnostic>& diags);
EdgeRef edge_from_json(const nlohmann::json& j);
Repair repair_from_json(const nlohmann::json& j);

}  // namespace sforge
