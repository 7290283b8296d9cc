#include "sforge/diagnostics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace sforge {

std::string to_string(const EdgeRef& e) {
    return fmt::format("{}.{}->{}.{}", e.from.node, e.from.port, e.to.node, e.to.port);
}

std::string_view to_string(Severity s) {
    switch (s) {
        case Severity::error: return "error";
        case Severity::warning: return "warning";
        case Severity::info: return "info";
    }
    return "info";
}

std::string_view to_string(RepairKind k) {
    switch (k) {
        case RepairKind::rename_component: return "rename_component";
        case RepairKind::rename_port: return "rename_port";
        case RepairKind::insert_default: return "insert_default";
        case RepairKind::delete_edge: return "delete_edge";
        case RepairKind::retarget_edge: return "retarget_edge";
    }
    return "?";
}

std::string Repair::id() const {
    switch (kind) {
        case RepairKind::rename_component: return fmt::format("rename_component:{}:{}", node, new_name);
        case RepairKind::rename_port:
            if (edge) {
                return fmt::format("rename_port:{}:{}:{}", to_string(*edge), side == EdgeSide::from ? "from" : "to",
                                   new_name);
            }
            return fmt::format("rename_port:{}.{}:{}", node, old_name, new_name);
        case RepairKind::insert_default: return fmt::format("insert_default:{}.{}", node, port);
        case RepairKind::delete_edge:
            return occurrence == 0 ? fmt::format("delete_edge:{}", to_string(*edge))
                                   : fmt::format("delete_edge:{}#{}", to_string(*edge), occurrence);
        case RepairKind::retarget_edge:
            return fmt::format("retarget_edge:{}:{}.{}", to_string(*edge), new_to->node, new_to->port);
    }
    return "?";
}

Diagnostic make_diagnostic(std::string rule, Severity severity, Location location, std::string message) {
    return Diagnostic{std::move(rule), severity, std::move(location), std::move(message), std::nullopt};
}

bool diagnostic_less(const Diagnostic& a, const Diagnostic& b) {
    auto key = [](const Diagnostic& d) {
        return std::make_tuple(static_cast<int>(d.severity), d.location.node.value_or(0), d.rule,
                               d.location.port.value_or(""), d.location.edge, d.message);
    };
    return key(a) < key(b);
}

void sort_diagnostics(std::vector<Diagnostic>& diags) { std::stable_sort(diags.begin(), diags.end(), diagnostic_less); }

std::size_t count_rule(const std::vector<Diagnostic>& diags, std::string_view rule) {
    return static_cast<std::size_t>(
        std::count_if(diags.begin(), diags.end(), [rule](const Diagnostic& d) { return d.rule == rule; }));
}

std::size_t count_severity(const std::vector<Diagnostic>& diags, Severity s) {
    return static_cast<std::size_t>(
        std::count_if(diags.begin(), diags.end(), [s](const Diagnostic& d) { return d.severity == s; }));
}

nlohmann::ordered_json to_json(const EdgeRef& e) {
    nlohmann::ordered_json j;
    j["from"] = {{"id", e.from.node}, {"port", e.from.port}};
    j["to"] = {{"id", e.to.node}, {"port", e.to.port}};
    return j;
}

nlohmann::ordered_json to_json(const Repair& r) {
    nlohmann::ordered_json j;
    j["id"] = r.id();
    j["kind"] = to_string(r.kind);
    switch (r.kind) {
        case RepairKind::rename_component:
            j["node"] = r.node;
            j["from"] = r.old_name;
            j["to"] = r.new_name;
            break;
        case RepairKind::rename_port:
            if (r.edge) {
                j["edge"] = to_json(*r.edge);
                j["side"] = r.side == EdgeSide::from ? "from" : "to";
            } else {
                j["node"] = r.node;
            }
            j["from"] = r.old_name;
            j["to"] = r.new_name;
            break;
        case RepairKind::insert_default:
            j["node"] = r.node;
            j["port"] = r.port;
            j["value"] = r.value;
            break;
        case RepairKind::delete_edge:
            j["edge"] = to_json(*r.edge);
            if (r.occurrence != 0) j["occurrence"] = r.occurrence;
            break;
        case RepairKind::retarget_edge:
            j["edge"] = to_json(*r.edge);
            j["new_to"] = {{"id", r.new_to->node}, {"port", r.new_to->port}};
            break;
    }
    return j;
}

nlohmann::ordered_json to_json(const Diagnostic& d) {
    nlohmann::ordered_json j;
    j["rule"] = d.rule;
    j["severity"] = to_string(d.severity);
    if (d.location.node) j["node"] = *d.location.node;
    if (d.location.port) j["port"] = *d.location.port;
    if (d.location.edge) j["edge"] = to_json(*d.location.edge);
    j["message"] = d.message;
    if (d.repair) j["repair"] = to_json(*d.repair);
    return j;
}

nlohmann::ordered_json to_json(const std::vector<Diagnostic>& diags) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& d : diags) arr.push_back(to_json(d));
    return arr;
}

namespace {

Endpoint endpoint_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("id") || !j.contains("port")) {
        throw std::invalid_argument("endpoint needs id and port");
    }
    return {j.at("id").get<NodeId>(), j.at("port").get<std::string>()};
}

}  // namespace

EdgeRef edge_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("from") || !j.contains("to")) throw std::invalid_argument("edge needs from and to");
    return {endpoint_from_json(j.at("from")), endpoint_from_json(j.at("to"))};
}

Repair repair_from_json(const nlohmann::json& j) {
    Repair r;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "rename_component") {
        r.kind = RepairKind::rename_component;
        r.node = j.at("node").get<NodeId>();
        r.old_name = j.value("from", "");
        r.new_name = j.at("to").get<std::string>();
    } else if (kind == "rename_port") {
        r.kind = RepairKind::rename_port;
        if (j.contains("edge")) {
            r.edge = edge_from_json(j.at("edge"));
            r.side = j.value("side", "to") == "from" ? EdgeSide::from : EdgeSide::to;
        } else {
            r.node = j.at("node").get<NodeId>();
        }
        r.old_name = j.at("from").get<std::string>();
        r.new_name = j.at("to").get<std::string>();
    } else if (kind == "insert_default") {
        r.kind = RepairKind::insert_default;
        r.node = j.at("node").get<NodeId>();
        r.port = j.at("port").get<std::string>();
        r.value = j.at("value").get<double>();
    } else if (kind == "delete_edge") {
        r.kind = RepairKind::delete_edge;
        r.edge = edge_from_json(j.at("edge"));
        r.occurrence = j.value("occurrence", 0);
    } else if (kind == "retarget_edge") {
        r.kind = RepairKind::retarget_edge;
        r.edge = edge_from_json(j.at("edge"));
        r.new_to = endpoint_from_json(j.at("new_to"));
    } else {
        throw std::invalid_argument("unknown repair kind '" + kind + "'");
    }
    return r;
}

}  // namespace sforge
