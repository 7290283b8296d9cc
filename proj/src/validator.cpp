#include "sforge/validator.hpp"

#include "sforge/typing.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace sforge {

const std::vector<RuleInfo>& rule_table() {
    static const std::vector<RuleInfo> rules{
        {"R1", "unknown-component", Severity::error},   {"R2", "unknown-port", Severity::error},
        {"R3", "type-mismatch", Severity::error},       {"R4", "missing-required-input", Severity::error},
        {"R5", "lost-node", Severity::warning},         {"R6", "sink-starved", Severity::warning},
        {"R7", "duplicate-edge", Severity::warning},
    };
    return rules;
}

std::size_t error_count(const std::vector<Diagnostic>& diags) { return count_severity(diags, Severity::error); }

namespace {

// Rename candidates reach one edit further than fuzzy resolution, but only with a unique nearest name.
constexpr int kRenameReach = 3;

template <class NameOf>
std::optional<std::string> rename_target(const Resolution& r, NameOf name_of) {
    if (r.nearest.empty() || r.nearest[0].distance > kRenameReach) return std::nullopt;
    if (r.nearest.size() > 1 && r.nearest[1].distance == r.nearest[0].distance) return std::nullopt;
    return name_of(r.nearest[0].index);
}

std::string nearest_list(const Resolution& r, const std::function<std::string(std::size_t)>& name_of) {
    std::string out;
    for (const auto& m : r.nearest) out += (out.empty() ? "" : ", ") + name_of(m.index);
    return out;
}

Diagnostic diag(const char* rule, Location loc, std::string message) {
    const auto& rules = rule_table();
    const auto it = std::find_if(rules.begin(), rules.end(), [&](const RuleInfo& r) { return r.id == rule; });
    return make_diagnostic(rule, it->severity, std::move(loc), std::move(message));
}

Repair delete_edge_repair(const GraphEdge& e) {
    Repair r;
    r.kind = RepairKind::delete_edge;
    r.edge = e.ref;
    r.occurrence = e.occurrence;
    return r;
}

void rule_unknown_component(const ScriptGraph& g, std::vector<Diagnostic>& out) {
    const Catalog& cat = g.catalog();
    auto name_of = [&](std::size_t i) { return cat.at(i).canonical_name; };
    for (const auto& n : g.nodes()) {
        if (!n.placeholder()) continue;
        std::string message = fmt::format("unknown component '{}'", n.raw_component);
        if (!n.resolution.nearest.empty()) message += "; nearest: " + nearest_list(n.resolution, name_of);
        auto d = diag("R1", {.node = n.id}, std::move(message));
        if (auto target = rename_target(n.resolution, name_of)) {
            Repair r;
            r.kind = RepairKind::rename_component;
            r.node = n.id;
            r.old_name = n.raw_component;
            r.new_name = *target;
            d.repair = r;
        }
        out.push_back(std::move(d));
    }
}

void rule_unknown_port(const ScriptGraph& g, const GraphTyping& typing, std::vector<Diagnostic>& out) {
    for (const auto& e : g.edges()) {
        for (EdgeSide side : {EdgeSide::from, EdgeSide::to}) {
            const bool from = side == EdgeSide::from;
            const Endpoint& end = from ? e.ref.from : e.ref.to;
            const GraphNode& n = g.node(end.node);
            if (n.placeholder() || (from ? e.from_known() : e.to_known())) continue;
            const auto& ports = n.spec->ports(from ? Side::out : Side::in);
            auto name_of = [&](std::size_t i) { return ports[i].name; };
            const Resolution& res = from ? e.from_port : e.to_port;
            std::string message = fmt::format("{} has no {} port '{}'", n.spec->canonical_name,
                                              from ? "output" : "input", end.port);
            if (!res.nearest.empty()) message += "; nearest: " + nearest_list(res, name_of);
            auto d = diag("R2", {.node = end.node, .port = end.port, .edge = e.ref}, std::move(message));
            if (auto target = rename_target(res, name_of)) {
                Repair r;
                r.kind = RepairKind::rename_port;
                r.edge = e.ref;
                r.side = side;
                r.old_name = end.port;
                r.new_name = *target;
                d.repair = r;
            }
            out.push_back(std::move(d));
        }
    }
    for (const auto& p : typing.pins) {
        const GraphNode& n = g.node(p.node);
        if (n.placeholder() || p.port) continue;
        const Resolution res = port_of(*n.spec, Side::in, p.key);
        auto name_of = [&](std::size_t i) { return n.spec->inputs[i].name; };
        std::string message = fmt::format("{} has no input port '{}' for a pinned value", n.spec->canonical_name, p.key);
        if (!res.nearest.empty()) message += "; nearest: " + nearest_list(res, name_of);
        auto d = diag("R2", {.node = p.node, .port = p.key}, std::move(message));
        if (auto target = rename_target(res, name_of); target && !n.source->pins.count(*target)) {
            Repair r;
            r.kind = RepairKind::rename_port;
            r.node = p.node;
            r.old_name = p.key;
            r.new_name = *target;
            d.repair = r;
        }
        out.push_back(std::move(d));
    }
}

void rule_type_mismatch(const ScriptGraph& g, const GraphTyping& typing, std::vector<Diagnostic>& out) {
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        const auto& et = typing.edges[i];
        if (!et.checked || et.ok) continue;
        const GraphEdge& e = g.edges()[i];
        const GraphNode& to = g.node(e.ref.to.node);
        const std::string& port = to.spec->inputs[e.to_port.match->index].name;
        auto d = diag("R3", {.node = to.id, .port = port, .edge = e.ref}, et.message);
        d.repair = delete_edge_repair(e);
        out.push_back(std::move(d));
    }
    for (const auto& p : typing.pins) {
        if (p.ok) continue;
        out.push_back(diag("R3", {.node = p.node, .port = p.key}, p.message));
    }
}

void rule_missing_input(const ScriptGraph& g, const GraphTyping& typing, std::vector<Diagnostic>& out) {
    for (const auto& n : g.nodes()) {
        if (n.placeholder()) continue;
        const ComponentSpec& spec = *n.spec;
        std::vector<bool> fed(spec.inputs.size(), false);
        for (std::size_t ei : g.in_edges(n.id)) {
            const GraphEdge& e = g.edges()[ei];
            if (e.to_known()) fed[e.to_port.match->index] = true;
        }
        for (const auto& p : typing.pins) {
            if (p.node == n.id && p.port) fed[*p.port] = true;
        }
        for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
            const PortSpec& port = spec.inputs[i];
            if (!port.required || fed[i]) continue;
            auto d = diag("R4", {.node = n.id, .port = port.name},
                          fmt::format("{} input {} is required but has no connection or value", spec.canonical_name,
                                      port.name));
            std::optional<double> value = port.suggested;
            if (!value && port.default_value) {
                if (const auto* num = port.default_value->get_if<double>()) value = *num;
            }
            if (value) {
                Repair r;
                r.kind = RepairKind::insert_default;
                r.node = n.id;
                r.port = port.name;
                r.value = *value;
                d.repair = r;
            }
            out.push_back(std::move(d));
        }
    }
}

bool produces_geometry(const GraphNode& n, const GraphTyping& typing) {
    if (n.placeholder()) return true;
    const auto& outs = typing.nodes.at(n.id).outputs;
    return std::any_of(outs.begin(), outs.end(), is_drawable);
}

void rule_lost_node(const ScriptGraph& g, const GraphTyping& typing, std::vector<Diagnostic>& out) {
    std::set<NodeId> reaches;
    std::vector<NodeId> stack;
    for (const auto& n : g.nodes()) {
        if (g.out_edges(n.id).empty() && produces_geometry(n, typing)) {
            reaches.insert(n.id);
            stack.push_back(n.id);
        }
    }
    while (!stack.empty()) {
        const NodeId id = stack.back();
        stack.pop_back();
        for (std::size_t ei : g.in_edges(id)) {
            const NodeId from = g.edges()[ei].ref.from.node;
            if (reaches.insert(from).second) stack.push_back(from);
        }
    }
    for (const auto& n : g.nodes()) {
        if (reaches.count(n.id)) continue;
        out.push_back(diag("R5", {.node = n.id},
                           fmt::format("{} node {} never feeds into the script's output, which makes it a lost node",
                                       n.spec ? n.spec->canonical_name : n.raw_component, n.id)));
    }
}

void rule_sink_starved(const ScriptGraph& g, const GraphTyping& typing, std::vector<Diagnostic>& out) {
    const std::size_t n = g.nodes().size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
        return parent[i] == i ? i : parent[i] = root(parent[i]);
    };
    for (const auto& e : g.edges()) parent[root(g.index_of(e.ref.from.node))] = root(g.index_of(e.ref.to.node));

    std::map<std::size_t, std::vector<NodeId>> groups;
    std::map<std::size_t, bool> geometric;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& node = g.nodes()[i];
        groups[root(i)].push_back(node.id);
        geometric[root(i)] = geometric[root(i)] || produces_geometry(node, typing);
    }
    for (const auto& [r, ids] : groups) {
        if (geometric[r]) continue;
        std::string list;
        for (NodeId id : ids) list += (list.empty() ? "" : ", ") + std::to_string(id);
        out.push_back(diag("R6", {.node = ids.front()},
                           fmt::format("subgraph of node{} {} produces no geometry and reaches no sink",
                                       ids.size() == 1 ? "" : "s", list)));
    }
}

void rule_duplicate_edge(const ScriptGraph& g, std::vector<Diagnostic>& out) {
    for (const auto& n : g.nodes()) {
        if (n.placeholder()) continue;
        std::map<std::size_t, int> seen;
        for (std::size_t ei : g.in_edges(n.id)) {
            const GraphEdge& e = g.edges()[ei];
            if (!e.to_known()) continue;
            const PortSpec& port = n.spec->inputs[e.to_port.match->index];
            if (port.cardinality != Cardinality::scalar) continue;
            if (seen[e.to_port.match->index]++ == 0) continue;
            auto d = diag("R7", {.node = n.id, .port = port.name, .edge = e.ref},
                          fmt::format("{} input {} already has a connection; extra edge from node {}",
                                      n.spec->canonical_name, port.name, e.ref.from.node));
            d.repair = delete_edge_repair(e);
            out.push_back(std::move(d));
        }
    }
}

std::size_t errors_after(const ScriptDocument& doc, const Catalog& catalog, const std::vector<Repair>& repairs) {
    try {
        const auto repaired = apply_repairs(doc, repairs);
        return error_count(validate_unfiltered(build_graph(repaired, catalog).graph));
    } catch (const std::exception&) {
        return std::numeric_limits<std::size_t>::max();
    }
}

std::vector<std::string> touched(const Repair& r) {
    switch (r.kind) {
        case RepairKind::rename_component: return {fmt::format("node:{}", r.node)};
        case RepairKind::rename_port:
            if (r.edge) return {fmt::format("edge:{}:{}", to_string(*r.edge), r.side == EdgeSide::from ? "from" : "to")};
            return {fmt::format("pin:{}.{}", r.node, r.old_name), fmt::format("pin:{}.{}", r.node, r.new_name)};
        case RepairKind::insert_default: return {fmt::format("pin:{}.{}", r.node, r.port)};
        case RepairKind::delete_edge:
        case RepairKind::retarget_edge: {
            const std::string e = to_string(*r.edge);
            return {"edge:" + e + ":from", "edge:" + e + ":to"};
        }
    }
    return {};
}

// Deleting two copies of one duplicated edge is fine; anything else sharing an element is not.
bool conflicts_with(const Repair& a, const Repair& b) {
    if (a.id() == b.id()) return false;
    if (a.kind == RepairKind::delete_edge && b.kind == RepairKind::delete_edge) return false;
    const auto ka = touched(a);
    const auto kb = touched(b);
    return std::any_of(ka.begin(), ka.end(), [&](const auto& k) { return std::find(kb.begin(), kb.end(), k) != kb.end(); });
}

}  // namespace

std::vector<Diagnostic> validate_unfiltered(const ScriptGraph& graph) {
    const GraphTyping typing = infer_types(graph);
    std::vector<Diagnostic> out;
    rule_unknown_component(graph, out);
    rule_unknown_port(graph, typing, out);
    rule_type_mismatch(graph, typing, out);
    rule_missing_input(graph, typing, out);
    rule_lost_node(graph, typing, out);
    rule_sink_starved(graph, typing, out);
    rule_duplicate_edge(graph, out);
    sort_diagnostics(out);
    return out;
}

std::vector<Diagnostic> validate(const ScriptGraph& graph) {
    auto diags = validate_unfiltered(graph);
    const std::size_t before = error_count(diags);
    for (auto& d : diags) {
        if (d.repair && errors_after(graph.document(), graph.catalog(), {*d.repair}) > before) d.repair.reset();
    }
    return diags;
}

std::vector<Repair> suggest_repairs(const ScriptGraph& graph, const std::vector<Diagnostic>& diags) {
    const std::size_t before = error_count(validate_unfiltered(graph));
    std::vector<Repair> accepted;
    std::set<std::string> ids;
    for (const auto& d : diags) {
        if (!d.repair || ids.count(d.repair->id())) continue;
        if (std::any_of(accepted.begin(), accepted.end(), [&](const Repair& a) { return conflicts_with(a, *d.repair); })) {
            continue;
        }
        auto trial = accepted;
        trial.push_back(*d.repair);
        if (errors_after(graph.document(), graph.catalog(), trial) > before) continue;
        accepted = std::move(trial);
        ids.insert(d.repair->id());
    }
    return accepted;
}

RepairError::RepairError(std::string message, std::vector<std::string> conflicts)
    : std::runtime_error(std::move(message)), conflicts_(std::move(conflicts)) {}

ScriptDocument apply_repairs(const ScriptDocument& doc, const std::vector<Repair>& repairs) {
    std::vector<Repair> unique;
    std::set<std::string> ids;
    for (const auto& r : repairs) {
        if (ids.insert(r.id()).second) unique.push_back(r);
    }

    std::vector<std::string> conflicts;
    for (std::size_t i = 0; i < unique.size(); ++i) {
        for (std::size_t j = i + 1; j < unique.size(); ++j) {
            if (conflicts_with(unique[i], unique[j])) {
                conflicts.push_back(fmt::format("{} vs {}", unique[i].id(), unique[j].id()));
            }
        }
    }
    if (!conflicts.empty()) {
        std::string msg = "conflicting repairs: ";
        for (std::size_t i = 0; i < conflicts.size(); ++i) msg += (i ? "; " : "") + conflicts[i];
        throw RepairError(msg, conflicts);
    }

    ScriptDocument out = doc;
    auto node_or_throw = [&](NodeId id, const Repair& r) -> ScriptNode& {
        ScriptNode* n = out.find(id);
        if (n == nullptr) throw RepairError(fmt::format("{}: node {} does not exist", r.id(), id));
        return *n;
    };
    auto edge_or_throw = [&](const Repair& r) -> std::vector<ScriptEdge>::iterator {
        auto it = std::find(out.edges.begin(), out.edges.end(), *r.edge);
        if (it == out.edges.end()) throw RepairError(fmt::format("{}: edge does not exist", r.id()));
        return it;
    };

    // Deletions go last so edge-level repairs above still find their edges.
    std::map<EdgeRef, int> deletions;
    for (const auto& r : unique) {
        switch (r.kind) {
            case RepairKind::rename_component: node_or_throw(r.node, r).component = r.new_name; break;
            case RepairKind::rename_port:
                if (r.edge) {
                    edge_or_throw(r);
                    for (auto& e : out.edges) {
                        if (e != *r.edge) continue;
                        (r.side == EdgeSide::from ? e.from.port : e.to.port) = r.new_name;
                    }
                } else {
                    auto& pins = node_or_throw(r.node, r).pins;
                    auto it = pins.find(r.old_name);
                    if (it == pins.end()) throw RepairError(fmt::format("{}: no pin '{}'", r.id(), r.old_name));
                    if (pins.count(r.new_name)) throw RepairError(fmt::format("{}: pin '{}' exists", r.id(), r.new_name));
                    auto value = it->second;
                    pins.erase(it);
                    pins.emplace(r.new_name, std::move(value));
                }
                break;
            case RepairKind::insert_default: node_or_throw(r.node, r).pins[r.port] = r.value; break;
            case RepairKind::delete_edge: ++deletions[*r.edge]; break;
            case RepairKind::retarget_edge: {
                auto it = edge_or_throw(r);
                if (out.find(r.new_to->node) == nullptr || r.new_to->node == it->from.node) {
                    throw RepairError(fmt::format("{}: invalid target", r.id()));
                }
                it->to = *r.new_to;
                break;
            }
        }
    }
    for (const auto& [edge, count] : deletions) {
        for (int k = 0; k < count; ++k) {
            auto it = std::find(out.edges.begin(), out.edges.end(), edge);
            if (it == out.edges.end()) throw RepairError(fmt::format("delete_edge:{}: edge does not exist", to_string(edge)));
            out.edges.erase(it);
        }
    }
    return out;
}

}  // namespace sforge
