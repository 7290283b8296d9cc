#include "sforge/graph_ir.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <set>

namespace sforge {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

const ScriptNode* ScriptDocument::find(NodeId id) const {
    for (const auto& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

ScriptNode* ScriptDocument::find(NodeId id) {
    for (auto& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

namespace {

bool edge_order(const ScriptEdge& a, const ScriptEdge& b) {
    return std::tie(a.to.node, a.to.port, a.from.node, a.from.port) <
           std::tie(b.to.node, b.to.port, b.from.node, b.from.port);
}

}  // namespace

ScriptDocument canonicalized(ScriptDocument doc) {
    std::sort(doc.nodes.begin(), doc.nodes.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::sort(doc.edges.begin(), doc.edges.end(), edge_order);
    return doc;
}

bool ScriptDocument::operator==(const ScriptDocument& other) const {
    const auto a = canonicalized(*this);
    const auto b = canonicalized(other);
    return a.schema_version == b.schema_version && a.prompt == b.prompt && a.nodes == b.nodes && a.edges == b.edges;
}

ParseError::ParseError(Kind kind, std::string message, std::string path, std::optional<std::size_t> offset)
    : std::runtime_error(std::move(message)), kind_(kind), path_(std::move(path)), offset_(offset) {}

std::string_view to_string(ParseError::Kind k) {
    switch (k) {
        case ParseError::Kind::syntax: return "syntax";
        case ParseError::Kind::schema: return "schema";
        case ParseError::Kind::duplicate_id: return "duplicate-id";
        case ParseError::Kind::dangling_edge: return "dangling-edge";
        case ParseError::Kind::self_loop: return "self-loop";
    }
    return "?";
}

Position auto_layout_position(int depth, int row) { return {depth * kLayoutColumn, row * kLayoutRow}; }

namespace {

// ---------------------------------------------------------------------------
// Schema walker. Strict mode throws on anything off-schema; lenient mode coerces,
// renames or drops and records one diagnostic per fix.

struct KeyAliases {
    std::vector<std::string> canonical;
    std::map<std::string, std::string> aliases;  // lower-case alias -> canonical
};

const KeyAliases kRootKeys{{"schema_version", "prompt", "nodes", "edges"},
                           {{"schemaversion", "schema_version"},
                            {"version", "schema_version"},
                            {"components", "nodes"},
                            {"connections", "edges"},
                            {"links", "edges"},
                            {"wires", "edges"}}};
const KeyAliases kNodeKeys{{"id", "component", "position", "pins"},
                           {{"node_id", "id"},
                            {"nodeid", "id"},
                            {"name", "component"},
                            {"type", "component"},
                            {"component_name", "component"},
                            {"pos", "position"},
                            {"location", "position"},
                            {"values", "pins"},
                            {"params", "pins"},
                            {"parameters", "pins"}}};
const KeyAliases kEdgeKeys{{"from", "to"}, {{"source", "from"}, {"src", "from"}, {"target", "to"}, {"dst", "to"}}};
const KeyAliases kEndpointKeys{{"id", "port"},
                               {{"node", "id"},
                                {"node_id", "id"},
                                {"nodeid", "id"},
                                {"component", "id"},
                                {"param", "port"},
                                {"parameter", "port"}}};
const KeyAliases kPositionKeys{{"x", "y"}, {}};
const KeyAliases kSliderKeys{{"min", "max", "value"}, {{"minimum", "min"}, {"maximum", "max"}, {"val", "value"}}};

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::optional<double> parse_number_text(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

class Walker {
public:
    Walker(bool lenient, std::vector<Diagnostic>* diags) : lenient_(lenient), diags_(diags) {}

    ScriptDocument document(const json& root, std::vector<NodeId>* unplaced) {
        if (!root.is_object()) fail("$", "document must be a JSON object");
        auto fields = fields_of(root, kRootKeys, "$");
        ScriptDocument doc;

        if (auto it = fields.find("schema_version"); it != fields.end()) {
            const auto v = integer(*it->second, "$.schema_version");
            if (v != kSchemaVersion) fail("$.schema_version", fmt::format("unsupported schema_version {}", v));
        } else if (lenient_) {
            note("P8", Severity::info, {}, "missing schema_version, assumed 1");
        } else {
            fail("$.schema_version", "missing required key");
        }

        if (auto it = fields.find("prompt"); it != fields.end()) {
            if (it->second->is_string()) {
                doc.prompt = it->second->get<std::string>();
            } else if (lenient_ && it->second->is_null()) {
                note("P4", Severity::info, {}, "null prompt ignored");
            } else {
                fail("$.prompt", "expected a string");
            }
        }

        const json* nodes = field(fields, "nodes", "$");
        if (nodes != nullptr) {
            if (!nodes->is_array()) fail("$.nodes", "expected an array");
            for (std::size_t i = 0; i < nodes->size(); ++i) {
                bool placed = true;
                doc.nodes.push_back(node((*nodes)[i], fmt::format("$.nodes[{}]", i), &placed));
                if (!placed) unplaced->push_back(doc.nodes.back().id);
            }
        }

        std::set<NodeId> ids;
        for (const auto& n : doc.nodes) {
            if (!ids.insert(n.id).second) {
                throw ParseError(ParseError::Kind::duplicate_id, fmt::format("duplicate node id {}", n.id), "$.nodes");
            }
        }

        const json* edges = field(fields, "edges", "$");
        if (edges != nullptr) {
            if (!edges->is_array()) fail("$.edges", "expected an array");
            for (std::size_t i = 0; i < edges->size(); ++i) {
                const std::string path = fmt::format("$.edges[{}]", i);
                auto e = edge((*edges)[i], path);
                if (e.from.node == e.to.node) {
                    if (!lenient_) {
                        throw ParseError(ParseError::Kind::self_loop,
                                         fmt::format("{}: edge connects node {} to itself", path, e.from.node), path);
                    }
                    note("P7", Severity::warning, {.node = e.from.node, .edge = e}, "self-loop edge dropped");
                    continue;
                }
                for (NodeId end : {e.from.node, e.to.node}) {
                    if (ids.count(end) == 0) {
                        if (!lenient_) {
                            throw ParseError(ParseError::Kind::dangling_edge,
                                             fmt::format("{}: edge endpoint {} is not a node", path, end), path);
                        }
                    }
                }
                if (ids.count(e.from.node) == 0 || ids.count(e.to.node) == 0) {
                    note("P7", Severity::warning, {.edge = e},
                         fmt::format("edge {} dropped: endpoint is not a node", to_string(e)));
                    continue;
                }
                doc.edges.push_back(std::move(e));
            }
        }
        return doc;
    }

private:
    using Fields = std::map<std::string, const json*>;

    [[noreturn]] void fail(const std::string& path, const std::string& message) const {
        throw ParseError(ParseError::Kind::schema, path + ": " + message, path);
    }

    void note(const char* rule, Severity sev, Location loc, std::string message) const {
        if (diags_ != nullptr) diags_->push_back(make_diagnostic(rule, sev, std::move(loc), std::move(message)));
    }

    Fields fields_of(const json& obj, const KeyAliases& keys, const std::string& path) const {
        Fields out;
        std::vector<std::pair<std::string, const json*>> aliased;
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            const std::string& key = it.key();
            if (std::find(keys.canonical.begin(), keys.canonical.end(), key) != keys.canonical.end()) {
                out[key] = &it.value();
                continue;
            }
            if (!lenient_) fail(path, fmt::format("unknown key '{}'", key));
            const std::string low = lower(key);
            if (std::find(keys.canonical.begin(), keys.canonical.end(), low) != keys.canonical.end()) {
                aliased.emplace_back(low, &it.value());
                note("P6", Severity::info, {}, fmt::format("{}: key '{}' read as '{}'", path, key, low));
            } else if (auto a = keys.aliases.find(low); a != keys.aliases.end()) {
                aliased.emplace_back(a->second, &it.value());
                note("P6", Severity::info, {}, fmt::format("{}: key '{}' read as '{}'", path, key, a->second));
            } else {
                note("P4", Severity::info, {}, fmt::format("{}: unknown key '{}' ignored", path, key));
            }
        }
        for (auto& [key, value] : aliased) {
            if (!out.emplace(key, value).second) {
                note("P4", Severity::info, {}, fmt::format("{}: duplicate '{}' ignored", path, key));
            }
        }
        return out;
    }

    const json* field(const Fields& fields, const std::string& key, const std::string& path) const {
        if (auto it = fields.find(key); it != fields.end()) return it->second;
        if (!lenient_) fail(path, fmt::format("missing required key '{}'", key));
        note("P8", Severity::info, {}, fmt::format("{}: missing '{}', assumed empty", path, key));
        return nullptr;
    }

    double number(const json& j, const std::string& path) const {
        if (j.is_number()) return j.get<double>();
        if (lenient_ && j.is_string()) {
            if (auto v = parse_number_text(j.get<std::string>())) {
                note("P3", Severity::info, {}, fmt::format("{}: string '{}' coerced to number", path, j.get<std::string>()));
                return *v;
            }
        }
        fail(path, "expected a number");
    }

    std::int64_t integer(const json& j, const std::string& path) const {
        if (j.is_number_integer()) return j.get<std::int64_t>();
        if (j.is_number_float() || j.is_string()) {
            if (!lenient_) fail(path, "expected an integer");
            const double v = number(j, path);
            if (v != std::floor(v) || std::abs(v) > 9.0e15) fail(path, "expected an integer");
            if (j.is_number_float()) note("P3", Severity::info, {}, fmt::format("{}: {} read as integer", path, v));
            return static_cast<std::int64_t>(v);
        }
        fail(path, "expected an integer");
    }

    NodeId node_id(const json& j, const std::string& path) const {
        const auto id = integer(j, path);
        if (id <= 0) fail(path, "node id must be a positive integer");
        return id;
    }

    std::string text(const json& j, const std::string& path) const {
        if (!j.is_string()) fail(path, "expected a string");
        return j.get<std::string>();
    }

    ScriptNode node(const json& j, const std::string& path, bool* placed) const {
        if (!j.is_object()) fail(path, "node must be an object");
        auto fields = fields_of(j, kNodeKeys, path);
        ScriptNode n;
        auto require = [&](const char* key) -> const json& {
            auto it = fields.find(key);
            if (it == fields.end()) fail(path, fmt::format("missing required key '{}'", key));
            return *it->second;
        };
        n.id = node_id(require("id"), path + ".id");
        n.component = text(require("component"), path + ".component");
        if (n.component.find_first_not_of(" \t\r\n") == std::string::npos) {
            fail(path + ".component", "component name is empty");
        }

        if (auto it = fields.find("position"); it != fields.end()) {
            n.position = position(*it->second, path + ".position");
        } else if (lenient_) {
            *placed = false;
        } else {
            fail(path, "missing required key 'position'");
        }

        if (auto it = fields.find("pins"); it != fields.end()) {
            const json& pins = *it->second;
            if (lenient_ && pins.is_null()) {
                note("P4", Severity::info, {.node = n.id}, fmt::format("{}.pins: null ignored", path));
            } else {
                if (!pins.is_object()) fail(path + ".pins", "expected an object");
                for (auto p = pins.begin(); p != pins.end(); ++p) {
                    const std::string ppath = fmt::format("{}.pins.{}", path, p.key());
                    if (lenient_ && p.value().is_null()) {
                        note("P4", Severity::info, {.node = n.id, .port = p.key()}, ppath + ": null pin ignored");
                        continue;
                    }
                    n.pins.emplace(p.key(), pin(p.value(), ppath, n.id, p.key()));
                }
            }
        }
        return n;
    }

    Position position(const json& j, const std::string& path) const {
        if (lenient_ && j.is_array() && j.size() == 2) {
            note("P3", Severity::info, {}, path + ": [x, y] array read as position");
            return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
        }
        if (!j.is_object()) fail(path, "expected an object with x and y");
        auto fields = fields_of(j, kPositionKeys, path);
        if (!fields.count("x") || !fields.count("y")) fail(path, "position needs x and y");
        return {number(*fields.at("x"), path + ".x"), number(*fields.at("y"), path + ".y")};
    }

    PinnedValue pin(const json& j, const std::string& path, NodeId node, const std::string& port) const {
        if (j.is_number()) return j.get<double>();
        if (j.is_string()) return j.get<std::string>();
        if (!j.is_object()) fail(path, "pin must be a number, a string or a slider object");

        const json* body = nullptr;
        if (j.size() == 1 && j.contains("slider")) {
            body = &j.at("slider");
        } else if (lenient_ && j.contains("slider")) {
            body = &j.at("slider");
            note("P4", Severity::info, {.node = node, .port = port}, path + ": keys beside 'slider' ignored");
        } else if (lenient_ && (j.contains("min") || j.contains("max") || j.contains("value"))) {
            body = &j;
            note("P3", Severity::info, {.node = node, .port = port}, path + ": bare slider object accepted");
        } else {
            fail(path, "object pins must be {\"slider\": {...}}");
        }
        if (!body->is_object()) fail(path + ".slider", "expected an object");
        const std::string spath = body == &j ? path : path + ".slider";
        auto fields = fields_of(*body, kSliderKeys, spath);
        for (const char* key : {"min", "max", "value"}) {
            if (!fields.count(key)) fail(spath, fmt::format("slider needs '{}'", key));
        }
        SliderPin s{number(*fields.at("min"), spath + ".min"), number(*fields.at("max"), spath + ".max"),
                    number(*fields.at("value"), spath + ".value")};
        if (s.min > s.max) {
            if (!lenient_) fail(spath, "slider min exceeds max");
            std::swap(s.min, s.max);
            note("P10", Severity::warning, {.node = node, .port = port}, spath + ": slider min and max swapped");
        }
        if (s.value < s.min || s.value > s.max) {
            if (!lenient_) fail(spath, "slider value outside [min, max]");
            const double clamped = std::clamp(s.value, s.min, s.max);
            note("P10", Severity::warning, {.node = node, .port = port},
                 fmt::format("{}: slider value {} clamped to {}", spath, s.value, clamped));
            s.value = clamped;
        }
        return s;
    }

    ScriptEdge edge(const json& j, const std::string& path) const {
        if (!j.is_object()) fail(path, "edge must be an object");
        auto fields = fields_of(j, kEdgeKeys, path);
        if (!fields.count("from") || !fields.count("to")) fail(path, "edge needs 'from' and 'to'");
        return {endpoint(*fields.at("from"), path + ".from"), endpoint(*fields.at("to"), path + ".to")};
    }

    Endpoint endpoint(const json& j, const std::string& path) const {
        if (!j.is_object()) fail(path, "endpoint must be an object with id and port");
        auto fields = fields_of(j, kEndpointKeys, path);
        if (!fields.count("id") || !fields.count("port")) fail(path, "endpoint needs 'id' and 'port'");
        return {node_id(*fields.at("id"), path + ".id"), text(*fields.at("port"), path + ".port")};
    }

    bool lenient_;
    std::vector<Diagnostic>* diags_;
};

std::map<NodeId, int> longest_path_depths(const ScriptDocument& doc) {
    std::map<NodeId, int> depth;
    std::map<NodeId, int> indegree;
    std::map<NodeId, std::vector<NodeId>> succ;
    for (const auto& n : doc.nodes) {
        depth[n.id] = 0;
        indegree[n.id] = 0;
    }
    for (const auto& e : doc.edges) {
        succ[e.from.node].push_back(e.to.node);
        ++indegree[e.to.node];
    }
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (const auto& [id, deg] : indegree) {
        if (deg == 0) ready.push(id);
    }
    std::set<NodeId> done;
    int deepest = 0;
    while (!ready.empty()) {
        const NodeId id = ready.top();
        ready.pop();
        done.insert(id);
        deepest = std::max(deepest, depth[id]);
        for (NodeId next : succ[id]) {
            depth[next] = std::max(depth[next], depth[id] + 1);
            if (--indegree[next] == 0) ready.push(next);
        }
    }
    // Nodes stuck on a cycle get a column of their own past everything else.
    for (auto& [id, d] : depth) {
        if (done.count(id) == 0) d = deepest + 1;
    }
    return depth;
}

void apply_auto_layout(ScriptDocument& doc, const std::vector<NodeId>& unplaced, std::vector<Diagnostic>& diags) {
    if (unplaced.empty()) return;
    const auto depth = longest_path_depths(doc);
    std::map<int, std::vector<NodeId>> columns;
    for (const auto& [id, d] : depth) columns[d].push_back(id);
    std::map<NodeId, Position> slot;
    for (const auto& [d, ids] : columns) {
        for (std::size_t row = 0; row < ids.size(); ++row) slot[ids[row]] = auto_layout_position(d, static_cast<int>(row));
    }
    for (NodeId id : unplaced) {
        auto* n = doc.find(id);
        n->position = slot.at(id);
        diags.push_back(make_diagnostic("P5", Severity::info, {.node = id},
                                        fmt::format("node {} has no position, placed at ({}, {})", id,
                                                    n->position.x, n->position.y)));
    }
}

std::string strip_fences(std::string_view text, std::size_t* offset, bool* stripped) {
    std::size_t begin = text.find_first_not_of(" \t\r\n");
    *stripped = false;
    *offset = 0;
    if (begin == std::string_view::npos || text.substr(begin, 3) != "```") return std::string(text);
    const std::size_t eol = text.find('\n', begin);
    if (eol == std::string_view::npos) return std::string(text);
    std::size_t end = text.rfind("```");
    if (end <= eol) end = text.size();
    *stripped = true;
    *offset = eol + 1;
    return std::string(text.substr(eol + 1, end - eol - 1));
}

// Removes commas that directly precede a closing bracket, outside strings.
std::string drop_trailing_commas(const std::string& text, std::vector<std::size_t>* removed) {
    std::string out;
    out.reserve(text.size());
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            out.push_back(c);
            if (c == '\\' && i + 1 < text.size()) {
                out.push_back(text[++i]);
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') in_string = true;
        if (c == ',') {
            std::size_t k = i + 1;
            while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
            if (k < text.size() && (text[k] == '}' || text[k] == ']')) {
                removed->push_back(i);
                continue;
            }
        }
        out.push_back(c);
    }
    return out;
}

std::optional<json> try_parse(const std::string& text, bool comments, std::size_t* error_byte) {
    try {
        return json::parse(text, nullptr, true, comments);
    } catch (const json::parse_error& e) {
        if (error_byte != nullptr) *error_byte = e.byte == 0 ? 0 : e.byte - 1;
        return std::nullopt;
    }
}

}  // namespace

ScriptDocument document_from_json(const json& j) {
    std::vector<NodeId> unplaced;
    return Walker(false, nullptr).document(j, &unplaced);
}

ScriptDocument parse_document_strict(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t at = e.byte == 0 ? 0 : e.byte - 1;
        throw ParseError(ParseError::Kind::syntax, fmt::format("syntax error at byte {}: {}", at, e.what()), "$", at);
    }
    return document_from_json(j);
}

TolerantParse parse_document_tolerant(std::string_view text) {
    TolerantParse out;
    std::size_t fence_offset = 0;
    bool fenced = false;
    std::string body = strip_fences(text, &fence_offset, &fenced);
    if (fenced) out.diagnostics.push_back(make_diagnostic("P1", Severity::info, {}, "code fence stripped"));

    std::size_t error_byte = 0;
    auto j = try_parse(body, false, &error_byte);
    if (!j) {
        j = try_parse(body, true, nullptr);
        if (j) out.diagnostics.push_back(make_diagnostic("P9", Severity::info, {}, "comments ignored"));
    }
    if (!j) {
        std::vector<std::size_t> removed;
        const std::string fixed = drop_trailing_commas(body, &removed);
        if (!removed.empty()) {
            j = try_parse(fixed, true, nullptr);
            if (j) {
                for (std::size_t at : removed) {
                    out.diagnostics.push_back(make_diagnostic(
                        "P2", Severity::info, {}, fmt::format("trailing comma at byte {} removed", at + fence_offset)));
                }
            }
        }
    }
    if (!j) {
        const std::size_t at = error_byte + fence_offset;
        throw ParseError(ParseError::Kind::syntax,
                         fmt::format("unrecoverable syntax error; longest valid prefix ends at byte {}", at), "$", at);
    }

    std::vector<NodeId> unplaced;
    out.document = Walker(true, &out.diagnostics).document(*j, &unplaced);
    apply_auto_layout(out.document, unplaced, out.diagnostics);
    return out;
}

ojson document_to_json(const ScriptDocument& doc) {
    const ScriptDocument c = canonicalized(doc);
    ojson j;
    j["schema_version"] = c.schema_version;
    if (c.prompt) j["prompt"] = *c.prompt;
    j["nodes"] = ojson::array();
    for (const auto& n : c.nodes) {
        ojson node;
        node["id"] = n.id;
        node["component"] = n.component;
        node["position"] = {{"x", n.position.x}, {"y", n.position.y}};
        ojson pins = ojson::object();
        for (const auto& [port, value] : n.pins) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, SliderPin>) {
                        ojson s;
                        s["min"] = v.min;
                        s["max"] = v.max;
                        s["value"] = v.value;
                        pins[port] = {{"slider", s}};
                    } else {
                        pins[port] = v;
                    }
                },
                value);
        }
        node["pins"] = std::move(pins);
        j["nodes"].push_back(std::move(node));
    }
    j["edges"] = ojson::array();
    for (const auto& e : c.edges) j["edges"].push_back(to_json(e));
    return j;
}

std::string serialize(const ScriptDocument& doc) { return document_to_json(doc).dump(); }

// ---------------------------------------------------------------------------
// Graph construction

CycleError::CycleError(std::vector<NodeId> cycle)
    : std::runtime_error([&] {
          std::string ids;
          for (std::size_t i = 0; i < cycle.size(); ++i) ids += (i ? ", " : "") + std::to_string(cycle[i]);
          return "cycle detected through nodes " + ids;
      }()),
      cycle_(std::move(cycle)) {}

bool ScriptGraph::contains(NodeId id) const {
    return std::binary_search(nodes_.begin(), nodes_.end(), id,
                              [](const auto& a, const auto& b) {
                                  if constexpr (std::is_same_v<std::decay_t<decltype(a)>, GraphNode>) {
                                      return a.id < b;
                                  } else {
                                      return a < b.id;
                                  }
                              });
}

std::size_t ScriptGraph::index_of(NodeId id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id, [](const GraphNode& n, NodeId v) { return n.id < v; });
    if (it == nodes_.end() || it->id != id) throw std::out_of_range(fmt::format("no node {}", id));
    return static_cast<std::size_t>(it - nodes_.begin());
}

const GraphNode& ScriptGraph::node(NodeId id) const { return nodes_[index_of(id)]; }
const std::vector<std::size_t>& ScriptGraph::in_edges(NodeId id) const { return in_[index_of(id)]; }
const std::vector<std::size_t>& ScriptGraph::out_edges(NodeId id) const { return out_[index_of(id)]; }

struct GraphBuilder {
    static BuildResult build(const ScriptDocument& source, const Catalog& catalog) {
        BuildResult result;
        ScriptGraph& g = result.graph;
        auto doc = std::make_shared<ScriptDocument>(canonicalized(source));
        g.doc_ = doc;
        g.catalog_ = &catalog;

        for (std::size_t i = 1; i < doc->nodes.size(); ++i) {
            if (doc->nodes[i].id == doc->nodes[i - 1].id) {
                throw ParseError(ParseError::Kind::duplicate_id, fmt::format("duplicate node id {}", doc->nodes[i].id));
            }
        }

        for (const auto& n : doc->nodes) {
            GraphNode gn;
            gn.id = n.id;
            gn.raw_component = n.component;
            gn.source = &n;
            gn.resolution = resolve_name(catalog, n.component);
            if (gn.resolution.match) gn.spec = &catalog.at(gn.resolution.match->index);
            if (gn.resolution.kind == MatchKind::fuzzy) {
                result.diagnostics.push_back(make_diagnostic(
                    "N1", Severity::warning, {.node = n.id},
                    fmt::format("component '{}' resolved to '{}' (edit distance {})", n.component,
                                gn.spec->canonical_name, gn.resolution.match->distance)));
            } else if (gn.resolution.kind == MatchKind::unknown) {
                result.diagnostics.push_back(make_diagnostic(
                    "N2", Severity::info, {.node = n.id},
                    fmt::format("component '{}' is not in the catalog, kept as a placeholder", n.component)));
            }
            g.nodes_.push_back(std::move(gn));
        }

        g.in_.resize(g.nodes_.size());
        g.out_.resize(g.nodes_.size());
        for (std::size_t i = 0; i < doc->edges.size(); ++i) {
            const auto& e = doc->edges[i];
            if (!g.contains(e.from.node) || !g.contains(e.to.node)) {
                throw ParseError(ParseError::Kind::dangling_edge, fmt::format("edge {} has a missing endpoint", to_string(e)));
            }
            if (e.from.node == e.to.node) throw CycleError({e.from.node});
            GraphEdge ge;
            ge.ref = e;
            ge.occurrence = (i > 0 && doc->edges[i - 1] == e) ? g.edges_.back().occurrence + 1 : 0;
            const auto& from = g.node(e.from.node);
            const auto& to = g.node(e.to.node);
            if (from.spec) ge.from_port = port_of(*from.spec, Side::out, e.from.port);
            if (to.spec) ge.to_port = port_of(*to.spec, Side::in, e.to.port);
            g.out_[g.index_of(e.from.node)].push_back(g.edges_.size());
            g.in_[g.index_of(e.to.node)].push_back(g.edges_.size());
            g.edges_.push_back(std::move(ge));
        }

        g.order_ = kahn(g);
        return result;
    }

    static std::vector<NodeId> kahn(const ScriptGraph& g) {
        const std::size_t n = g.nodes_.size();
        std::vector<int> indegree(n, 0);
        for (const auto& e : g.edges_) ++indegree[g.index_of(e.ref.to.node)];
        std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
        for (std::size_t i = 0; i < n; ++i) {
            if (indegree[i] == 0) ready.push(g.nodes_[i].id);
        }
        std::vector<NodeId> order;
        order.reserve(n);
        while (!ready.empty()) {
            const NodeId id = ready.top();
            ready.pop();
            order.push_back(id);
            for (std::size_t ei : g.out_[g.index_of(id)]) {
                const std::size_t t = g.index_of(g.edges_[ei].ref.to.node);
                if (--indegree[t] == 0) ready.push(g.nodes_[t].id);
            }
        }
        if (order.size() != n) throw CycleError(find_cycle(g, indegree));
        return order;
    }

    // Walks predecessors among the nodes Kahn could not release; every such node has one,
    // so the walk must revisit a node, and the revisited stretch is a cycle.
    static std::vector<NodeId> find_cycle(const ScriptGraph& g, const std::vector<int>& indegree) {
        std::size_t start = 0;
        while (indegree[start] == 0) ++start;
        std::vector<std::size_t> path;
        std::map<std::size_t, std::size_t> seen;
        std::size_t cur = start;
        while (!seen.count(cur)) {
            seen[cur] = path.size();
            path.push_back(cur);
            std::size_t pred = cur;
            for (std::size_t ei : g.in_[cur]) {
                const std::size_t f = g.index_of(g.edges_[ei].ref.from.node);
                if (indegree[f] > 0) {
                    pred = f;
                    break;
                }
            }
            cur = pred;
        }
        std::vector<NodeId> cycle;
        for (std::size_t i = seen[cur]; i < path.size(); ++i) cycle.push_back(g.nodes_[path[i]].id);
        std::reverse(cycle.begin(), cycle.end());
        const auto smallest = std::min_element(cycle.begin(), cycle.end());
        std::rotate(cycle.begin(), smallest, cycle.end());
        return cycle;
    }
};

BuildResult build_graph(const ScriptDocument& doc, const Catalog& catalog) { return GraphBuilder::build(doc, catalog); }

std::vector<NodeId> topo_order(const ScriptGraph& graph) { return graph.order(); }

std::optional<std::string> pin_key_for(const ScriptNode& node, const ComponentSpec& spec, std::string_view port) {
    std::optional<std::string> fuzzy;
    for (const auto& [key, value] : node.pins) {
        const auto r = port_of(spec, Side::in, key);
        if (!r.match || spec.inputs[r.match->index].name != port) continue;
        if (r.kind == MatchKind::exact) return key;
        if (!fuzzy) fuzzy = key;
    }
    return fuzzy;
}

}  // namespace sforge
