#include "sforge/registry.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sforge {

using json = nlohmann::json;

std::string_view to_string(ValueKind k) {
    switch (k) {
        case ValueKind::number: return "number";
        case ValueKind::integer: return "integer";
        case ValueKind::point: return "point";
        case ValueKind::vector: return "vector";
        case ValueKind::curve: return "curve";
        case ValueKind::surface: return "surface";
        case ValueKind::geometry_any: return "geometry-any";
        case ValueKind::any: return "any";
        case ValueKind::text: return "text";
    }
    return "?";
}

std::string_view to_string(Cardinality c) { return c == Cardinality::scalar ? "scalar" : "list"; }

std::string_view to_string(Category c) {
    switch (c) {
        case Category::params: return "params";
        case Category::maths: return "maths";
        case Category::vector: return "vector";
        case Category::curve: return "curve";
        case Category::surface: return "surface";
        case Category::transform: return "transform";
        case Category::sets: return "sets";
    }
    return "?";
}

std::optional<ValueKind> parse_value_kind(std::string_view s) {
    for (auto k : {ValueKind::number, ValueKind::integer, ValueKind::point, ValueKind::vector, ValueKind::curve,
                   ValueKind::surface, ValueKind::geometry_any, ValueKind::any, ValueKind::text}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

std::optional<Cardinality> parse_cardinality(std::string_view s) {
    if (s == "scalar") return Cardinality::scalar;
    if (s == "list") return Cardinality::list;
    return std::nullopt;
}

std::optional<Category> parse_category(std::string_view s) {
    for (auto c : {Category::params, Category::maths, Category::vector, Category::curve, Category::surface,
                   Category::transform, Category::sets}) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

bool kind_accepts(ValueKind from, ValueKind to) {
    if (from == to) return true;
    if (to == ValueKind::any) return true;
    if (from == ValueKind::integer && to == ValueKind::number) return true;
    if (to == ValueKind::geometry_any) {
        return from == ValueKind::point || from == ValueKind::curve || from == ValueKind::surface;
    }
    return false;
}

bool is_drawable(ValueKind k) {
    return k == ValueKind::point || k == ValueKind::curve || k == ValueKind::surface ||
           k == ValueKind::geometry_any;
}

Catalog::Catalog(std::string version, std::vector<ComponentSpec> components)
    : version_(std::move(version)), components_(std::move(components)) {}

const ComponentSpec* Catalog::find(std::string_view canonical_name) const {
    for (const auto& c : components_) {
        if (c.canonical_name == canonical_name) return &c;
    }
    return nullptr;
}

std::string normalize_name(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char ch : raw) {
        if (ch == ' ' || ch == '-' || ch == '_' || ch == '\t' || ch == '\n' || ch == '\r') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

int edit_distance(std::string_view a, std::string_view b) {
    std::vector<int> prev(b.size() + 1);
    std::vector<int> cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

namespace {

// Shared policy for components and ports: exact on a normalized name, fuzzy when a unique
// entry sits within the threshold, otherwise unknown with the nearest few.
template <class Entry, class NamesOf, class KeyOf>
Resolution resolve_among(const std::vector<Entry>& entries, std::string_view raw, NamesOf names_of,
                         KeyOf key_of) {
    const std::string needle = normalize_name(raw);
    std::vector<NameMatch> scored;
    scored.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        int best = std::numeric_limits<int>::max();
        for (const auto& name : names_of(entries[i])) best = std::min(best, edit_distance(needle, normalize_name(name)));
        scored.push_back({i, best});
    }
    std::sort(scored.begin(), scored.end(), [&](const NameMatch& a, const NameMatch& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return key_of(entries[a.index]) < key_of(entries[b.index]);
    });

    Resolution r;
    if (needle.empty() || scored.empty()) {
        r.kind = MatchKind::unknown;
        return r;
    }
    const NameMatch& top = scored.front();
    bool unique = scored.size() == 1 || scored[1].distance > top.distance;
    if (top.distance == 0) {
        r.kind = MatchKind::exact;
        r.match = top;
    } else if (top.distance <= kFuzzyThreshold && unique) {
        r.kind = MatchKind::fuzzy;
        r.match = top;
    } else {
        r.kind = MatchKind::unknown;
        for (std::size_t i = 0; i < std::min<std::size_t>(3, scored.size()); ++i) r.nearest.push_back(scored[i]);
    }
    return r;
}

std::vector<std::string> component_names(const ComponentSpec& c) {
    std::vector<std::string> names{c.canonical_name};
    if (!c.display_name.empty() && c.display_name != c.canonical_name) names.push_back(c.display_name);
    names.insert(names.end(), c.aliases.begin(), c.aliases.end());
    return names;
}

std::vector<std::string> port_names(const PortSpec& p) {
    std::vector<std::string> names{p.name};
    names.insert(names.end(), p.aliases.begin(), p.aliases.end());
    return names;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw CatalogError(fmt::format("{}: {}", where, what));
}

std::array<double, 3> triple(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) fail(where, "expected [x, y, z]");
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (!j[i].is_number()) fail(where, "expected numeric coordinates");
        out[i] = j[i].get<double>();
    }
    return out;
}

GeomValue parse_default(const json& j, ValueKind kind, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return Text{j.get<std::string>()};
    if (j.is_object() && j.size() == 1) {
        if (j.contains("point")) {
            auto t = triple(j["point"], where);
            return Point{t[0], t[1], t[2]};
        }
        if (j.contains("vector")) {
            auto t = triple(j["vector"], where);
            return Vector{t[0], t[1], t[2]};
        }
    }
    fail(where, fmt::format("unsupported default for kind {}", to_string(kind)));
}

json default_to_json(const GeomValue& v) {
    if (auto* d = v.get_if<double>()) return *d;
    if (auto* t = v.get_if<Text>()) return t->value;
    if (auto* p = v.get_if<Point>()) return json{{"point", {p->x, p->y, p->z}}};
    if (auto* q = v.get_if<Vector>()) return json{{"vector", {q->x, q->y, q->z}}};
    return nullptr;
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
    std::vector<std::string> out;
    if (j.is_null()) return out;
    if (!j.is_array()) fail(where, "aliases must be an array of strings");
    for (const auto& s : j) {
        if (!s.is_string()) fail(where, "aliases must be an array of strings");
        out.push_back(s.get<std::string>());
    }
    return out;
}

PortSpec parse_port(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "port must be an object");
    PortSpec p;
    if (!j.contains("name") || !j["name"].is_string() || j["name"].get<std::string>().empty()) {
        fail(where, "port needs a non-empty name");
    }
    p.name = j["name"].get<std::string>();
    const std::string at = fmt::format("{} port '{}'", where, p.name);
    p.aliases = string_list(j.value("aliases", json()), at);
    auto kind = parse_value_kind(j.value("kind", ""));
    if (!kind) fail(at, fmt::format("unknown kind '{}'", j.value("kind", "")));
    p.kind = *kind;
    auto card = parse_cardinality(j.value("cardinality", "scalar"));
    if (!card) fail(at, "cardinality must be scalar or list");
    p.cardinality = *card;
    p.required = j.value("required", false);
    if (j.contains("default")) {
        if (p.required) fail(at, "required port cannot carry a default");
        p.default_value = parse_default(j["default"], p.kind, at);
    }
    if (j.contains("suggest")) {
        if (!j["suggest"].is_number()) fail(at, "suggest must be a number");
        p.suggested = j["suggest"].get<double>();
    }
    p.group = j.value("group", "");
    return p;
}

bool catalog_has_canonical(const std::vector<ComponentSpec>& comps, const std::string& canonical,
                           const std::string& key) {
    return std::any_of(comps.begin(), comps.end(), [&](const ComponentSpec& c) {
        return c.canonical_name == canonical && normalize_name(c.canonical_name) == key;
    });
}

void check_port_names(const std::vector<PortSpec>& ports, const std::string& where) {
    std::set<std::string> seen;
    for (const auto& p : ports) {
        for (const auto& n : port_names(p)) {
            if (!seen.insert(normalize_name(n)).second) fail(where, fmt::format("duplicate port name '{}'", n));
        }
    }
}

}  // namespace

Resolution resolve_name(const Catalog& catalog, std::string_view raw) {
    return resolve_among(catalog.components(), raw, component_names,
                         [](const ComponentSpec& c) -> const std::string& { return c.canonical_name; });
}

Resolution port_of(const ComponentSpec& spec, Side side, std::string_view raw) {
    return resolve_among(spec.ports(side), raw, port_names, [](const PortSpec& p) -> const std::string& { return p.name; });
}

Catalog load_catalog(const json& doc) {
    if (!doc.is_object()) throw CatalogError("catalog: expected a JSON object");
    if (!doc.contains("components") || !doc["components"].is_array()) {
        throw CatalogError("catalog: missing 'components' array");
    }
    std::string version = doc.value("version", "");
    std::vector<ComponentSpec> comps;
    std::map<std::string, std::string> owner;  // normalized name -> canonical
    for (std::size_t i = 0; i < doc["components"].size(); ++i) {
        const json& j = doc["components"][i];
        std::string where = fmt::format("component #{}", i);
        if (!j.is_object() || !j.contains("name") || !j["name"].is_string() || j["name"].get<std::string>().empty()) {
            fail(where, "needs a non-empty name");
        }
        ComponentSpec c;
        c.canonical_name = j["name"].get<std::string>();
        where = fmt::format("component '{}'", c.canonical_name);
        c.display_name = j.value("display_name", c.canonical_name);
        c.aliases = string_list(j.value("aliases", json()), where);
        auto cat = parse_category(j.value("category", ""));
        if (!cat) fail(where, fmt::format("unknown category '{}'", j.value("category", "")));
        c.category = *cat;
        for (const char* side : {"inputs", "outputs"}) {
            if (!j.contains(side)) continue;
            if (!j[side].is_array()) fail(where, fmt::format("'{}' must be an array", side));
            auto& dest = std::string_view(side) == "inputs" ? c.inputs : c.outputs;
            for (const auto& pj : j[side]) dest.push_back(parse_port(pj, where));
        }
        if (c.outputs.empty()) fail(where, "every component needs at least one output");
        check_port_names(c.inputs, where + " inputs");
        check_port_names(c.outputs, where + " outputs");

        std::set<std::string> literal;
        for (const auto& n : component_names(c)) {
            if (!literal.insert(n).second) fail(where, fmt::format("duplicate alias '{}'", n));
            auto [it, fresh] = owner.emplace(normalize_name(n), c.canonical_name);
            if (fresh || it->second == c.canonical_name) continue;
            if (n == c.canonical_name && catalog_has_canonical(comps, it->second, normalize_name(n))) {
                fail(where, "duplicate canonical name");
            }
            fail(where, fmt::format("name or alias '{}' already used by '{}'", n, it->second));
        }
        comps.push_back(std::move(c));
    }
    return Catalog(std::move(version), std::move(comps));
}

Catalog load_catalog_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CatalogError(fmt::format("catalog: cannot open '{}'", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
        doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw CatalogError(fmt::format("catalog '{}': {}", path.string(), e.what()));
    }
    return load_catalog(doc);
}

const Catalog& builtin_catalog() {
    static const Catalog catalog = load_catalog(json::parse(builtin_catalog_json()));
    return catalog;
}

nlohmann::ordered_json catalog_to_json(const Catalog& catalog) {
    using ojson = nlohmann::ordered_json;
    auto port_json = [](const PortSpec& p) {
        ojson j;
        j["name"] = p.name;
        if (!p.aliases.empty()) j["aliases"] = p.aliases;
        j["kind"] = to_string(p.kind);
        j["cardinality"] = to_string(p.cardinality);
        j["required"] = p.required;
        if (p.default_value) j["default"] = ojson::parse(default_to_json(*p.default_value).dump());
        if (p.suggested) j["suggest"] = *p.suggested;
        if (!p.group.empty()) j["group"] = p.group;
        return j;
    };
    ojson out;
    out["version"] = catalog.version();
    out["components"] = ojson::array();
    for (const auto& c : catalog.components()) {
        ojson j;
        j["name"] = c.canonical_name;
        if (c.display_name != c.canonical_name) j["display_name"] = c.display_name;
        j["aliases"] = c.aliases;
        j["category"] = to_string(c.category);
        j["inputs"] = ojson::array();
        for (const auto& p : c.inputs) j["inputs"].push_back(port_json(p));
        j["outputs"] = ojson::array();
        for (const auto& p : c.outputs) j["outputs"].push_back(port_json(p));
        out["components"].push_back(std::move(j));
    }
    return out;
}

}  // namespace sforge
