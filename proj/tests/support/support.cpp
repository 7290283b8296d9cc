#include "support.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sforge::testing {

std::filesystem::path source_dir() { return SFORGE_SOURCE_DIR; }

std::filesystem::path fixture_path(const std::string& name) {
    return source_dir() / "fixtures" / (name + ".pscript.json");
}

std::filesystem::path mock_dir() { return source_dir() / "fixtures" / "mock"; }

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScriptDocument load_fixture(const std::string& name) { return parse_document_strict(read_text(fixture_path(name))); }

namespace {

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
double uniform_real(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}
bool coin(std::mt19937_64& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
    return items[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(items.size()) - 1))];
}

std::string random_text(std::mt19937_64& rng) {
    static const std::vector<std::string> pieces{"a", "Z", " ", "\"", "\\", "/", "\n", "\t", "é", "日本", "{", "}",
                                                 ",", ":", "0", "x", "//", "/*", " ", "null"};
    std::string s;
    const int n = uniform_int(rng, 1, 8);
    for (int i = 0; i < n; ++i) s += pick(rng, pieces);
    return s;
}

double random_number(std::mt19937_64& rng) {
    switch (uniform_int(rng, 0, 4)) {
        case 0: return uniform_int(rng, -1000, 1000);
        case 1: return uniform_real(rng, -1e6, 1e6);
        case 2: return uniform_real(rng, -1.0, 1.0) * 1e-12;
        case 3: return 0.0;
        default: return uniform_real(rng, -5.0, 5.0);
    }
}

}  // namespace

ScriptDocument random_document(std::mt19937_64& rng) {
    const auto& catalog = builtin_catalog();
    ScriptDocument doc;
    if (coin(rng)) doc.prompt = random_text(rng);
    const int n = uniform_int(rng, 0, 12);
    std::set<NodeId> used;
    std::vector<NodeId> ids;
    while (static_cast<int>(ids.size()) < n) {
        const NodeId id = coin(rng, 0.8) ? uniform_int(rng, 1, 40) : uniform_int(rng, 1, 2'000'000'000);
        if (used.insert(id).second) ids.push_back(id);
    }
    for (NodeId id : ids) {
        ScriptNode node;
        node.id = id;
        node.component = coin(rng, 0.8) ? catalog.at(uniform_int(rng, 0, static_cast<int>(catalog.size()) - 1)).canonical_name
                                         : random_text(rng) + "c";  // never blank
        node.position = {random_number(rng), random_number(rng)};
        const int pins = uniform_int(rng, 0, 3);
        for (int i = 0; i < pins; ++i) {
            const std::string key = coin(rng) ? pick(rng, std::vector<std::string>{"N", "X", "Radius", "Start", "Count"})
                                              : random_text(rng) + "c";  // never blank
            switch (uniform_int(rng, 0, 2)) {
                case 0: node.pins[key] = random_number(rng); break;
                case 1: node.pins[key] = random_text(rng); break;
                default: {
                    double a = random_number(rng);
                    double b = random_number(rng);
                    if (a > b) std::swap(a, b);
                    node.pins[key] = SliderPin{a, b, coin(rng) ? a : uniform_real(rng, a, b)};
                }
            }
        }
        doc.nodes.push_back(std::move(node));
    }
    if (ids.size() >= 2) {
        const int edges = uniform_int(rng, 0, 2 * static_cast<int>(ids.size()));
        for (int i = 0; i < edges; ++i) {
            const NodeId a = pick(rng, ids);
            const NodeId b = pick(rng, ids);
            if (a == b) continue;
            const std::vector<std::string> ports{"N", "Pt", "L", "Start", "End", "Geometry", "D1", random_text(rng)};
            doc.edges.push_back({{a, pick(rng, ports)}, {b, pick(rng, ports)}});
        }
    }
    std::shuffle(doc.nodes.begin(), doc.nodes.end(), rng);
    return doc;
}

namespace {

// What a source output is known to carry, beyond its static kind.
enum class Tag { pos_number, pos_integer, number_list, unit_list, point, point_list, vector, curve, surface, text };

struct Source {
    Endpoint at;
    Tag tag;
};

struct Builder {
    std::mt19937_64& rng;
    GeneratedGraph out;
    std::vector<Source> pool;
    NodeId next{1};

    ScriptNode& add(const std::string& component) {
        ScriptNode n;
        n.id = next++;
        n.component = component;
        out.document.nodes.push_back(std::move(n));
        return out.document.nodes.back();
    }

    void provide(NodeId id, const std::string& port, Tag tag) { pool.push_back({{id, port}, tag}); }

    void connect(const Endpoint& from, NodeId to, const std::string& port) {
        out.document.edges.push_back({from, {to, port}});
    }

    std::vector<Source> having(std::initializer_list<Tag> tags) const {
        std::vector<Source> found;
        for (const auto& s : pool) {
            for (Tag t : tags) {
                if (s.tag == t) found.push_back(s);
            }
        }
        return found;
    }

    NodeId slider(bool integer) {
        const double lo = integer ? uniform_int(rng, 1, 3) : uniform_real(rng, 0.5, 3.0);
        const double hi = lo + (integer ? uniform_int(rng, 0, 4) : uniform_real(rng, 0.0, 6.0));
        const double v = integer ? uniform_int(rng, static_cast<int>(lo), static_cast<int>(hi)) : uniform_real(rng, lo, hi);
        ScriptNode& n = add("Number Slider");
        n.pins["N"] = SliderPin{lo, hi, v};
        const NodeId id = n.id;
        provide(id, "N", integer ? Tag::pos_integer : Tag::pos_number);
        return id;
    }

    // A source with one of the tags, creating the simplest producer when none exists yet.
    Endpoint source(std::initializer_list<Tag> tags, Tag fallback) {
        auto found = having(tags);
        if (!found.empty() && coin(rng, 0.8)) return pick(rng, found).at;
        return make(fallback);
    }

    Endpoint make(Tag tag) {
        switch (tag) {
            case Tag::pos_integer: return {slider(true), "N"};
            case Tag::pos_number: return {slider(coin(rng, 0.3)), "N"};
            case Tag::point: {
                const NodeId id = construct_point(false);
                return {id, "Pt"};
            }
            case Tag::vector: {
                const NodeId id = unit_vector();
                return {id, "V"};
            }
            case Tag::curve: {
                const NodeId id = circle();
                return {id, "C"};
            }
            default: throw std::logic_error("no default producer");
        }
    }

    void numeric_port(ScriptNode& node, const std::string& port, std::initializer_list<Tag> tags, bool integer) {
        const NodeId id = node.id;
        switch (uniform_int(rng, 0, 2)) {
            case 0: return;  // catalog default
            case 1:
                node.pins[port] = integer ? static_cast<double>(uniform_int(rng, 1, 4)) : uniform_real(rng, 0.5, 4.0);
                return;
            default: {
                const Endpoint from = source(tags, integer ? Tag::pos_integer : Tag::pos_number);
                connect(from, id, port);
            }
        }
    }

    NodeId construct_point(bool lists) {
        const NodeId id = add("Construct Point").id;
        for (const char* axis : {"X", "Y", "Z"}) {
            auto& node = *out.document.find(id);
            if (lists) {
                numeric_port(node, axis, {Tag::pos_number, Tag::pos_integer, Tag::number_list, Tag::unit_list}, false);
            } else {
                numeric_port(node, axis, {Tag::pos_number, Tag::pos_integer}, false);
            }
        }
        const bool list = std::any_of(out.document.edges.begin(), out.document.edges.end(), [&](const EdgeRef& e) {
            if (e.to.node != id) return false;
            for (const auto& s : pool) {
                if (s.at == e.from) return s.tag == Tag::number_list || s.tag == Tag::unit_list;
            }
            return false;
        });
        provide(id, "Pt", list ? Tag::point_list : Tag::point);
        return id;
    }

    NodeId unit_vector() {
        const NodeId id = add(pick(rng, std::vector<std::string>{"Unit X", "Unit Y", "Unit Z"})).id;
        numeric_port(*out.document.find(id), "F", {Tag::pos_number, Tag::pos_integer}, false);
        provide(id, "V", Tag::vector);
        return id;
    }

    NodeId circle() {
        const NodeId id = add("Circle").id;
        if (coin(rng)) connect(source({Tag::point, Tag::point_list}, Tag::point), id, "Center");
        if (coin(rng, 0.3)) connect(source({Tag::vector}, Tag::vector), id, "Normal");
        if (coin(rng)) {
            connect(source({Tag::pos_number, Tag::pos_integer}, Tag::pos_number), id, "Radius");
        } else {
            out.document.find(id)->pins["Radius"] = uniform_real(rng, 0.5, 3.0);
        }
        provide(id, "C", Tag::curve);
        return id;
    }

    // Merge of two sources that share a kind, so the result holds at least two items.
    NodeId merge_two(Tag single, Tag list) {
        const NodeId id = add("Merge").id;
        connect(source({single, list}, single), id, "D1");
        connect(source({single, list}, single), id, "D2");
        if (coin(rng, 0.3)) connect(source({single, list}, single), id, "D3");
        return id;
    }

    void step() {
        switch (uniform_int(rng, 0, 16)) {
            case 0: slider(coin(rng)); break;
            case 1: {
                const NodeId id = add(coin(rng) ? "Addition" : "Multiplication").id;
                for (const char* p : {"A", "B"}) {
                    auto& node = *out.document.find(id);
                    if (coin(rng)) {
                        connect(source({Tag::pos_number, Tag::pos_integer}, Tag::pos_number), id, p);
                    } else {
                        node.pins[p] = uniform_real(rng, 0.5, 3.0);
                    }
                }
                provide(id, "Result", Tag::pos_number);
                break;
            }
            case 2: {
                const NodeId id = add("Series").id;
                auto& node = *out.document.find(id);
                node.pins["Start"] = uniform_real(rng, 0.5, 3.0);
                numeric_port(node, "Step", {Tag::pos_number, Tag::pos_integer}, false);
                if (coin(rng)) {
                    connect(source({Tag::pos_integer}, Tag::pos_integer), id, "Count");
                } else {
                    out.document.find(id)->pins["Count"] = static_cast<double>(uniform_int(rng, 1, 5));
                }
                provide(id, "Series", Tag::number_list);
                break;
            }
            case 3: {
                const NodeId id = add("Range").id;
                connect(source({Tag::pos_number, Tag::pos_integer}, Tag::pos_number), id, "Start");
                connect(source({Tag::pos_number, Tag::pos_integer}, Tag::pos_number), id, "End");
                if (coin(rng)) {
                    connect(source({Tag::pos_integer}, Tag::pos_integer), id, "Steps");
                } else {
                    out.document.find(id)->pins["Steps"] = static_cast<double>(uniform_int(rng, 1, 5));
                }
                provide(id, "Range", Tag::number_list);
                break;
            }
            case 4: construct_point(true); break;
            case 5: unit_vector(); break;
            case 6: {
                const NodeId id = add("Vector XYZ").id;
                connect(source({Tag::pos_number, Tag::pos_integer}, Tag::pos_number), id, "X");
                numeric_port(*out.document.find(id), "Y", {Tag::pos_number, Tag::pos_integer}, false);
                provide(id, "V", Tag::vector);
                provide(id, "L", Tag::pos_number);
                break;
            }
            case 7: {
                const NodeId id = add("Line").id;
                connect(source({Tag::point, Tag::point_list}, Tag::point), id, "Start");
                connect(source({Tag::point, Tag::point_list}, Tag::point), id, "End");
                provide(id, "L", Tag::curve);
                break;
            }
            case 8: {
                const NodeId id = add("Line SDL").id;
                connect(source({Tag::point, Tag::point_list}, Tag::point), id, "Start");
                connect(source({Tag::vector}, Tag::vector), id, "Direction");
                numeric_port(*out.document.find(id), "Length", {Tag::pos_number, Tag::pos_integer}, false);
                provide(id, "L", Tag::curve);
                break;
            }
            case 9: circle(); break;
            case 10: {
                const NodeId pts = merge_two(Tag::point, Tag::point_list);
                const std::string comp = pick(rng, std::vector<std::string>{"Polyline", "Nurbs Curve", "Interpolate Curve"});
                const NodeId id = add(comp).id;
                connect({pts, "Result"}, id, comp == "Polyline" ? "Vertices" : comp == "Nurbs Curve" ? "Points" : "Vertices");
                if (comp != "Polyline" && coin(rng)) {
                    connect(source({Tag::pos_integer}, Tag::pos_integer), id, "Degree");
                }
                provide(id, comp == "Polyline" ? "Pl" : "Curve", Tag::curve);
                break;
            }
            case 11: {
                const NodeId id = add("Divide Curve").id;
                connect(source({Tag::curve}, Tag::curve), id, "Curve");
                if (coin(rng)) connect(source({Tag::pos_integer}, Tag::pos_integer), id, "Count");
                provide(id, "Points", Tag::point_list);
                provide(id, "Parameters", Tag::unit_list);
                break;
            }
            case 12: {
                const NodeId id = add("Extrude Linear").id;
                connect(source({Tag::curve}, Tag::curve), id, "Profile");
                connect(source({Tag::vector}, Tag::vector), id, "Axis");
                provide(id, "Extrusion", Tag::surface);
                break;
            }
            case 13: {
                const NodeId curves = merge_two(Tag::curve, Tag::curve);
                const NodeId id = add("Loft").id;
                connect({curves, "Result"}, id, "Curves");
                provide(id, "Loft", Tag::surface);
                break;
            }
            case 14: {
                auto geo = having({Tag::point, Tag::point_list, Tag::curve, Tag::surface});
                const Endpoint from = geo.empty() ? make(Tag::point) : pick(rng, geo).at;
                Tag tag = Tag::point;
                for (const auto& s : pool) {
                    if (s.at == from) tag = s.tag;
                }
                const NodeId id = add("Move").id;
                connect(from, id, "Geometry");
                connect(source({Tag::vector}, Tag::vector), id, "Motion");
                provide(id, "Geometry", tag);
                break;
            }
            case 15: {
                const NodeId pts = merge_two(Tag::point, Tag::point);
                const NodeId id = add("List Item").id;
                connect({pts, "Result"}, id, "List");
                out.document.find(id)->pins["Index"] = static_cast<double>(uniform_int(rng, 0, 1));
                provide(id, "Item", Tag::point);
                break;
            }
            default: {
                const NodeId id = add("Panel").id;
                out.document.find(id)->pins["Content"] = std::string("note");
                provide(id, "Out", Tag::text);
            }
        }
    }

    bool faultable(const EdgeRef& e) const {
        static const std::set<std::string> ports{"Motion", "Axis", "Direction", "Start", "End", "Center", "Normal"};
        static const std::set<std::string> components{"Move", "Extrude Linear", "Line SDL", "Line", "Circle"};
        return ports.count(e.to.port) && components.count(out.document.find(e.to.node)->component);
    }

    // Rewire vector or point inputs to a number source; one fault per target node.
    void inject_faults() {
        std::set<NodeId> hit;
        const int want = uniform_int(rng, 1, 2);
        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < out.document.edges.size(); ++i) {
            if (faultable(out.document.edges[i])) candidates.push_back(i);
        }
        std::shuffle(candidates.begin(), candidates.end(), rng);
        for (std::size_t i : candidates) {
            if (static_cast<int>(hit.size()) >= want) break;
            auto& e = out.document.edges[i];
            if (hit.count(e.to.node)) continue;
            std::vector<Endpoint> numbers;
            for (const auto& s : pool) {
                if ((s.tag == Tag::pos_number || s.tag == Tag::pos_integer) && s.at.node < e.to.node) numbers.push_back(s.at);
            }
            if (numbers.empty()) continue;
            e.from = pick(rng, numbers);
            hit.insert(e.to.node);
        }
        // Identical copies of an edge would also trip the duplicate rule; keep faults unambiguous.
        std::sort(out.document.edges.begin(), out.document.edges.end());
        out.document.edges.erase(std::unique(out.document.edges.begin(), out.document.edges.end()), out.document.edges.end());
        for (const auto& e : out.document.edges) {
            if (hit.count(e.to.node) && faultable(e)) {
                for (const auto& s : pool) {
                    if (s.at == e.from && (s.tag == Tag::pos_number || s.tag == Tag::pos_integer)) out.mistyped.insert(e);
                }
            }
        }
    }
};

}  // namespace

GeneratedGraph random_safe_graph(std::mt19937_64& rng, bool faults) {
    Builder b{rng, {}, {}, 1};
    const int steps = uniform_int(rng, 1, 12);
    for (int i = 0; i < steps; ++i) b.step();
    if (faults) b.inject_faults();
    for (auto& n : b.out.document.nodes) n.position = {static_cast<double>(n.id) * 10.0, 0.0};
    return b.out;
}

}  // namespace sforge::testing
