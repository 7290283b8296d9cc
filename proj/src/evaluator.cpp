#include "sforge/evaluator.hpp"

#include "sforge/components.hpp"
#include "sforge/typing.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace sforge {

using ojson = nlohmann::ordered_json;

std::set<NodeId> EvalResult::origins() const {
    std::set<NodeId> out;
    for (const auto& f : failures) {
        if (f.origin == f.node) out.insert(f.node);
    }
    return out;
}

bool EvalResult::failed(NodeId id) const {
    return std::any_of(failures.begin(), failures.end(), [id](const NodeFailure& f) { return f.node == id; });
}

namespace {

bool contains_error(const GeomValue& v) {
    if (v.is_error()) return true;
    if (const auto* l = v.get_if<ListV>()) {
        return std::any_of(l->items.begin(), l->items.end(), [](const GeomValue& x) { return x.is_error(); });
    }
    return false;
}

const ErrorV& first_error(const GeomValue& v) {
    if (const auto* e = v.get_if<ErrorV>()) return *e;
    for (const auto& x : v.get_if<ListV>()->items) {
        if (const auto* e = x.get_if<ErrorV>()) return *e;
    }
    throw std::logic_error("value holds no error");
}

void stamp(GeomValue& v, NodeId id) {
    if (auto* e = std::get_if<ErrorV>(&v.data)) {
        if (e->origin == 0) e->origin = id;
    } else if (auto* l = std::get_if<ListV>(&v.data)) {
        for (auto& x : l->items) stamp(x, id);
    }
}

GeomValue pin_value(const PinnedValue& p) {
    if (const auto* d = std::get_if<double>(&p)) return *d;
    if (const auto* s = std::get_if<SliderPin>(&p)) return s->value;
    return Text{std::get<std::string>(p)};
}

class Run {
public:
    Run(const ScriptGraph& g, const std::map<NodeId, double>& sliders)
        : g_(g), typing_(infer_types(g)), sliders_(sliders) {}

    EvalResult go() {
        for (NodeId id : g_.order()) node(g_.node(id));
        for (const auto& [id, outs] : result_.values) {
            if (outs.empty()) continue;
            const bool all_failed =
                std::all_of(outs.begin(), outs.end(), [](const auto& kv) { return kv.second.is_error(); });
            if (all_failed) {
                const auto& e = *outs.begin()->second.get_if<ErrorV>();
                result_.failures.push_back({id, e.origin, e.message});
            }
        }
        for (const auto& n : g_.nodes()) {
            if (!g_.out_edges(n.id).empty() || n.placeholder()) continue;
            for (const auto& port : n.spec->outputs) {
                const GeomValue& v = result_.values[n.id].at(port.name);
                if (v.is_error() || !is_geometry(v)) continue;
                GeomValue clean = v;
                if (auto* l = std::get_if<ListV>(&clean.data)) {
                    std::erase_if(l->items, [](const GeomValue& x) { return x.is_error(); });
                }
                result_.drawables.push_back({n.id, port.name, std::move(clean)});
            }
        }
        return std::move(result_);
    }

private:
    void fail_all(const GraphNode& n, const GeomValue& err) {
        auto& outs = result_.values[n.id];
        for (const auto& port : n.spec->outputs) outs[port.name] = err;
    }

    void node(const GraphNode& n) {
        auto& outs = result_.values[n.id];
        if (n.placeholder()) {
            const GeomValue err = ErrorV{n.id, fmt::format("unknown component '{}'", n.raw_component)};
            for (std::size_t ei : g_.out_edges(n.id)) outs[g_.edges()[ei].ref.from.port] = err;
            if (outs.empty()) outs["out"] = err;
            return;
        }
        const ComponentSpec& spec = *n.spec;

        // Statically mistyped inputs fail the node here, before any kernel runs.
        for (std::size_t ei : g_.in_edges(n.id)) {
            const auto& et = typing_.edges[ei];
            if (et.checked && !et.ok) return fail_all(n, ErrorV{n.id, et.message});
        }
        for (const auto& p : typing_.pins) {
            if (p.node == n.id && !p.ok) return fail_all(n, ErrorV{n.id, p.message});
        }

        std::vector<std::vector<GeomValue>> fed(spec.inputs.size());
        for (std::size_t ei : g_.in_edges(n.id)) {
            const GraphEdge& e = g_.edges()[ei];
            if (!e.to_known()) continue;
            const GraphNode& src = g_.node(e.ref.from.node);
            if (src.placeholder()) {
                fed[e.to_port.match->index].push_back(result_.values.at(src.id).at(e.ref.from.port));
            } else if (e.from_known()) {
                const auto& port = src.spec->outputs[e.from_port.match->index].name;
                fed[e.to_port.match->index].push_back(result_.values.at(src.id).at(port));
            }
        }
        std::vector<std::optional<GeomValue>> pinned(spec.inputs.size());
        for (const auto& p : typing_.pins) {
            if (p.node != n.id || !p.port) continue;
            GeomValue v = pin_value(n.source->pins.at(p.key));
            if (is_number_slider(&spec)) {
                if (auto it = sliders_.find(n.id); it != sliders_.end()) v = it->second;
            }
            if (!pinned[*p.port]) pinned[*p.port] = std::move(v);
        }

        std::vector<GeomValue> args(spec.inputs.size());
        for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
            const PortSpec& port = spec.inputs[i];
            auto fallback = [&]() -> GeomValue {
                return port.default_value ? *port.default_value : GeomValue(ListV{});
            };
            if (!fed[i].empty()) {
                args[i] = fed[i].size() == 1 ? fed[i][0] : make_list(fed[i]);
            } else if (pinned[i]) {
                args[i] = *pinned[i];
            } else if (port.required) {
                return fail_all(n, ErrorV{n.id, fmt::format("{} input {} is required but has no connection or value",
                                                            spec.canonical_name, port.name)});
            } else {
                args[i] = fallback();
            }
            if (contains_error(args[i])) {
                if (port.required) return fail_all(n, first_error(args[i]));
                args[i] = fallback();
            }
            if (port.cardinality == Cardinality::list && !args[i].is_list()) args[i] = ListV{{args[i]}};
        }
        if (is_number_slider(&spec) && pinned[0] == std::nullopt && fed[0].empty()) {
            if (auto it = sliders_.find(n.id); it != sliders_.end()) args[0] = it->second;
        }

        const Kernel* kernel = find_kernel(spec.canonical_name);
        if (kernel == nullptr) return fail_all(n, ErrorV{n.id, spec.canonical_name + " has no evaluator"});

        std::vector<std::size_t> mapped;
        std::size_t longest = 0;
        bool empty = false;
        for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
            if (spec.inputs[i].cardinality != Cardinality::scalar || !args[i].is_list()) continue;
            mapped.push_back(i);
            const std::size_t len = args[i].get_if<ListV>()->items.size();
            longest = std::max(longest, len);
            empty = empty || len == 0;
        }

        auto call = [&](const std::vector<GeomValue>& in) {
            std::vector<GeomValue> res;
            try {
                res = (*kernel)(in);
            } catch (const std::exception& ex) {
                res.assign(spec.outputs.size(), error_value(fmt::format("{} failed: {}", spec.canonical_name, ex.what())));
            }
            res.resize(spec.outputs.size(), error_value(spec.canonical_name + " produced no value"));
            for (auto& v : res) stamp(v, n.id);
            return res;
        };

        if (mapped.empty()) {
            auto res = call(args);
            for (std::size_t o = 0; o < spec.outputs.size(); ++o) outs[spec.outputs[o].name] = std::move(res[o]);
            return;
        }

        // Longest list wins; shorter lists repeat their last item.
        const std::size_t count = empty ? 0 : longest;
        std::vector<std::vector<GeomValue>> per_output(spec.outputs.size());
        bool all_failed = count > 0;
        for (std::size_t k = 0; k < count; ++k) {
            std::vector<GeomValue> in = args;
            for (std::size_t i : mapped) {
                const auto& items = args[i].get_if<ListV>()->items;
                in[i] = items[std::min(k, items.size() - 1)];
            }
            auto res = call(in);
            all_failed = all_failed && std::all_of(res.begin(), res.end(), [](const GeomValue& v) { return v.is_error(); });
            for (std::size_t o = 0; o < res.size(); ++o) per_output[o].push_back(std::move(res[o]));
        }
        for (std::size_t o = 0; o < spec.outputs.size(); ++o) {
            outs[spec.outputs[o].name] = all_failed ? per_output[o][0] : make_list(std::move(per_output[o]));
        }
    }

    const ScriptGraph& g_;
    GraphTyping typing_;
    const std::map<NodeId, double>& sliders_;
    EvalResult result_;
};

}  // namespace

EvalResult evaluate(const ScriptGraph& graph) { return Run(graph, {}).go(); }

EvalResult evaluate_with_overrides(const ScriptGraph& graph, const std::map<NodeId, double>& overrides) {
    const GraphTyping typing = infer_types(graph);
    std::map<NodeId, double> values;
    std::vector<Diagnostic> notes;
    for (const auto& [id, raw] : overrides) {
        if (!graph.contains(id)) throw OverrideError(id, fmt::format("override targets missing node {}", id));
        const GraphNode& n = graph.node(id);
        if (!is_number_slider(n.spec)) {
            throw OverrideError(id, fmt::format("override targets node {}, which is not a Number Slider", id));
        }
        double v = raw;
        if (!std::isfinite(v)) throw OverrideError(id, fmt::format("override for node {} is not a finite number", id));
        if (auto key = pin_key_for(*n.source, *n.spec, "N")) {
            if (const auto* s = std::get_if<SliderPin>(&n.source->pins.at(*key))) {
                const double clamped = std::clamp(v, s->min, s->max);
                if (clamped != v) {
                    notes.push_back(make_diagnostic("E1", Severity::info, {.node = id, .port = std::string("N")},
                                                    fmt::format("override {} for node {} clamped to {}", v, id, clamped)));
                }
                v = clamped;
            }
        }
        if (typing.nodes.at(id).outputs[0] == ValueKind::integer) v = std::round(v);
        values[id] = v;
    }
    EvalResult r = Run(graph, values).go();
    r.notes = std::move(notes);
    return r;
}

std::vector<GeomValue> drawable_items(const EvalResult& result) {
    std::vector<GeomValue> out;
    for (const auto& d : result.drawables) {
        if (const auto* l = d.value.get_if<ListV>()) {
            for (const auto& x : l->items) {
                if (!x.is_error() && is_geometry(x)) out.push_back(x);
            }
        } else {
            out.push_back(d.value);
        }
    }
    return out;
}

namespace {

ojson xyz(Point p) { return ojson::array({p.x, p.y, p.z}); }
ojson xyz(Vector v) { return ojson::array({v.x, v.y, v.z}); }

ojson points_json(const std::vector<Point>& pts) {
    ojson a = ojson::array();
    for (const auto& p : pts) a.push_back(xyz(p));
    return a;
}

constexpr int kCurveSamples = 64;

ojson curve_json(const Curve& c) {
    ojson j;
    j["type"] = "curve";
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, LineSeg>) {
                j["curve"] = "line";
                j["start"] = xyz(x.a);
                j["end"] = xyz(x.b);
            } else if constexpr (std::is_same_v<T, Polyline>) {
                j["curve"] = "polyline";
                j["vertices"] = points_json(x.vertices);
            } else if constexpr (std::is_same_v<T, Circle>) {
                j["curve"] = "circle";
                j["center"] = xyz(x.center);
                j["normal"] = xyz(x.normal);
                j["radius"] = x.radius;
            } else {
                j["curve"] = "nurbs";
                j["degree"] = x.degree;
                j["control"] = points_json(x.control);
                j["knots"] = effective_knots(x);
            }
        },
        c);
    j["samples"] = points_json(sample_curve(c, kCurveSamples));
    return j;
}

}  // namespace

ojson value_to_json(const GeomValue& v, int u_count, int v_count) {
    ojson j;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) {
                j["type"] = "number";
                j["value"] = x;
            } else if constexpr (std::is_same_v<T, Point>) {
                j["type"] = "point";
                j["xyz"] = xyz(x);
            } else if constexpr (std::is_same_v<T, Vector>) {
                j["type"] = "vector";
                j["xyz"] = xyz(x);
            } else if constexpr (std::is_same_v<T, Curve>) {
                j = curve_json(x);
            } else if constexpr (std::is_same_v<T, Surface>) {
                j["type"] = "surface";
                j["surface"] = std::holds_alternative<Extrusion>(x) ? "extrusion" : "loft";
                const Mesh m = sample_mesh(x, u_count, v_count);
                j["mesh"] = {{"vertices", points_json(m.vertices)}, {"faces", m.faces}};
            } else if constexpr (std::is_same_v<T, ListV>) {
                j["type"] = "list";
                j["items"] = ojson::array();
                for (const auto& item : x.items) j["items"].push_back(value_to_json(item, u_count, v_count));
            } else if constexpr (std::is_same_v<T, ErrorV>) {
                j["type"] = "error";
                j["origin"] = x.origin;
                j["message"] = x.message;
            } else {
                j["type"] = "text";
                j["value"] = x.value;
            }
        },
        v.data);
    return j;
}

ojson to_json(const EvalResult& r, int u_count, int v_count) {
    ojson j;
    j["schema_version"] = kSchemaVersion;
    j["nodes"] = ojson::array();
    for (const auto& [id, outs] : r.values) {
        ojson node;
        node["id"] = id;
        ojson o = ojson::object();
        for (const auto& [port, v] : outs) o[port] = value_to_json(v, u_count, v_count);
        node["outputs"] = std::move(o);
        j["nodes"].push_back(std::move(node));
    }
    j["failures"] = ojson::array();
    for (const auto& f : r.failures) {
        j["failures"].push_back({{"node", f.node}, {"origin", f.origin}, {"message", f.message}});
    }
    j["drawables"] = ojson::array();
    for (const auto& d : r.drawables) {
        j["drawables"].push_back({{"node", d.node}, {"port", d.port}, {"value", value_to_json(d.value, u_count, v_count)}});
    }
    j["notes"] = to_json(r.notes);
    return j;
}

}  // namespace sforge
