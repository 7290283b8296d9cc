#include "sforge/typing.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace sforge {

bool is_number_slider(const ComponentSpec* spec) { return spec != nullptr && spec->canonical_name == "Number Slider"; }

namespace {

bool whole(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

ValueKind pin_kind(const PinnedValue& pin) {
    if (const auto* d = std::get_if<double>(&pin)) return whole(*d) ? ValueKind::integer : ValueKind::number;
    if (const auto* s = std::get_if<SliderPin>(&pin)) {
        return whole(s->min) && whole(s->max) && whole(s->value) ? ValueKind::integer : ValueKind::number;
    }
    return ValueKind::text;
}

std::string with_article(const std::string& noun) {
    if (noun.empty()) return noun;
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(noun.front())));
    const bool vowel = c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
    return (vowel ? "an " : "a ") + noun;
}

std::string kind_phrase(ValueKind k) {
    switch (k) {
        case ValueKind::number:
        case ValueKind::integer: return "a number";
        case ValueKind::point: return "a point";
        case ValueKind::vector: return "a vector";
        case ValueKind::curve: return "a curve";
        case ValueKind::surface: return "a surface";
        case ValueKind::geometry_any: return "geometry";
        case ValueKind::any: return "any value";
        case ValueKind::text: return "text";
    }
    return "a value";
}

std::string mismatch_message(const ComponentSpec& spec, const PortSpec& port, ValueKind from, ValueKind expected) {
    std::string noun = port.name;
    std::transform(noun.begin(), noun.end(), noun.begin(), [](unsigned char c) { return std::tolower(c); });
    return fmt::format("{} requires {} input instead of {} (it would have required {} instead of {})",
                       spec.canonical_name, with_article(noun), kind_phrase(from), kind_phrase(expected),
                       kind_phrase(from));
}

GraphTyping infer_types(const ScriptGraph& graph) {
    GraphTyping t;
    t.edges.resize(graph.edges().size());

    for (NodeId id : graph.order()) {
        const GraphNode& gn = graph.node(id);
        NodeTyping& nt = t.nodes[id];
        const auto& pins = gn.source->pins;

        if (gn.placeholder()) {
            for (const auto& [key, value] : pins) t.pins.push_back({id, key, std::nullopt, true, {}});
            continue;
        }
        const ComponentSpec& spec = *gn.spec;

        // Group kinds are fixed by the first accepted input, in port order, edges before pins.
        auto expected_for = [&](const PortSpec& port) {
            if (!port.group.empty()) {
                if (auto g = nt.groups.find(port.group); g != nt.groups.end()) return g->second;
            }
            return port.kind;
        };
        auto message_for = [&](const PortSpec& port, ValueKind from, ValueKind expected) {
            if (!port.group.empty() && expected != port.kind) {
                return fmt::format("{} input {} carries {} but the other {} inputs carry {}", spec.canonical_name,
                                   port.name, kind_phrase(from), port.group, kind_phrase(expected));
            }
            return mismatch_message(spec, port, from, expected);
        };
        auto settle = [&](const PortSpec& port, ValueKind from) {
            if (!port.group.empty()) nt.groups.emplace(port.group, from);
        };

        std::vector<bool> pin_seen(pins.size(), false);
        std::optional<ValueKind> slider_feed;
        for (std::size_t pi = 0; pi < spec.inputs.size(); ++pi) {
            const PortSpec& port = spec.inputs[pi];
            for (std::size_t ei : graph.in_edges(id)) {
                const GraphEdge& e = graph.edges()[ei];
                if (!e.to_known() || e.to_port.match->index != pi) continue;
                const GraphNode& src = graph.node(e.ref.from.node);
                EdgeTyping& et = t.edges[ei];
                if (src.placeholder() || !e.from_known()) continue;
                et.checked = true;
                et.from = t.nodes[src.id].outputs[e.from_port.match->index];
                et.to = expected_for(port);
                et.ok = kind_accepts(et.from, et.to);
                if (et.ok) {
                    settle(port, et.from);
                    if (!slider_feed) slider_feed = et.from;
                } else {
                    et.message = message_for(port, et.from, et.to);
                }
            }
            std::size_t k = 0;
            for (const auto& [key, value] : pins) {
                const std::size_t slot = k++;
                const auto r = port_of(spec, Side::in, key);
                if (!r.match || r.match->index != pi) continue;
                pin_seen[slot] = true;
                PinTyping pt{id, key, pi, true, {}};
                if (std::holds_alternative<SliderPin>(value) && !is_number_slider(&spec)) {
                    pt.ok = false;
                    pt.message = fmt::format("slider pin on {} input {}; sliders are Number Slider nodes",
                                             spec.canonical_name, port.name);
                } else {
                    const ValueKind from = pin_kind(value);
                    const ValueKind expected = expected_for(port);
                    pt.ok = kind_accepts(from, expected);
                    if (pt.ok) {
                        settle(port, from);
                        if (!slider_feed) slider_feed = from;
                    } else {
                        pt.message = message_for(port, from, expected);
                    }
                }
                t.pins.push_back(std::move(pt));
            }
        }
        std::size_t k = 0;
        for (const auto& [key, value] : pins) {
            if (!pin_seen[k++]) t.pins.push_back({id, key, std::nullopt, true, {}});
        }

        for (const PortSpec& out : spec.outputs) {
            ValueKind kind = out.kind;
            if (!out.group.empty()) {
                if (auto g = nt.groups.find(out.group); g != nt.groups.end()) kind = g->second;
            }
            nt.outputs.push_back(kind);
        }
        // A slider is integer-valued when everything about it is whole.
        if (is_number_slider(&spec)) {
            const ValueKind fed = slider_feed.value_or(ValueKind::integer);
            nt.outputs[0] = fed == ValueKind::integer ? ValueKind::integer : ValueKind::number;
        }
    }

    std::stable_sort(t.pins.begin(), t.pins.end(),
                     [](const PinTyping& a, const PinTyping& b) { return std::tie(a.node, a.key) < std::tie(b.node, b.key); });
    return t;
}

}  // namespace sforge
