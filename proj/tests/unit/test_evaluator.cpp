#include "criteria.hpp"
#include "support.hpp"

#include "sforge/evaluator.hpp"
#include "sforge/render.hpp"
#include "sforge/validator.hpp"

#include <doctest.h>

using namespace sforge;
using namespace sforge::testing;

namespace {

EvalResult eval_text(const char* text, const std::map<NodeId, double>& overrides = {}) {
    const auto built = build_graph(parse_document_strict(text), builtin_catalog());
    return evaluate_with_overrides(built.graph, overrides);
}

EvalResult eval_doc(const ScriptDocument& doc, const std::map<NodeId, double>& overrides = {}) {
    const auto built = build_graph(doc, builtin_catalog());
    return evaluate_with_overrides(built.graph, overrides);
}

std::size_t line_count(const EvalResult& r) {
    std::size_t n = 0;
    for (const auto& item : drawable_items(r)) {
        if (const auto* c = item.get_if<Curve>(); c && std::holds_alternative<LineSeg>(*c)) ++n;
    }
    return n;
}

const char* kSeries = R"({"schema_version":1,"nodes":[
  {"id":1,"component":"Number Slider","position":{"x":0,"y":0},"pins":{"N":{"slider":{"min":0,"max":20,"value":10}}}},
  {"id":2,"component":"Series","position":{"x":220,"y":0},"pins":{"Start":0,"Count":3}}],
  "edges":[{"from":{"id":1,"port":"N"},"to":{"id":2,"port":"Step"}}]})";

const char* kMovePoints = R"({"schema_version":1,"nodes":[
  {"id":1,"component":"Series","position":{"x":0,"y":0},"pins":{"Count":3}},
  {"id":2,"component":"Construct Point","position":{"x":0,"y":0},"pins":{}},
  {"id":3,"component":"Unit Z","position":{"x":0,"y":0},"pins":{"F":2}},
  {"id":4,"component":"Move","position":{"x":0,"y":0},"pins":{}}],
  "edges":[{"from":{"id":1,"port":"Series"},"to":{"id":2,"port":"X"}},
           {"from":{"id":2,"port":"Pt"},"to":{"id":4,"port":"Geometry"}},
           {"from":{"id":3,"port":"V"},"to":{"id":4,"port":"Motion"}}]})";

}  // namespace

TEST_CASE("validator/evaluator contract criterion") {
    const auto o = check_contract();
    INFO(o.detail);
    CHECK(o.pass);
}

TEST_CASE("the contract holds on more seeds") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        std::mt19937_64 rng(seed);
        for (int i = 0; i < 300; ++i) {
            const auto gen = random_safe_graph(rng, i % 2 == 0);
            const auto built = build_graph(gen.document, builtin_catalog());
            const auto diags = validate(built.graph);
            const auto eval = evaluate(built.graph);
            if (error_count(diags) == 0) {
                CHECK(eval.failures.empty());
                continue;
            }
            for (const auto& e : gen.mistyped) {
                CHECK(eval.origins().count(e.to.node) == 1);
                CHECK(eval.failed(e.to.node));
            }
        }
    }
}

TEST_CASE("a failure taints exactly its descendants through required ports") {
    std::mt19937_64 rng(43);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        const auto gen = random_safe_graph(rng, true);
        if (gen.mistyped.size() != 1) continue;
        const NodeId origin = gen.mistyped.begin()->to.node;
        const auto built = build_graph(gen.document, builtin_catalog());
        const auto& g = built.graph;
        std::set<NodeId> reach{origin};
        for (NodeId id : g.order()) {
            if (!reach.count(id)) continue;
            for (std::size_t ei : g.out_edges(id)) {
                const auto& e = g.edges()[ei];
                const auto& to = g.node(e.ref.to.node);
                if (!to.placeholder() && e.to_known() && to.spec->inputs[e.to_port.match->index].required) {
                    reach.insert(to.id);
                }
            }
        }
        const auto eval = evaluate(g);
        std::set<NodeId> tainted;
        for (const auto& f : eval.failures) {
            if (f.origin == origin) tainted.insert(f.node);
        }
        CHECK(tainted == reach);
        // Everything not downstream of the fault evaluates normally.
        std::set<NodeId> downstream{origin};
        for (NodeId id : g.order()) {
            if (!downstream.count(id)) continue;
            for (std::size_t ei : g.out_edges(id)) downstream.insert(g.edges()[ei].ref.to.node);
        }
        for (const auto& f : eval.failures) CHECK(downstream.count(f.node) == 1);
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("a slider drives a series") {
    const auto r = eval_text(kSeries);
    CHECK(r.values.at(2).at("Series") == make_list({0.0, 10.0, 20.0}));
    CHECK(r.failures.empty());
    CHECK(r.drawables.empty());
}

TEST_CASE("longest-list matching repeats the shorter input") {
    const auto r = eval_text(kMovePoints);
    const auto& moved = r.values.at(4).at("Geometry");
    CHECK(moved == make_list({Point{0, 0, 2}, Point{1, 0, 2}, Point{2, 0, 2}}));
    REQUIRE(r.drawables.size() == 1);
    CHECK(r.drawables[0].node == 4);
}

TEST_CASE("list inputs on list ports arrive whole") {
    const auto r = eval_text(R"({"schema_version":1,"nodes":[
      {"id":1,"component":"Series","position":{"x":0,"y":0},"pins":{"Count":4}},
      {"id":2,"component":"Construct Point","position":{"x":0,"y":0},"pins":{}},
      {"id":3,"component":"Polyline","position":{"x":0,"y":0},"pins":{}}],
      "edges":[{"from":{"id":1,"port":"Series"},"to":{"id":2,"port":"X"}},
               {"from":{"id":2,"port":"Pt"},"to":{"id":3,"port":"Vertices"}}]})");
    const auto* c = r.values.at(3).at("Pl").get_if<Curve>();
    REQUIRE(c != nullptr);
    CHECK(std::get<Polyline>(*c).vertices.size() == 4);
}

TEST_CASE("an empty list on a mapped port yields an empty result") {
    const auto r = eval_text(R"({"schema_version":1,"nodes":[
      {"id":1,"component":"Series","position":{"x":0,"y":0},"pins":{"Count":0}},
      {"id":2,"component":"Construct Point","position":{"x":0,"y":0},"pins":{}}],
      "edges":[{"from":{"id":1,"port":"Series"},"to":{"id":2,"port":"X"}}]})");
    CHECK(r.values.at(2).at("Pt") == make_list({}));
    CHECK(r.failures.empty());
}

TEST_CASE("failures stay confined to the nodes downstream of them") {
    const auto doc = load_fixture("umbrella");
    const auto r = eval_doc(doc);
    std::set<NodeId> failed;
    for (const auto& f : r.failures) failed.insert(f.node);
    CHECK(failed == std::set<NodeId>{13, 14});
    CHECK(r.origins() == std::set<NodeId>{13, 14});
    for (const auto& n : doc.nodes) {
        if (failed.count(n.id)) continue;
        for (const auto& [port, v] : r.values.at(n.id)) CHECK_FALSE(v.is_error());
    }
    bool loft = false;
    for (const auto& d : r.drawables) loft = loft || d.node == 9;
    CHECK(loft);
}

TEST_CASE("an error passed along required inputs keeps its origin") {
    const auto r = eval_text(R"({"schema_version":1,"nodes":[
      {"id":1,"component":"Number Slider","position":{"x":0,"y":0},"pins":{"N":{"slider":{"min":0,"max":5,"value":2}}}},
      {"id":2,"component":"Construct Point","position":{"x":0,"y":0},"pins":{}},
      {"id":3,"component":"Move","position":{"x":0,"y":0},"pins":{}},
      {"id":4,"component":"Unit X","position":{"x":0,"y":0},"pins":{}},
      {"id":5,"component":"Move","position":{"x":0,"y":0},"pins":{}},
      {"id":6,"component":"Merge","position":{"x":0,"y":0},"pins":{}}],
      "edges":[{"from":{"id":2,"port":"Pt"},"to":{"id":3,"port":"Geometry"}},
               {"from":{"id":1,"port":"N"},"to":{"id":3,"port":"Motion"}},
               {"from":{"id":3,"port":"Geometry"},"to":{"id":5,"port":"Geometry"}},
               {"from":{"id":4,"port":"V"},"to":{"id":5,"port":"Motion"}},
               {"from":{"id":5,"port":"Geometry"},"to":{"id":6,"port":"D2"}}]})");
    REQUIRE(r.failures.size() == 2);
    for (const auto& f : r.failures) CHECK(f.origin == 3);
    CHECK(r.origins() == std::set<NodeId>{3});
    // Merge only has optional inputs: the failed one falls back to empty and the node still evaluates.
    CHECK_FALSE(r.failed(6));
    CHECK(r.values.at(6).at("Result") == make_list({}));
}

TEST_CASE("unknown components fail at their own node") {
    const auto r = eval_text(R"({"schema_version":1,"nodes":[
      {"id":1,"component":"Voronoi","position":{"x":0,"y":0},"pins":{}},
      {"id":2,"component":"Move","position":{"x":0,"y":0},"pins":{}},
      {"id":3,"component":"Line","position":{"x":0,"y":0},"pins":{}}],
      "edges":[{"from":{"id":1,"port":"Cells"},"to":{"id":2,"port":"Geometry"}}]})");
    CHECK(r.failed(1));
    CHECK(r.failed(2));
    CHECK(r.failed(3));
    CHECK(r.origins() == std::set<NodeId>{1, 3});
}

TEST_CASE("overrides replace slider values for one run") {
    const auto doc = parse_document_strict(kSeries);
    const auto built = build_graph(doc, builtin_catalog());
    const auto r = evaluate_with_overrides(built.graph, {{1, 5.0}});
    CHECK(r.values.at(2).at("Series") == make_list({0.0, 5.0, 10.0}));
    CHECK(r.notes.empty());
    CHECK(built.graph.document() == doc);
    CHECK(evaluate(built.graph).values.at(2).at("Series") == make_list({0.0, 10.0, 20.0}));

    const auto clamped = evaluate_with_overrides(built.graph, {{1, 99.0}});
    CHECK(clamped.values.at(2).at("Series") == make_list({0.0, 20.0, 40.0}));
    REQUIRE(clamped.notes.size() == 1);
    CHECK(clamped.notes[0].rule == "E1");

    CHECK_THROWS_AS(evaluate_with_overrides(built.graph, {{2, 1.0}}), OverrideError);
    CHECK_THROWS_AS(evaluate_with_overrides(built.graph, {{42, 1.0}}), OverrideError);
    CHECK_THROWS_AS(evaluate_with_overrides(built.graph, {{1, std::nan("")}}), OverrideError);
}

TEST_CASE("dragging the truss connections slider from 4 to 8 adds members") {
    const auto doc = load_fixture("truss");
    const auto at4 = eval_doc(doc);
    const auto at8 = eval_doc(doc, {{3, 8.0}});
    CHECK(at4.failures.empty());
    CHECK(at8.failures.empty());
    CHECK(line_count(at4) == 5);
    CHECK(line_count(at8) == 9);
    CHECK(drawable_items(at8).size() > drawable_items(at4).size());
}

TEST_CASE("integer sliders round their overrides") {
    const auto doc = load_fixture("truss");
    CHECK(line_count(eval_doc(doc, {{3, 5.6}})) == 7);
}

TEST_CASE("evaluation is deterministic and serializes stably") {
    for (const char* name : {"truss", "umbrella", "bridge"}) {
        const auto doc = load_fixture(name);
        const auto a = eval_doc(doc);
        const auto b = eval_doc(doc);
        CHECK(a == b);
        CHECK(to_json(a).dump() == to_json(b).dump());
    }
}

TEST_CASE("every node appears in the per-node values") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 100; ++i) {
        const auto gen = random_safe_graph(rng, true);
        const auto r = eval_doc(gen.document);
        for (const auto& n : gen.document.nodes) CHECK(r.values.count(n.id) == 1);
        for (const auto& f : r.failures) {
            for (const auto& [port, v] : r.values.at(f.node)) CHECK(v.is_error());
        }
    }
}

TEST_CASE("the umbrella renders to OBJ and a JSON scene") {
    const auto r = eval_doc(load_fixture("umbrella"));
    const Scene scene = build_scene(r);
    CHECK_FALSE(scene.mesh.faces.empty());
    CHECK_FALSE(scene.polylines.empty());
    const std::string obj = to_obj(scene);
    CHECK(obj.find("\nf ") != std::string::npos);
    CHECK(obj.find("\nl ") != std::string::npos);
    const auto j = mesh_to_json(scene.mesh);
    CHECK(j["vertices"].size() == scene.mesh.vertices.size());
    CHECK(j["faces"].size() == scene.mesh.faces.size());
    for (const auto& f : j["faces"]) {
        for (const auto& i : f) CHECK(i.get<std::size_t>() < scene.mesh.vertices.size());
    }
}
