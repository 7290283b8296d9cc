#include "criteria.hpp"
#include "support.hpp"

#include "sforge/graph_ir.hpp"

#include <doctest.h>

#include <algorithm>

using namespace sforge;
using namespace sforge::testing;

namespace {

const char* kTwoNodes = R"({"schema_version":1,"nodes":[
  {"id":1,"component":"Number Slider","position":{"x":0,"y":0},"pins":{"N":{"slider":{"min":0,"max":10,"value":4}}}},
  {"id":2,"component":"Construct Point","position":{"x":220,"y":0},"pins":{}}],
  "edges":[{"from":{"id":1,"port":"N"},"to":{"id":2,"port":"X"}}]})";

ParseError::Kind strict_error(const std::string& text) {
    try {
        parse_document_strict(text);
    } catch (const ParseError& e) {
        return e.kind();
    }
    FAIL("parsed without error");
    return ParseError::Kind::syntax;
}

bool has_rule(const std::vector<Diagnostic>& d, const char* rule) { return count_rule(d, rule) > 0; }

}  // namespace

TEST_CASE("wire-format round-trip criterion") {
    const auto o = check_round_trip();
    INFO(o.detail);
    CHECK(o.pass);
}

TEST_CASE("serialization is canonical and stable") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        auto doc = random_document(rng);
        const std::string once = serialize(doc);
        CHECK(serialize(parse_document_strict(once)) == once);
        auto shuffled = doc;
        std::shuffle(shuffled.nodes.begin(), shuffled.nodes.end(), rng);
        std::shuffle(shuffled.edges.begin(), shuffled.edges.end(), rng);
        CHECK(shuffled == doc);
        CHECK(serialize(shuffled) == once);
        CHECK(canonicalized(shuffled).nodes == canonicalized(doc).nodes);
    }
}

TEST_CASE("the strict parser reads pins of every kind") {
    const auto doc = parse_document_strict(kTwoNodes);
    REQUIRE(doc.nodes.size() == 2);
    const auto& pin = doc.find(1)->pins.at("N");
    REQUIRE(std::holds_alternative<SliderPin>(pin));
    CHECK(std::get<SliderPin>(pin) == SliderPin{0, 10, 4});
    CHECK(doc.edges.size() == 1);
    CHECK(doc.find(3) == nullptr);
}

TEST_CASE("the strict parser rejects malformed documents with a location") {
    CHECK(strict_error("{\"nodes\": [") == ParseError::Kind::syntax);
    CHECK(strict_error(R"({"schema_version":1,"nodes":[],"edges":[],})") == ParseError::Kind::syntax);
    CHECK(strict_error(R"({"schema_version":2,"nodes":[],"edges":[]})") == ParseError::Kind::schema);
    CHECK(strict_error(R"({"schema_version":1,"nodes":[{"id":1,"component":"Line","position":{"x":0,"y":0},"pins":{}},
        {"id":1,"component":"Line","position":{"x":0,"y":0},"pins":{}}],"edges":[]})") ==
          ParseError::Kind::duplicate_id);
    CHECK(strict_error(R"({"schema_version":1,"nodes":[{"id":1,"component":"Line","position":{"x":0,"y":0},"pins":{}}],
        "edges":[{"from":{"id":1,"port":"L"},"to":{"id":9,"port":"Start"}}]})") == ParseError::Kind::dangling_edge);
    CHECK(strict_error(R"({"schema_version":1,"nodes":[{"id":1,"component":"Line","position":{"x":0,"y":0},"pins":{}}],
        "edges":[{"from":{"id":1,"port":"L"},"to":{"id":1,"port":"Start"}}]})") == ParseError::Kind::self_loop);
    try {
        parse_document_strict("{\"schema_version\": 1, \"nodes\": [}");
        FAIL("accepted");
    } catch (const ParseError& e) {
        CHECK(e.offset().has_value());
    }
    try {
        parse_document_strict(R"({"schema_version":1,"nodes":[{"id":"x","component":"Line","position":{"x":0,"y":0},"pins":{}}],"edges":[]})");
        FAIL("accepted");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::schema);
        CHECK(e.path() == "$.nodes[0].id");
    }
}

TEST_CASE("the tolerant parser repairs common agent output and says so") {
    SUBCASE("fence and trailing commas") {
        const std::string text = std::string("```json\n") + R"({"schema_version":1,"nodes":[
            {"id":1,"component":"Line","position":{"x":0,"y":0},"pins":{},},],"edges":[],})" + "\n```";
        const auto t = parse_document_tolerant(text);
        CHECK(t.document.nodes.size() == 1);
        CHECK(has_rule(t.diagnostics, "P1"));
        CHECK(has_rule(t.diagnostics, "P2"));
    }
    SUBCASE("missing schema version and positions") {
        const auto t = parse_document_tolerant(R"({"nodes":[{"id":1,"component":"Unit Z"},{"id":2,"component":"Move"}],
            "edges":[{"from":{"id":1,"port":"V"},"to":{"id":2,"port":"Motion"}}]})");
        CHECK(has_rule(t.diagnostics, "P8"));
        CHECK(count_rule(t.diagnostics, "P5") == 2);
        CHECK(t.document.find(1)->position == auto_layout_position(0, 0));
        CHECK(t.document.find(2)->position == auto_layout_position(1, 0));
    }
    SUBCASE("self loops are dropped, not fatal") {
        const auto t = parse_document_tolerant(R"({"schema_version":1,"nodes":[{"id":1,"component":"Line","position":{"x":0,"y":0}}],
            "edges":[{"from":{"id":1,"port":"L"},"to":{"id":1,"port":"Start"}}]})");
        CHECK(t.document.edges.empty());
        CHECK(has_rule(t.diagnostics, "P7"));
    }
    SUBCASE("swapped slider bounds") {
        const auto t = parse_document_tolerant(R"({"schema_version":1,"nodes":[{"id":1,"component":"Number Slider",
            "position":{"x":0,"y":0},"pins":{"N":{"slider":{"min":9,"max":1,"value":3}}}}],"edges":[]})");
        CHECK(std::get<SliderPin>(t.document.find(1)->pins.at("N")) == SliderPin{1, 9, 3});
        CHECK(has_rule(t.diagnostics, "P10"));
    }
    SUBCASE("text that holds no document still fails") {
        CHECK_THROWS_AS(parse_document_tolerant("I could not build that."), ParseError);
    }
}

TEST_CASE("the tolerant parser is a superset of the strict one") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 300; ++i) {
        const auto doc = random_document(rng);
        const std::string text = serialize(doc);
        const auto t = parse_document_tolerant(text);
        REQUIRE(t.diagnostics.empty());
        REQUIRE(t.document == parse_document_strict(text));
    }
}

TEST_CASE("the graph orders nodes topologically") {
    std::mt19937_64 rng(23);
    int acyclic = 0;
    for (int i = 0; i < 300; ++i) {
        const auto gen = random_safe_graph(rng, i % 3 == 0);
        const auto built = build_graph(gen.document, builtin_catalog());
        const auto& order = built.graph.order();
        REQUIRE(order.size() == gen.document.nodes.size());
        std::map<NodeId, std::size_t> at;
        for (std::size_t k = 0; k < order.size(); ++k) at[order[k]] = k;
        for (const auto& e : gen.document.edges) CHECK(at.at(e.from.node) < at.at(e.to.node));
        ++acyclic;
    }
    CHECK(acyclic == 300);
}

TEST_CASE("cycles are reported with the nodes on the cycle") {
    auto doc = parse_document_strict(R"({"schema_version":1,"nodes":[
        {"id":1,"component":"Addition","position":{"x":0,"y":0},"pins":{}},
        {"id":2,"component":"Addition","position":{"x":0,"y":0},"pins":{}},
        {"id":3,"component":"Addition","position":{"x":0,"y":0},"pins":{}},
        {"id":4,"component":"Addition","position":{"x":0,"y":0},"pins":{}}],
        "edges":[{"from":{"id":4,"port":"Result"},"to":{"id":1,"port":"A"}},
                 {"from":{"id":1,"port":"Result"},"to":{"id":2,"port":"A"}},
                 {"from":{"id":2,"port":"Result"},"to":{"id":3,"port":"A"}},
                 {"from":{"id":3,"port":"Result"},"to":{"id":2,"port":"B"}}]})");
    try {
        build_graph(doc, builtin_catalog());
        FAIL("cycle accepted");
    } catch (const CycleError& e) {
        std::vector<NodeId> c = e.cycle();
        std::sort(c.begin(), c.end());
        CHECK(c == std::vector<NodeId>{2, 3});
    }
}

TEST_CASE("unknown components become placeholders that keep their edges") {
    auto doc = parse_document_strict(R"({"schema_version":1,"nodes":[
        {"id":1,"component":"Voronoi","position":{"x":0,"y":0},"pins":{}},
        {"id":2,"component":"Move","position":{"x":0,"y":0},"pins":{}}],
        "edges":[{"from":{"id":1,"port":"Cells"},"to":{"id":2,"port":"Geometry"}}]})");
    const auto built = build_graph(doc, builtin_catalog());
    CHECK(built.graph.node(1).placeholder());
    CHECK_FALSE(built.graph.node(2).placeholder());
    CHECK(built.graph.edges().size() == 1);
    CHECK(built.graph.in_edges(2).size() == 1);
}

TEST_CASE("pin keys resolve through port aliases") {
    auto doc = parse_document_strict(R"({"schema_version":1,"nodes":[
        {"id":1,"component":"Line SDL","position":{"x":0,"y":0},"pins":{"length":4}}],"edges":[]})");
    const auto* spec = builtin_catalog().find("Line SDL");
    CHECK(pin_key_for(doc.nodes[0], *spec, "Length") == std::optional<std::string>("length"));
    CHECK_FALSE(pin_key_for(doc.nodes[0], *spec, "Start").has_value());
}

TEST_CASE("golden fixtures are stored canonically and round-trip") {
    for (const char* name : {"truss", "umbrella", "bridge"}) {
        const auto doc = load_fixture(name);
        CHECK(parse_document_strict(serialize(doc)) == doc);
        CHECK(document_to_json(doc).dump(2) + "\n" == read_text(fixture_path(name)));
    }
}
