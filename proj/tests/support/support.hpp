#pragma once

#include "sforge/graph_ir.hpp"
#include "sforge/registry.hpp"

#include <filesystem>
#include <random>
#include <set>
#include <string>

namespace sforge::testing {

std::filesystem::path source_dir();
std::filesystem::path fixture_path(const std::string& name);  // "truss" -> fixtures/truss.pscript.json
std::filesystem::path mock_dir();
std::string read_text(const std::filesystem::path& path);
ScriptDocument load_fixture(const std::string& name);

// Any document the strict parser accepts: arbitrary ids, names, pins and edges, possibly cyclic.
ScriptDocument random_document(std::mt19937_64& rng);

struct GeneratedGraph {
    ScriptDocument document;
    std::set<EdgeRef> mistyped;  // edges deliberately given the wrong kind
};

// Well-typed graphs over the built-in catalog whose values cannot trip a kernel's runtime checks:
// sliders are positive, counts come from integer sliders, vectors are nonzero, point lists for
// polylines and lofts always hold at least two items. With `faults`, some vector or point inputs are
// rewired to a number source, each on its own target node.
GeneratedGraph random_safe_graph(std::mt19937_64& rng, bool faults);

}  // namespace sforge::testing
