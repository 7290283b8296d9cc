#include "sforge/agents.hpp"
#include "sforge/evaluator.hpp"
#include "sforge/render.hpp"
#include "sforge/service.hpp"
#include "sforge/validator.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace sforge;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUser = 1;
constexpr int kExitDesign = 2;

struct UserError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UserError(fmt::format("cannot read {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UserError(fmt::format("cannot write {}", path.string()));
    out << text;
}

std::string location_text(const ojson& d) {
    if (d.contains("edge")) {
        const auto& e = d["edge"];
        return fmt::format("edge {}.{}->{}.{}", e["from"]["id"].get<NodeId>(), e["from"]["port"].get<std::string>(),
                           e["to"]["id"].get<NodeId>(), e["to"]["port"].get<std::string>());
    }
    if (d.contains("node") && d.contains("port")) {
        return fmt::format("node {}.{}", d["node"].get<NodeId>(), d["port"].get<std::string>());
    }
    if (d.contains("node")) return fmt::format("node {}", d["node"].get<NodeId>());
    return "document";
}

void print_diagnostics(const ojson& diags) {
    for (const auto& d : diags) {
        std::cout << fmt::format("{} {} {}: {}", d["severity"].get<std::string>(), d["rule"].get<std::string>(),
                                 location_text(d), d["message"].get<std::string>());
        if (d.contains("repair")) std::cout << fmt::format("  [repair {}]", d["repair"]["id"].get<std::string>());
        std::cout << '\n';
    }
}

struct Common {
    std::string catalog_path;
    std::string backend;
    std::string fixtures;
    std::string out;
    bool json = false;
    std::vector<std::string> sets;

    Catalog catalog_storage;

    const Catalog& catalog() {
        if (catalog_path.empty()) return builtin_catalog();
        try {
            catalog_storage = load_catalog_file(catalog_path);
        } catch (const std::exception& e) {
            throw UserError(e.what());
        }
        return catalog_storage;
    }

    std::shared_ptr<Backend> make() const {
        BackendConfig defaults;
        defaults.fixtures_dir = SFORGE_DEFAULT_FIXTURES;
        BackendConfig config;
        try {
            config = BackendConfig::from_env(defaults);
        } catch (const BackendError& e) {
            throw UserError(e.what());
        }
        if (!backend.empty()) config.kind = backend == "live" ? BackendKind::live : BackendKind::mock;
        if (!fixtures.empty()) config.fixtures_dir = fixtures;
        try {
            return make_backend(config);
        } catch (const BackendError& e) {
            throw UserError(e.what());
        }
    }

    std::map<NodeId, double> overrides() const {
        std::map<NodeId, double> out;
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            try {
                if (eq == std::string::npos) throw std::invalid_argument(s);
                std::size_t used = 0;
                const NodeId id = std::stoll(s.substr(0, eq), &used);
                if (used != eq) throw std::invalid_argument(s);
                const std::string value = s.substr(eq + 1);
                out[id] = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument(s);
            } catch (const std::exception&) {
                throw UserError(fmt::format("--set expects <node id>=<number>, got '{}'", s));
            }
        }
        return out;
    }
};

LoadedDocument load(const std::string& path) { return load_document(std::string_view(read_file(path))); }

int cmd_generate(Common& c, const std::string& prompt) {
    if (prompt.find_first_not_of(" \t\r\n") == std::string::npos) throw UserError("prompt is empty");
    const Catalog& catalog = c.catalog();
    auto backend = c.make();
    PipelineTranscript t = run_pipeline(prompt, catalog, *backend);
    const ojson tj = to_json(t);
    const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
    write_file(dir / "transcript.json", tj.dump(2) + "\n");
    if (t.document) write_file(dir / "script.pscript.json", document_to_json(*t.document).dump(2) + "\n");

    if (c.json) {
        std::cout << tj.dump() << '\n';
    } else {
        for (const auto& s : t.stages) {
            std::cout << fmt::format("stage {}: {} after {} attempt{}\n", s.stage, s.ok() ? "parsed" : "failed",
                                     s.attempts, s.attempts == 1 ? "" : "s");
        }
        print_diagnostics(to_json(t.diagnostics));
        if (t.document) std::cout << "wrote " << (dir / "script.pscript.json").string() << '\n';
    }
    if (!t.document) {
        std::cerr << "error: " << t.error << '\n';
        return kExitUser;
    }
    return count_severity(t.diagnostics, Severity::error) > 0 ? kExitDesign : kExitOk;
}

int cmd_validate(Common& c, const std::string& path) {
    const ojson body = validate_response(load(path), c.catalog());
    if (c.json) {
        std::cout << body.dump() << '\n';
    } else {
        print_diagnostics(body["diagnostics"]);
        if (body["diagnostics"].empty()) std::cout << "no diagnostics\n";
    }
    return has_errors(body) ? kExitDesign : kExitOk;
}

int cmd_repair(Common& c, const std::string& path, const std::vector<std::string>& ids, bool all) {
    std::optional<std::vector<std::string>> chosen;
    if (!all) chosen = ids;
    if (!all && ids.empty()) throw UserError("name repairs with --id, or pass --all for the suggested set");
    const ojson body = repair_response(load(path), chosen, c.catalog());
    const std::string doc = body["document"].dump(2) + "\n";
    if (!c.out.empty()) write_file(c.out, doc);
    if (c.json) {
        std::cout << body.dump() << '\n';
    } else {
        for (const auto& id : body["applied"]) std::cout << "applied " << id.get<std::string>() << '\n';
        print_diagnostics(body["diagnostics"]);
        if (c.out.empty()) std::cout << doc;
    }
    return has_errors(body) ? kExitDesign : kExitOk;
}

int cmd_eval(Common& c, const std::string& path) {
    const ojson body = evaluate_response(load(path), c.overrides(), c.catalog());
    if (!c.out.empty()) write_file(c.out, body.dump() + "\n");
    if (c.json) {
        std::cout << body.dump() << '\n';
    } else {
        for (const auto& f : body["failures"]) {
            std::cout << fmt::format("failed node {} (origin {}): {}\n", f["node"].get<NodeId>(),
                                     f["origin"].get<NodeId>(), f["message"].get<std::string>());
        }
        for (const auto& d : body["drawables"]) {
            std::cout << fmt::format("drawable node {}.{}: {}\n", d["node"].get<NodeId>(),
                                     d["port"].get<std::string>(), d["value"]["type"].get<std::string>());
        }
        for (const auto& n : body["notes"]) std::cout << "note: " << n["message"].get<std::string>() << '\n';
    }
    return body["failures"].empty() ? kExitOk : kExitDesign;
}

int cmd_render(Common& c, const std::string& path) {
    if (c.out.empty()) throw UserError("render needs -o <file.obj|file.json>");
    const LoadedDocument doc = load(path);
    const Catalog& catalog = c.catalog();
    BuildResult built = [&] {
        try {
            return build_graph(doc.document, catalog);
        } catch (const CycleError& e) {
            throw ApiError(422, "cycle", e.what());
        }
    }();
    EvalResult result;
    try {
        result = evaluate_with_overrides(built.graph, c.overrides());
    } catch (const OverrideError& e) {
        throw UserError(e.what());
    }
    const Scene scene = build_scene(result);
    const bool as_json = fs::path(c.out).extension() == ".json";
    write_file(c.out, as_json ? scene_to_json(scene).dump() + "\n" : to_obj(scene));
    std::cout << fmt::format("wrote {}: {} vertices, {} triangles, {} polylines, {} points\n", c.out,
                             scene.mesh.vertices.size(), scene.mesh.faces.size(), scene.polylines.size(),
                             scene.points.size());
    return kExitOk;
}

int cmd_registry(Common& c, const std::string& resolve) {
    const Catalog& catalog = c.catalog();
    if (!resolve.empty()) {
        const Resolution r = resolve_name(catalog, resolve);
        ojson j = ojson::object();
        j["schema_version"] = kSchemaVersion;
        j["query"] = resolve;
        j["kind"] = r.kind == MatchKind::exact ? "exact" : r.kind == MatchKind::fuzzy ? "fuzzy" : "unknown";
        if (r.match) j["component"] = catalog.at(r.match->index).canonical_name;
        j["nearest"] = ojson::array();
        for (const auto& m : r.nearest) {
            j["nearest"].push_back({{"component", catalog.at(m.index).canonical_name}, {"distance", m.distance}});
        }
        if (c.json) {
            std::cout << j.dump() << '\n';
        } else {
            std::cout << fmt::format("{}: {}{}\n", resolve, j["kind"].get<std::string>(),
                                     r.match ? " -> " + j["component"].get<std::string>() : "");
        }
        return r.kind == MatchKind::unknown ? kExitDesign : kExitOk;
    }
    if (c.json) {
        std::cout << registry_response(catalog).dump() << '\n';
        return kExitOk;
    }
    for (const auto& comp : catalog.components()) {
        std::vector<std::string> ins;
        std::vector<std::string> outs;
        for (const auto& p : comp.inputs) ins.push_back(fmt::format("{}:{}", p.name, to_string(p.kind)));
        for (const auto& p : comp.outputs) outs.push_back(fmt::format("{}:{}", p.name, to_string(p.kind)));
        std::cout << fmt::format("{:<18} {:<10} ({}) -> ({})\n", comp.canonical_name, to_string(comp.category),
                                 fmt::join(ins, ", "), fmt::join(outs, ", "));
    }
    return kExitOk;
}

Service* g_service = nullptr;

int cmd_serve(Common& c, int port, const std::string& host, const std::string& static_dir) {
    ServiceOptions options;
    options.host = host;
    options.port = port;
    if (!static_dir.empty()) options.static_dir = static_dir;
    Service service(c.catalog(), c.make(), options);
    const int bound = service.bind();
    if (bound < 0) throw UserError(fmt::format("cannot listen on {}:{}", host, port));
    std::cout << fmt::format("listening on http://{}:{}/api/v1\n", host, bound) << std::flush;
    g_service = &service;
    std::signal(SIGINT, [](int) { g_service->stop(); });
    std::signal(SIGTERM, [](int) { g_service->stop(); });
    service.run();
    g_service = nullptr;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate, check and evaluate parametric scripts"};
    app.require_subcommand(1);
    Common c;

    auto add_catalog = [&](CLI::App* sub) { sub->add_option("--catalog", c.catalog_path, "Catalog JSON file"); };
    auto add_backend = [&](CLI::App* sub) {
        sub->add_option("--backend", c.backend, "Text generation backend")->check(CLI::IsMember({"live", "mock"}));
        sub->add_option("--fixtures", c.fixtures, "Mock reply directory");
    };

    std::string prompt;
    auto* gen = app.add_subcommand("generate", "Run the three-stage pipeline on a prompt");
    gen->add_option("prompt", prompt, "Design prompt")->required();
    gen->add_option("-o,--out", c.out, "Run directory");
    gen->add_flag("--json", c.json, "Print the transcript as JSON");
    add_catalog(gen);
    add_backend(gen);

    std::string file;
    auto* val = app.add_subcommand("validate", "Lint a script document");
    val->add_option("file", file, "Script document")->required();
    val->add_flag("--json", c.json, "Machine-readable output");
    add_catalog(val);

    std::vector<std::string> ids;
    bool all = false;
    auto* rep = app.add_subcommand("repair", "Apply suggested repairs");
    rep->add_option("file", file, "Script document")->required();
    rep->add_option("--id", ids, "Repair id (repeatable)");
    rep->add_flag("--all", all, "Apply the suggested repair set");
    rep->add_option("-o,--out", c.out, "Write the repaired document here");
    rep->add_flag("--json", c.json, "Machine-readable output");
    add_catalog(rep);

    auto* ev = app.add_subcommand("eval", "Evaluate a script document");
    ev->add_option("file", file, "Script document")->required();
    ev->add_option("--set", c.sets, "Slider override <node id>=<value> (repeatable)");
    ev->add_option("-o,--out", c.out, "Write the result JSON here");
    ev->add_flag("--json", c.json, "Machine-readable output");
    add_catalog(ev);

    auto* ren = app.add_subcommand("render", "Evaluate and export drawables as OBJ or scene JSON");
    ren->add_option("file", file, "Script document")->required();
    ren->add_option("--set", c.sets, "Slider override <node id>=<value> (repeatable)");
    ren->add_option("-o,--out", c.out, "Output .obj or .json")->required();
    add_catalog(ren);

    std::string resolve;
    auto* reg = app.add_subcommand("registry", "List catalog components");
    reg->add_option("--resolve", resolve, "Resolve a component name");
    reg->add_flag("--json", c.json, "Machine-readable output");
    add_catalog(reg);

    int port = 7878;
    std::string host = "127.0.0.1";
    std::string static_dir;
    auto* srv = app.add_subcommand("serve", "Serve the HTTP API");
    srv->add_option("--port", port, "Port, 0 for any free port");
    srv->add_option("--host", host, "Listen address");
    srv->add_option("--static", static_dir, "Directory of web assets to serve at /");
    add_catalog(srv);
    add_backend(srv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUser;
    }

    try {
        if (*gen) return cmd_generate(c, prompt);
        if (*val) return cmd_validate(c, file);
        if (*rep) return cmd_repair(c, file, ids, all);
        if (*ev) return cmd_eval(c, file);
        if (*ren) return cmd_render(c, file);
        if (*reg) return cmd_registry(c, resolve);
        if (*srv) return cmd_serve(c, port, host, static_dir);
    } catch (const ApiError& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (c.json) std::cout << e.body().dump() << '\n';
        return kExitUser;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUser;
    }
    return kExitUser;
}
