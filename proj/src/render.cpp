#include "sforge/render.hpp"

#include <fmt/format.h>

namespace sforge {

namespace {

void append_mesh(Mesh& into, const Mesh& m) {
    const auto base = static_cast<std::uint32_t>(into.vertices.size());
    into.vertices.insert(into.vertices.end(), m.vertices.begin(), m.vertices.end());
    for (const auto& f : m.faces) into.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
}

void add_item(Scene& s, const GeomValue& v, int u_count, int v_count) {
    if (const auto* p = v.get_if<Point>()) {
        s.points.push_back(*p);
    } else if (const auto* c = v.get_if<Curve>()) {
        s.polylines.push_back(sample_curve(*c, kRenderCurveSegments));
    } else if (const auto* surf = v.get_if<Surface>()) {
        append_mesh(s.mesh, sample_mesh(*surf, u_count, v_count));
    }
}

std::string vertex_line(Point p) { return fmt::format("v {} {} {}\n", p.x, p.y, p.z); }

}  // namespace

Scene build_scene(const EvalResult& result, int u_count, int v_count) {
    Scene s;
    for (const auto& item : drawable_items(result)) add_item(s, item, u_count, v_count);
    return s;
}

std::string mesh_to_obj(const Mesh& mesh) {
    std::string out;
    for (const auto& p : mesh.vertices) out += vertex_line(p);
    for (const auto& f : mesh.faces) out += fmt::format("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1);
    return out;
}

std::string to_obj(const Scene& scene) {
    std::string out = "# sforge scene\n";
    out += "o surfaces\n" + mesh_to_obj(scene.mesh);
    std::size_t next = scene.mesh.vertices.size() + 1;
    for (std::size_t i = 0; i < scene.polylines.size(); ++i) {
        const auto& line = scene.polylines[i];
        out += fmt::format("o curve{}\n", i);
        for (const auto& p : line) out += vertex_line(p);
        out += "l";
        for (std::size_t k = 0; k < line.size(); ++k) out += fmt::format(" {}", next + k);
        out += "\n";
        next += line.size();
    }
    if (!scene.points.empty()) {
        out += "o points\n";
        for (const auto& p : scene.points) out += vertex_line(p);
        out += "p";
        for (std::size_t k = 0; k < scene.points.size(); ++k) out += fmt::format(" {}", next + k);
        out += "\n";
    }
    return out;
}

nlohmann::ordered_json mesh_to_json(const Mesh& mesh) {
    nlohmann::ordered_json j;
    j["vertices"] = nlohmann::ordered_json::array();
    for (const auto& p : mesh.vertices) j["vertices"].push_back({p.x, p.y, p.z});
    j["faces"] = mesh.faces;
    return j;
}

nlohmann::ordered_json scene_to_json(const Scene& scene) {
    nlohmann::ordered_json j{{"schema_version", kSchemaVersion}};
    const auto mesh = mesh_to_json(scene.mesh);
    for (const auto& [k, v] : mesh.items()) j[k] = v;
    j["polylines"] = nlohmann::ordered_json::array();
    for (const auto& line : scene.polylines) {
        auto a = nlohmann::ordered_json::array();
        for (const auto& p : line) a.push_back({p.x, p.y, p.z});
        j["polylines"].push_back(std::move(a));
    }
    j["points"] = nlohmann::ordered_json::array();
    for (const auto& p : scene.points) j["points"].push_back({p.x, p.y, p.z});
    return j;
}

}  // namespace sforge
