#pragma once

#include "sforge/evaluator.hpp"
#include "sforge/geometry.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace sforge {

// Everything drawable in one result: surfaces merged into one mesh, curves as sampled polylines.
struct Scene {
    Mesh mesh;
    std::vector<std::vector<Point>> polylines;
    std::vector<Point> points;
};

constexpr int kRenderCurveSegments = 64;

Scene build_scene(const EvalResult& result, int u_count = kMeshU, int v_count = kMeshV);

// Wavefront OBJ, 1-based indices: `v`, then `f` for triangles, `l` for polylines, `p` for points.
std::string to_obj(const Scene& scene);
std::string mesh_to_obj(const Mesh& mesh);
// {"vertices":[[x,y,z]...],"faces":[[i,j,k]...]}, 0-based.
nlohmann::ordered_json mesh_to_json(const Mesh& mesh);
nlohmann::ordered_json scene_to_json(const Scene& scene);

}  // namespace sforge
