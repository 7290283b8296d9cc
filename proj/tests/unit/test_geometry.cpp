#include "criteria.hpp"

#include "sforge/components.hpp"
#include "sforge/geometry.hpp"
#include "sforge/registry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace sforge;
using namespace sforge::testing;
using std::numbers::pi;

namespace {

std::vector<GeomValue> run(std::string_view name, std::vector<GeomValue> in) {
    const Kernel* k = find_kernel(name);
    REQUIRE(k != nullptr);
    return (*k)(in);
}

GeomValue list(std::vector<GeomValue> items) { return make_list(std::move(items)); }

std::vector<double> numbers(const GeomValue& v) {
    std::vector<double> out;
    for (const auto& x : v.get_if<ListV>()->items) out.push_back(*x.get_if<double>());
    return out;
}

Point pt(const GeomValue& v) { return *v.get_if<Point>(); }

bool near(Point a, Point b, double tol = 1e-9) { return distance(a, b) <= tol; }

double area(const Surface& s, int u, int v) { return mesh_area(sample_mesh(s, u, v)); }

const Circle kUnit{{0, 0, 0}, {0, 0, 1}, 1.0};

}  // namespace

TEST_CASE("geometry oracle criterion") {
    const auto o = check_geometry_oracles();
    INFO(o.detail);
    CHECK(o.pass);
}

TEST_CASE("every catalog component has a kernel") {
    for (const auto& c : builtin_catalog().components()) CHECK_MESSAGE(find_kernel(c.canonical_name) != nullptr, c.canonical_name);
    CHECK(kernel_names().size() == builtin_catalog().size());
}

TEST_CASE("Number Slider and Panel pass their value through") {
    CHECK(run("Number Slider", {4.0})[0] == GeomValue(4.0));
    CHECK(run("Number Slider", {-2.5})[0] == GeomValue(-2.5));
    CHECK(run("Number Slider", {0.0})[0] == GeomValue(0.0));
    CHECK(run("Panel", {Text{"hello"}})[0] == GeomValue(Text{"hello"}));
    CHECK(run("Panel", {Text{""}})[0] == GeomValue(Text{""}));
    CHECK(run("Panel", {3.0})[0] == GeomValue(3.0));
}

TEST_CASE("Construct Point") {
    CHECK(run("Construct Point", {1.0, 2.0, 3.0})[0] == GeomValue(Point{1, 2, 3}));
    CHECK(run("Construct Point", {0.0, 0.0, 0.0})[0] == GeomValue(Point{}));
    CHECK(run("Construct Point", {Vector{1, 0, 0}, 0.0, 0.0})[0].is_error());
}

TEST_CASE("Unit X, Unit Y, Unit Z") {
    CHECK(run("Unit X", {1.0})[0] == GeomValue(Vector{1, 0, 0}));
    CHECK(run("Unit X", {-3.0})[0] == GeomValue(Vector{-3, 0, 0}));
    CHECK(run("Unit X", {Point{}})[0].is_error());
    CHECK(run("Unit Y", {2.0})[0] == GeomValue(Vector{0, 2, 0}));
    CHECK(run("Unit Y", {0.0})[0] == GeomValue(Vector{0, 0, 0}));
    CHECK(run("Unit Y", {Text{"1"}})[0].is_error());
    CHECK(run("Unit Z", {1.0})[0] == GeomValue(Vector{0, 0, 1}));
    CHECK(run("Unit Z", {0.5})[0] == GeomValue(Vector{0, 0, 0.5}));
    CHECK(run("Unit Z", {Vector{}})[0].is_error());
}

TEST_CASE("Vector XYZ gives the vector and its length") {
    auto out = run("Vector XYZ", {3.0, 4.0, 0.0});
    CHECK(out[0] == GeomValue(Vector{3, 4, 0}));
    CHECK(out[1] == GeomValue(5.0));
    CHECK(run("Vector XYZ", {0.0, 0.0, 0.0})[1] == GeomValue(0.0));
    out = run("Vector XYZ", {Point{}, 0.0, 0.0});
    CHECK(out[0].is_error());
    CHECK(out[1].is_error());
}

TEST_CASE("Line") {
    CHECK(run("Line", {Point{0, 0, 0}, Point{1, 2, 3}})[0] == GeomValue(LineSeg{{0, 0, 0}, {1, 2, 3}}));
    const auto c = *run("Line", {Point{0, 0, 0}, Point{10, 0, 0}})[0].get_if<Curve>();
    CHECK(length(c) == doctest::Approx(10.0));
    CHECK(near(point_at(c, 0.25), {2.5, 0, 0}));
    CHECK(run("Line", {1.0, Point{}})[0].is_error());
}

TEST_CASE("Line SDL") {
    CHECK(run("Line SDL", {Point{1, 1, 1}, Vector{0, 0, 5}, 2.0})[0] == GeomValue(LineSeg{{1, 1, 1}, {1, 1, 3}}));
    const auto c = *run("Line SDL", {Point{}, Vector{3, 4, 0}, 10.0})[0].get_if<Curve>();
    CHECK(near(end_point(c), {6, 8, 0}));
    CHECK(run("Line SDL", {Point{}, Vector{}, 1.0})[0].is_error());
    CHECK(run("Line SDL", {Point{}, 2.0, 1.0})[0].is_error());
}

TEST_CASE("Polyline") {
    const auto v = run("Polyline", {list({Point{0, 0, 0}, Point{3, 0, 0}, Point{3, 4, 0}})})[0];
    REQUIRE(v.get_if<Curve>() != nullptr);
    CHECK(length(*v.get_if<Curve>()) == doctest::Approx(7.0));
    CHECK(run("Polyline", {list({Point{}})})[0].is_error());
    CHECK(run("Polyline", {list({1.0, 2.0})})[0].is_error());
}

TEST_CASE("Circle") {
    const auto v = run("Circle", {Point{0, 0, 0}, Vector{0, 0, 1}, 2.0})[0];
    REQUIRE(v.get_if<Curve>() != nullptr);
    const Curve c = *v.get_if<Curve>();
    CHECK(length(c) == doctest::Approx(4 * pi));
    CHECK(is_closed(c));
    CHECK(distance(point_at(c, 0.3), Point{}) == doctest::Approx(2.0));
    CHECK(run("Circle", {Point{}, Vector{0, 0, 1}, 0.0})[0].is_error());
    CHECK(run("Circle", {Point{}, Vector{0, 0, 0}, 1.0})[0].is_error());
    CHECK(run("Circle", {2.0, Vector{0, 0, 1}, 1.0})[0].is_error());
}

TEST_CASE("Series") {
    CHECK(numbers(eval_series(0, 2, 4)) == std::vector<double>{0, 2, 4, 6});
    CHECK(numbers(eval_series(5, 0, 3)) == std::vector<double>{5, 5, 5});
    CHECK(numbers(eval_series(1, 0.5, 0)).empty());
    CHECK(eval_series(0, 1, -1).is_error());
    CHECK(run("Series", {0.0, 10.0, 3.0})[0] == list({0.0, 10.0, 20.0}));
}

TEST_CASE("Range") {
    CHECK(numbers(eval_range(0, 1, 4)) == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
    CHECK(numbers(eval_range(10, 0, 2)) == std::vector<double>{10, 5, 0});
    CHECK(numbers(eval_range(3, 3, 1)) == std::vector<double>{3, 3});
    CHECK(eval_range(0, 1, 0).is_error());
}

TEST_CASE("Divide Curve") {
    const auto line = eval_divide_curve(GeomValue(LineSeg{{0, 0, 0}, {10, 0, 0}}), 5);
    REQUIRE(line.is_list());
    const auto& items = line.get_if<ListV>()->items;
    REQUIRE(items.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(near(pt(items[i]), {2.0 * static_cast<double>(i), 0, 0}));

    const auto circle = eval_divide_curve(GeomValue(kUnit), 4);
    const auto& quarter = circle.get_if<ListV>()->items;
    REQUIRE(quarter.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(distance(pt(quarter[i]), pt(quarter[(i + 1) % 4])) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    }
    CHECK(eval_divide_curve(GeomValue(kUnit), 0).is_error());
    CHECK(eval_divide_curve(GeomValue(3.0), 2).is_error());

    const auto out = run("Divide Curve", {GeomValue(LineSeg{{0, 0, 0}, {1, 0, 0}}), 2.0});
    CHECK(numbers(out[1]) == std::vector<double>{0, 0.5, 1});
}

TEST_CASE("Move") {
    CHECK(eval_move(Point{1, 2, 3}, Vector{0, 0, 5}) == GeomValue(Point{1, 2, 8}));
    const Polyline pl{{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}}};
    Polyline moved = pl;
    for (auto& p : moved.vertices) p = p + Vector{2, 0, -1};
    CHECK(eval_move(GeomValue(pl), Vector{2, 0, -1}) == GeomValue(moved));
    const auto bad = eval_move(Point{}, 3.0);
    REQUIRE(bad.is_error());
    CHECK(bad.get_if<ErrorV>()->message == "Move requires a vector input");
}

TEST_CASE("Extrude Linear") {
    const auto s = eval_extrude_linear(GeomValue(kUnit), Vector{0, 0, 2});
    REQUIRE(s.get_if<Surface>() != nullptr);
    CHECK(area(*s.get_if<Surface>(), 64, 32) == doctest::Approx(4 * pi).epsilon(0.01));
    const auto patch = eval_extrude_linear(GeomValue(LineSeg{{0, 0, 0}, {3, 0, 0}}), Vector{0, 0, 2});
    CHECK(std::abs(area(*patch.get_if<Surface>(), 2, 2) - 6.0) < 1e-9);
    CHECK(eval_extrude_linear(GeomValue(kUnit), 2.0).is_error());
    CHECK(eval_extrude_linear(GeomValue(kUnit), Vector{}).is_error());
    const Surface ex = Extrusion{LineSeg{{0, 0, 0}, {1, 0, 0}}, {0, 1, 0}};
    CHECK(near(point_at(ex, 0.5, 0.5), {0.5, 0.5, 0}));
}

TEST_CASE("Loft") {
    const auto strip = eval_loft(list({GeomValue(LineSeg{{0, 0, 0}, {2, 0, 0}}), GeomValue(LineSeg{{0, 1, 0}, {2, 1, 0}})}));
    REQUIRE(strip.get_if<Surface>() != nullptr);
    CHECK(std::abs(area(*strip.get_if<Surface>(), 5, 5) - 2.0) < 1e-6);
    const auto annulus = eval_loft(list({GeomValue(kUnit), GeomValue(Circle{{0, 0, 0}, {0, 0, 1}, 2.0})}));
    CHECK(area(*annulus.get_if<Surface>(), 64, 32) == doctest::Approx(3 * pi).epsilon(0.01));
    CHECK(eval_loft(list({GeomValue(kUnit)})).is_error());
    CHECK(eval_loft(list({1.0, 2.0})).is_error());
}

TEST_CASE("Nurbs Curve") {
    const auto two = eval_nurbs(list({Point{0, 0, 0}, Point{2, 2, 2}}), 3);
    REQUIRE(two.get_if<Curve>() != nullptr);
    CHECK(std::get<Nurbs>(*two.get_if<Curve>()).degree == 1);
    CHECK(near(point_at(*two.get_if<Curve>(), 0.5), {1, 1, 1}));

    const auto straight = eval_nurbs(list({Point{0, 0, 0}, Point{1, 1, 0}, Point{2, 2, 0}, Point{5, 5, 0}}), 3);
    for (const auto& p : sample_curve(*straight.get_if<Curve>(), 50)) CHECK(std::abs(p.x - p.y) < 1e-9);

    const auto ends = eval_nurbs(list({Point{1, 0, 0}, Point{0, 4, 0}, Point{3, 3, 3}}), 2);
    CHECK(near(start_point(*ends.get_if<Curve>()), {1, 0, 0}));
    CHECK(near(end_point(*ends.get_if<Curve>()), {3, 3, 3}));
    CHECK(eval_nurbs(list({Point{}}), 3).is_error());
}

TEST_CASE("Interpolate Curve passes through its points") {
    const std::vector<GeomValue> pts{Point{0, 0, 0}, Point{1, 2, 0}, Point{3, 1, 1}, Point{4, 4, 0}};
    const auto v = eval_interpolate(list(pts), 3);
    REQUIRE(v.get_if<Curve>() != nullptr);
    const auto samples = sample_curve(*v.get_if<Curve>(), 2000);
    for (const auto& p : pts) {
        double best = 1e9;
        for (const auto& s : samples) best = std::min(best, distance(s, pt(p)));
        CHECK(best < 1e-2);
    }
    CHECK(near(start_point(*v.get_if<Curve>()), {0, 0, 0}));
    CHECK(near(end_point(*v.get_if<Curve>()), {4, 4, 0}));
    CHECK(eval_interpolate(list({Point{}}), 3).is_error());
}

TEST_CASE("arithmetic components") {
    CHECK(run("Addition", {2.0, 3.0})[0] == GeomValue(5.0));
    CHECK(run("Addition", {-1.0, 1.0})[0] == GeomValue(0.0));
    CHECK(run("Addition", {Point{}, 1.0})[0].is_error());
    CHECK(run("Subtraction", {2.0, 3.0})[0] == GeomValue(-1.0));
    CHECK(run("Subtraction", {0.5, 0.25})[0] == GeomValue(0.25));
    CHECK(run("Subtraction", {Text{"a"}, 1.0})[0].is_error());
    CHECK(run("Multiplication", {2.0, 3.0})[0] == GeomValue(6.0));
    CHECK(run("Multiplication", {1.0, 1.0})[0] == GeomValue(1.0));
    CHECK(run("Multiplication", {-2.0, 0.0})[0] == GeomValue(-0.0));
    CHECK(run("Division", {6.0, 3.0})[0] == GeomValue(2.0));
    CHECK(run("Division", {0.0, 1.0})[0] == GeomValue(0.0));
    CHECK(run("Division", {1.0, 0.0})[0].is_error());
    CHECK(run("Negative", {2.0})[0] == GeomValue(-2.0));
    CHECK(run("Negative", {-0.5})[0] == GeomValue(0.5));
    CHECK(run("Negative", {Vector{}})[0].is_error());
}

TEST_CASE("Merge and List Item") {
    CHECK(run("Merge", {list({1.0, 2.0}), 3.0, list({})})[0] == list({1.0, 2.0, 3.0}));
    CHECK(run("Merge", {list({}), list({}), list({})})[0] == list({}));
    CHECK(run("Merge", {Point{1, 0, 0}, Point{2, 0, 0}, list({})})[0] == list({Point{1, 0, 0}, Point{2, 0, 0}}));
    CHECK(run("List Item", {list({5.0, 6.0, 7.0}), 1.0})[0] == GeomValue(6.0));
    CHECK(run("List Item", {list({5.0}), 0.0})[0] == GeomValue(5.0));
    CHECK(run("List Item", {list({5.0}), 3.0})[0].is_error());
    CHECK(run("List Item", {list({5.0}), -1.0})[0].is_error());
}

TEST_CASE("sample_mesh grid and area") {
    const Surface unit_patch = Extrusion{LineSeg{{0, 0, 0}, {1, 0, 0}}, {0, 1, 0}};
    const Mesh m = sample_mesh(unit_patch, 2, 2);
    CHECK(m.vertices.size() == 4);
    CHECK(m.faces.size() == 2);
    CHECK(mesh_area(m) == 1.0);
    const Mesh g = sample_mesh(Extrusion{kUnit, {0, 0, 1}}, 9, 4);
    CHECK(g.vertices.size() == 36);
    CHECK(g.faces.size() == 2u * 8 * 3);
    for (const auto& f : g.faces) {
        for (auto i : f) CHECK(i < g.vertices.size());
        CHECK(triangle_area(g.vertices[f[0]], g.vertices[f[1]], g.vertices[f[2]]) > 0.0);
    }
}

TEST_CASE("mesh area converges monotonically on the analytic cases") {
    const std::vector<std::pair<Surface, double>> cases{
        {Extrusion{kUnit, {0, 0, 2}}, 4 * pi},
        {Loft{{kUnit, Circle{{0, 0, 0}, {0, 0, 1}, 2.0}}}, 3 * pi},
        {Extrusion{Circle{{1, 1, 1}, {1, 0, 1}, 0.5}, {0, 3, 0}}, 2 * pi * 0.5 * 3 * std::sqrt(0.5)},
    };
    for (const auto& [s, want] : cases) {
        double last = 1e9;
        for (int u = 8; u <= 128; u *= 2) {
            const double err = std::abs(area(s, u, u / 2) - want);
            CHECK(err < last);
            last = err;
        }
    }
}

TEST_CASE("translation invariance of every geometric kernel") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> d(-50, 50);
    for (int i = 0; i < 100; ++i) {
        const Vector t{d(rng), d(rng), d(rng)};
        const Point a{d(rng), d(rng), d(rng)};
        const Point b{d(rng), d(rng), d(rng)};
        const Point c{d(rng), d(rng), d(rng)};
        const Vector axis{d(rng), d(rng), d(rng)};
        auto same = [&](const GeomValue& moved_input, const GeomValue& original) {
            const auto expect = translate(original, t);
            if (const auto* x = moved_input.get_if<Curve>()) {
                for (double s : {0.0, 0.3, 0.7, 1.0}) CHECK(near(point_at(*x, s), point_at(*expect.get_if<Curve>(), s), 1e-7));
            } else if (const auto* x = moved_input.get_if<Surface>()) {
                for (double s : {0.0, 0.4, 1.0}) {
                    CHECK(near(point_at(*x, s, 0.5), point_at(*expect.get_if<Surface>(), s, 0.5), 1e-7));
                }
            } else if (const auto* l = moved_input.get_if<ListV>()) {
                const auto& want = expect.get_if<ListV>()->items;
                REQUIRE(l->items.size() == want.size());
                for (std::size_t k = 0; k < want.size(); ++k) CHECK(near(pt(l->items[k]), pt(want[k]), 1e-7));
            } else {
                CHECK(near(pt(moved_input), pt(expect), 1e-7));
            }
        };
        same(eval_line(a + t, b + t), eval_line(a, b));
        same(eval_line_sdl(a + t, axis, 3.0), eval_line_sdl(a, axis, 3.0));
        same(eval_polyline(list({a + t, b + t, c + t})), eval_polyline(list({a, b, c})));
        same(eval_circle(a + t, axis, 2.0), eval_circle(a, axis, 2.0));
        same(eval_nurbs(list({a + t, b + t, c + t}), 2), eval_nurbs(list({a, b, c}), 2));
        same(eval_interpolate(list({a + t, b + t, c + t}), 2), eval_interpolate(list({a, b, c}), 2));
        same(eval_move(a + t, axis), eval_move(a, axis));
        const GeomValue line = eval_line(a, b);
        const GeomValue moved_line = eval_line(a + t, b + t);
        same(eval_extrude_linear(moved_line, axis), eval_extrude_linear(line, axis));
        same(eval_loft(list({moved_line, eval_line(c + t, a + t)})), eval_loft(list({line, eval_line(c, a)})));
        same(eval_divide_curve(moved_line, 5), eval_divide_curve(line, 5));
    }
}

TEST_CASE("random B-splines interpolate their ends and stay in the control hull box") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> d(-10, 10);
    for (int i = 0; i < 100; ++i) {
        Nurbs n;
        const int count = 2 + static_cast<int>(rng() % 10);
        for (int k = 0; k < count; ++k) n.control.push_back({d(rng), d(rng), d(rng)});
        n.degree = 1 + static_cast<int>(rng() % std::min(5, count - 1));
        CHECK(distance(nurbs_point(n, 0), n.control.front()) < 1e-9);
        CHECK(distance(nurbs_point(n, 1), n.control.back()) < 1e-9);
        Point lo = n.control.front();
        Point hi = lo;
        for (const auto& p : n.control) {
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
        }
        // Convex combinations of the control points cannot leave their bounding box.
        for (int s = 0; s <= 40; ++s) {
            const Point p = nurbs_point(n, s / 40.0);
            CHECK(p.x >= lo.x - 1e-9);
            CHECK(p.y >= lo.y - 1e-9);
            CHECK(p.z >= lo.z - 1e-9);
            CHECK(p.x <= hi.x + 1e-9);
            CHECK(p.y <= hi.y + 1e-9);
            CHECK(p.z <= hi.z + 1e-9);
        }
        const auto knots = clamped_uniform_knots(n.control.size(), n.degree);
        CHECK(knots.size() == n.control.size() + static_cast<std::size_t>(n.degree) + 1);
        CHECK(std::is_sorted(knots.begin(), knots.end()));
    }
}

TEST_CASE("kernels are pure") {
    const auto a = eval_interpolate(list({Point{0, 0, 0}, Point{1, 3, 0}, Point{2, 0, 1}}), 3);
    const auto b = eval_interpolate(list({Point{0, 0, 0}, Point{1, 3, 0}, Point{2, 0, 1}}), 3);
    CHECK(a == b);
    const Surface s = Loft{{kUnit, Circle{{0, 0, 1}, {0, 0, 1}, 0.5}}};
    const Mesh m1 = sample_mesh(s, 16, 8);
    const Mesh m2 = sample_mesh(s, 16, 8);
    CHECK(m1.faces == m2.faces);
    CHECK(m1.vertices == m2.vertices);
}
