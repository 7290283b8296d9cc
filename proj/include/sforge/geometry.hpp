#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sforge {

using NodeId = std::int64_t;

struct Vector {
    double x{};
    double y{};
    double z{};
    bool operator==(const Vector&) const = default;
};

struct Point {
    double x{};
    double y{};
    double z{};
    bool operator==(const Point&) const = default;
};

Vector operator+(Vector a, Vector b);
Vector operator-(Vector a, Vector b);
Vector operator-(Vector a);
Vector operator*(Vector a, double s);
Vector operator*(double s, Vector a);
Point operator+(Point p, Vector v);
Point operator-(Point p, Vector v);
Vector operator-(Point a, Point b);

double dot(Vector a, Vector b);
Vector cross(Vector a, Vector b);
double norm(Vector v);
Vector normalized(Vector v);
Point lerp(Point a, Point b, double t);
double distance(Point a, Point b);

// Curves. Every curve is parameterised over [0, 1].
struct LineSeg {
    Point a;
    Point b;
    bool operator==(const LineSeg&) const = default;
};

struct Polyline {
    std::vector<Point> vertices;  // >= 2
    bool operator==(const Polyline&) const = default;
};

struct Circle {
    Point center;
    Vector normal{0.0, 0.0, 1.0};
    double radius{1.0};  // > 0
    bool operator==(const Circle&) const = default;
};

// Non-rational B-spline. An empty knot vector means clamped uniform.
struct Nurbs {
    std::vector<Point> control;  // >= 2
    int degree{1};               // 1 <= degree <= control.size() - 1
    std::vector<double> knots;
    bool operator==(const Nurbs&) const = default;
};

using Curve = std::variant<LineSeg, Polyline, Circle, Nurbs>;

struct Extrusion {
    Curve profile;
    Vector direction;  // nonzero
    bool operator==(const Extrusion&) const = default;
};

// Ruled between consecutive sections.
struct Loft {
    std::vector<Curve> sections;  // >= 2
    bool operator==(const Loft&) const = default;
};

using Surface = std::variant<Extrusion, Loft>;

struct ErrorV {
    NodeId origin{0};  // 0 until the evaluator stamps the failing node
    std::string message;
    bool operator==(const ErrorV&) const = default;
};

struct Text {
    std::string value;
    bool operator==(const Text&) const = default;
};

struct GeomValue;

struct ListV {
    std::vector<GeomValue> items;
    bool operator==(const ListV& other) const;
};

enum class GeomKind { number, point, vector, curve, surface, list, error, text };

struct GeomValue {
    std::variant<double, Point, Vector, Curve, Surface, ListV, ErrorV, Text> data;

    GeomValue() : data(0.0) {}
    GeomValue(double v) : data(v) {}
    GeomValue(Point v) : data(v) {}
    GeomValue(Vector v) : data(v) {}
    GeomValue(Curve v) : data(std::move(v)) {}
    GeomValue(LineSeg v) : data(Curve{v}) {}
    GeomValue(Polyline v) : data(Curve{std::move(v)}) {}
    GeomValue(Circle v) : data(Curve{v}) {}
    GeomValue(Nurbs v) : data(Curve{std::move(v)}) {}
    GeomValue(Surface v) : data(std::move(v)) {}
    GeomValue(Extrusion v) : data(Surface{std::move(v)}) {}
    GeomValue(Loft v) : data(Surface{std::move(v)}) {}
    GeomValue(ListV v) : data(std::move(v)) {}
    GeomValue(ErrorV v) : data(std::move(v)) {}
    GeomValue(Text v) : data(std::move(v)) {}

    GeomKind kind() const { return static_cast<GeomKind>(data.index()); }
    bool is_error() const { return kind() == GeomKind::error; }
    bool is_list() const { return kind() == GeomKind::list; }

    template <class T>
    const T* get_if() const { return std::get_if<T>(&data); }

    bool operator==(const GeomValue&) const = default;
};

GeomValue error_value(std::string message);
GeomValue make_list(std::vector<GeomValue> items);
std::string kind_name(GeomKind kind);
bool is_geometry(const GeomValue& v);  // point, curve, surface, or a list holding one

// Curve queries.
Point point_at(const Curve& c, double t);
Point start_point(const Curve& c);
Point end_point(const Curve& c);
double length(const Curve& c);
bool is_closed(const Curve& c);
// Point at normalised arc length s in [0, 1].
Point point_at_fraction(const Curve& c, double s);
std::vector<Point> sample_curve(const Curve& c, int segments);

Point nurbs_point(const Nurbs& n, double t);
std::vector<double> clamped_uniform_knots(std::size_t control_count, int degree);
std::vector<double> effective_knots(const Nurbs& n);

// Surface queries. u runs along the profile/sections, v across.
Point point_at(const Surface& s, double u, double v);

Curve translate(const Curve& c, Vector v);
Surface translate(const Surface& s, Vector v);
GeomValue translate(const GeomValue& g, Vector v);

struct Mesh {
    std::vector<Point> vertices;
    std::vector<std::array<std::uint32_t, 3>> faces;
};

// u_count x v_count vertex grid, two triangles per cell; zero-area triangles are dropped.
Mesh sample_mesh(const Surface& s, int u_count, int v_count);
double mesh_area(const Mesh& m);
double triangle_area(Point a, Point b, Point c);

// Component kernels. Failures come back as ErrorV values, never as exceptions.
GeomValue eval_series(double start, double step, double count);
GeomValue eval_range(double start, double end, double steps);
GeomValue eval_divide_curve(const GeomValue& curve, double count);
std::vector<double> divide_fractions(const Curve& c, int count);
GeomValue eval_move(const GeomValue& geometry, const GeomValue& motion);
GeomValue eval_extrude_linear(const GeomValue& profile, const GeomValue& axis);
GeomValue eval_loft(const GeomValue& sections);
GeomValue eval_nurbs(const GeomValue& control, double degree);
GeomValue eval_interpolate(const GeomValue& points, double degree);
GeomValue eval_polyline(const GeomValue& vertices);
GeomValue eval_circle(const GeomValue& center, const GeomValue& normal, const GeomValue& radius);
GeomValue eval_line(const GeomValue& start, const GeomValue& end);
GeomValue eval_line_sdl(const GeomValue& start, const GeomValue& direction, const GeomValue& len);

}  // namespace sforge
