#include "sforge/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sforge {

Vector operator+(Vector a, Vector b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vector operator-(Vector a, Vector b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vector operator-(Vector a) { return {-a.x, -a.y, -a.z}; }
Vector operator*(Vector a, double s) { return {a.x * s, a.y * s, a.z * s}; }
Vector operator*(double s, Vector a) { return a * s; }
Point operator+(Point p, Vector v) { return {p.x + v.x, p.y + v.y, p.z + v.z}; }
Point operator-(Point p, Vector v) { return {p.x - v.x, p.y - v.y, p.z - v.z}; }
Vector operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

double dot(Vector a, Vector b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vector cross(Vector a, Vector b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double norm(Vector v) { return std::sqrt(dot(v, v)); }
Vector normalized(Vector v) {
    double n = norm(v);
    return n > 0.0 ? v * (1.0 / n) : v;
}
Point lerp(Point a, Point b, double t) {
    return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t, a.z + (b.z - a.z) * t};
}
double distance(Point a, Point b) { return norm(b - a); }

bool ListV::operator==(const ListV& other) const { return items == other.items; }

GeomValue error_value(std::string message) { return ErrorV{0, std::move(message)}; }

GeomValue make_list(std::vector<GeomValue> items) {
    // Lists stay flat: nested lists are spliced in place.
    std::vector<GeomValue> flat;
    flat.reserve(items.size());
    for (auto& item : items) {
        if (auto* inner = std::get_if<ListV>(&item.data)) {
            for (auto& x : inner->items) flat.push_back(std::move(x));
        } else {
            flat.push_back(std::move(item));
        }
    }
    return ListV{std::move(flat)};
}

std::string kind_name(GeomKind kind) {
    switch (kind) {
        case GeomKind::number: return "number";
        case GeomKind::point: return "point";
        case GeomKind::vector: return "vector";
        case GeomKind::curve: return "curve";
        case GeomKind::surface: return "surface";
        case GeomKind::list: return "list";
        case GeomKind::error: return "error";
        case GeomKind::text: return "text";
    }
    return "unknown";
}

bool is_geometry(const GeomValue& v) {
    switch (v.kind()) {
        case GeomKind::point:
        case GeomKind::curve:
        case GeomKind::surface: return true;
        case GeomKind::list:
            return std::any_of(v.get_if<ListV>()->items.begin(), v.get_if<ListV>()->items.end(),
                               [](const GeomValue& item) { return is_geometry(item); });
        default: return false;
    }
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kChordSegments = 256;

struct Frame {
    Vector u;
    Vector v;
};

Frame circle_frame(Vector normal) {
    Vector n = normalized(normal);
    Vector ref = std::abs(n.z) < 0.9 ? Vector{0, 0, 1} : Vector{1, 0, 0};
    Vector u = normalized(ref - n * dot(ref, n));
    return {u, cross(n, u)};
}

Point circle_point(const Circle& c, double t) {
    Frame f = circle_frame(c.normal);
    double angle = kTwoPi * t;
    return c.center + (f.u * std::cos(angle) + f.v * std::sin(angle)) * c.radius;
}

std::size_t find_span(const std::vector<double>& knots, std::size_t n, int p, double t) {
    // n control points; valid spans are [p, n-1].
    if (t >= knots[n]) return n - 1;
    if (t <= knots[p]) return static_cast<std::size_t>(p);
    std::size_t lo = static_cast<std::size_t>(p);
    std::size_t hi = n;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (t < knots[mid]) hi = mid;
        else lo = mid;
    }
    return lo;
}

std::vector<double> basis_functions(const std::vector<double>& knots, std::size_t span, int p,
                                    double t) {
    std::vector<double> basis(static_cast<std::size_t>(p) + 1, 0.0);
    std::vector<double> left(basis.size(), 0.0);
    std::vector<double> right(basis.size(), 0.0);
    basis[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            double denom = right[r + 1] + left[j - r];
            double temp = denom != 0.0 ? basis[r] / denom : 0.0;
            basis[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        basis[j] = saved;
    }
    return basis;
}

std::vector<double> polyline_cumulative(const std::vector<Point>& pts) {
    std::vector<double> cum(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + distance(pts[i - 1], pts[i]);
    return cum;
}

Point polyline_at_length(const std::vector<Point>& pts, const std::vector<double>& cum,
                         double target) {
    if (pts.size() == 1 || cum.back() <= 0.0) return pts.front();
    target = std::clamp(target, 0.0, cum.back());
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    std::size_t i = it == cum.end() ? cum.size() - 1 : static_cast<std::size_t>(it - cum.begin());
    if (i == 0) return pts.front();
    double seg = cum[i] - cum[i - 1];
    double f = seg > 0.0 ? (target - cum[i - 1]) / seg : 0.0;
    return lerp(pts[i - 1], pts[i], f);
}

struct Sampled {
    std::vector<double> params;
    std::vector<Point> points;
    std::vector<double> cum;
};

Sampled nurbs_chord_table(const Nurbs& n) {
    Sampled s;
    s.params.resize(kChordSegments + 1);
    s.points.resize(kChordSegments + 1);
    for (int i = 0; i <= kChordSegments; ++i) {
        double t = static_cast<double>(i) / kChordSegments;
        s.params[i] = t;
        s.points[i] = nurbs_point(n, t);
    }
    s.cum = polyline_cumulative(s.points);
    return s;
}

std::optional<double> as_number(const GeomValue& v) {
    if (auto* d = v.get_if<double>()) return *d;
    return std::nullopt;
}

std::optional<std::vector<Point>> as_points(const GeomValue& v) {
    std::vector<Point> pts;
    if (auto* p = v.get_if<Point>()) {
        pts.push_back(*p);
        return pts;
    }
    auto* list = v.get_if<ListV>();
    if (!list) return std::nullopt;
    for (const auto& item : list->items) {
        auto* p = item.get_if<Point>();
        if (!p) return std::nullopt;
        pts.push_back(*p);
    }
    return pts;
}

int to_count(double v) { return static_cast<int>(std::llround(v)); }

}  // namespace

std::vector<double> clamped_uniform_knots(std::size_t control_count, int degree) {
    std::size_t n = control_count;
    std::size_t p = static_cast<std::size_t>(degree);
    std::vector<double> knots(n + p + 1, 0.0);
    std::size_t interior = n - p - 1;
    for (std::size_t i = 0; i < interior; ++i) {
        knots[p + 1 + i] = static_cast<double>(i + 1) / static_cast<double>(interior + 1);
    }
    for (std::size_t i = n; i < knots.size(); ++i) knots[i] = 1.0;
    return knots;
}

std::vector<double> effective_knots(const Nurbs& n) {
    if (!n.knots.empty()) return n.knots;
    return clamped_uniform_knots(n.control.size(), n.degree);
}

Point nurbs_point(const Nurbs& n, double t) {
    const auto knots = effective_knots(n);
    const std::size_t count = n.control.size();
    t = std::clamp(t, 0.0, 1.0);
    std::size_t span = find_span(knots, count, n.degree, t);
    auto basis = basis_functions(knots, span, n.degree, t);
    Point out{};
    for (int j = 0; j <= n.degree; ++j) {
        const Point& c = n.control[span - n.degree + j];
        out.x += basis[j] * c.x;
        out.y += basis[j] * c.y;
        out.z += basis[j] * c.z;
    }
    return out;
}

Point point_at(const Curve& c, double t) {
    return std::visit(
        [t](const auto& curve) -> Point {
            using T = std::decay_t<decltype(curve)>;
            if constexpr (std::is_same_v<T, LineSeg>) {
                return lerp(curve.a, curve.b, t);
            } else if constexpr (std::is_same_v<T, Polyline>) {
                // Uniform per segment.
                const auto& v = curve.vertices;
                double pos = std::clamp(t, 0.0, 1.0) * static_cast<double>(v.size() - 1);
                std::size_t i = std::min(static_cast<std::size_t>(pos), v.size() - 2);
                return lerp(v[i], v[i + 1], pos - static_cast<double>(i));
            } else if constexpr (std::is_same_v<T, Circle>) {
                return circle_point(curve, t);
            } else {
                return nurbs_point(curve, t);
            }
        },
        c);
}

Point start_point(const Curve& c) { return point_at(c, 0.0); }
Point end_point(const Curve& c) { return point_at(c, 1.0); }

double length(const Curve& c) {
    return std::visit(
        [](const auto& curve) -> double {
            using T = std::decay_t<decltype(curve)>;
            if constexpr (std::is_same_v<T, LineSeg>) {
                return distance(curve.a, curve.b);
            } else if constexpr (std::is_same_v<T, Polyline>) {
                return polyline_cumulative(curve.vertices).back();
            } else if constexpr (std::is_same_v<T, Circle>) {
                return kTwoPi * curve.radius;
            } else {
                return nurbs_chord_table(curve).cum.back();
            }
        },
        c);
}

bool is_closed(const Curve& c) {
    if (std::holds_alternative<Circle>(c)) return true;
    return length(c) > 0.0 && distance(start_point(c), end_point(c)) < 1e-12;
}

Point point_at_fraction(const Curve& c, double s) {
    s = std::clamp(s, 0.0, 1.0);
    return std::visit(
        [s](const auto& curve) -> Point {
            using T = std::decay_t<decltype(curve)>;
            if constexpr (std::is_same_v<T, LineSeg>) {
                return lerp(curve.a, curve.b, s);
            } else if constexpr (std::is_same_v<T, Polyline>) {
                auto cum = polyline_cumulative(curve.vertices);
                return polyline_at_length(curve.vertices, cum, s * cum.back());
            } else if constexpr (std::is_same_v<T, Circle>) {
                return circle_point(curve, s);
            } else {
                // Invert the chord-length table, then evaluate the curve at the parameter.
                Sampled table = nurbs_chord_table(curve);
                double total = table.cum.back();
                if (total <= 0.0) return table.points.front();
                double target = s * total;
                auto it = std::upper_bound(table.cum.begin(), table.cum.end(), target);
                std::size_t i = it == table.cum.end() ? table.cum.size() - 1
                                                      : static_cast<std::size_t>(it - table.cum.begin());
                if (i == 0) return table.points.front();
                double seg = table.cum[i] - table.cum[i - 1];
                double f = seg > 0.0 ? (target - table.cum[i - 1]) / seg : 0.0;
                double t = table.params[i - 1] + f * (table.params[i] - table.params[i - 1]);
                return nurbs_point(curve, t);
            }
        },
        c);
}

std::vector<Point> sample_curve(const Curve& c, int segments) {
    if (auto* line = std::get_if<LineSeg>(&c)) return {line->a, line->b};
    if (auto* poly = std::get_if<Polyline>(&c)) return poly->vertices;
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(segments) + 1);
    for (int i = 0; i <= segments; ++i) pts.push_back(point_at(c, static_cast<double>(i) / segments));
    return pts;
}

Point point_at(const Surface& s, double u, double v) {
    return std::visit(
        [u, v](const auto& surface) -> Point {
            using T = std::decay_t<decltype(surface)>;
            if constexpr (std::is_same_v<T, Extrusion>) {
                return point_at_fraction(surface.profile, u) + surface.direction * v;
            } else {
                const auto& secs = surface.sections;
                if (secs.size() == 1) return point_at_fraction(secs.front(), u);
                double pos = std::clamp(v, 0.0, 1.0) * static_cast<double>(secs.size() - 1);
                std::size_t j = std::min(static_cast<std::size_t>(pos), secs.size() - 2);
                return lerp(point_at_fraction(secs[j], u), point_at_fraction(secs[j + 1], u),
                            pos - static_cast<double>(j));
            }
        },
        s);
}

Curve translate(const Curve& c, Vector v) {
    return std::visit(
        [v](const auto& curve) -> Curve {
            using T = std::decay_t<decltype(curve)>;
            T out = curve;
            if constexpr (std::is_same_v<T, LineSeg>) {
                out.a = out.a + v;
                out.b = out.b + v;
            } else if constexpr (std::is_same_v<T, Polyline>) {
                for (auto& p : out.vertices) p = p + v;
            } else if constexpr (std::is_same_v<T, Circle>) {
                out.center = out.center + v;
            } else {
                for (auto& p : out.control) p = p + v;
            }
            return out;
        },
        c);
}

Surface translate(const Surface& s, Vector v) {
    return std::visit(
        [v](const auto& surface) -> Surface {
            using T = std::decay_t<decltype(surface)>;
            if constexpr (std::is_same_v<T, Extrusion>) {
                return Extrusion{translate(surface.profile, v), surface.direction};
            } else {
                Loft out;
                for (const auto& c : surface.sections) out.sections.push_back(translate(c, v));
                return out;
            }
        },
        s);
}

GeomValue translate(const GeomValue& g, Vector v) {
    switch (g.kind()) {
        case GeomKind::point: return *g.get_if<Point>() + v;
        case GeomKind::curve: return translate(*g.get_if<Curve>(), v);
        case GeomKind::surface: return translate(*g.get_if<Surface>(), v);
        case GeomKind::list: {
            ListV out;
            for (const auto& item : g.get_if<ListV>()->items) out.items.push_back(translate(item, v));
            return out;
        }
        default: return g;
    }
}

double triangle_area(Point a, Point b, Point c) { return 0.5 * norm(cross(b - a, c - a)); }

Mesh sample_mesh(const Surface& s, int u_count, int v_count) {
    Mesh m;
    u_count = std::max(u_count, 2);
    v_count = std::max(v_count, 2);
    m.vertices.reserve(static_cast<std::size_t>(u_count) * v_count);
    for (int j = 0; j < v_count; ++j) {
        double v = static_cast<double>(j) / (v_count - 1);
        for (int i = 0; i < u_count; ++i) {
            double u = static_cast<double>(i) / (u_count - 1);
            m.vertices.push_back(point_at(s, u, v));
        }
    }
    auto add = [&m](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        if (triangle_area(m.vertices[a], m.vertices[b], m.vertices[c]) > 1e-18) m.faces.push_back({a, b, c});
    };
    for (int j = 0; j + 1 < v_count; ++j) {
        for (int i = 0; i + 1 < u_count; ++i) {
            auto a = static_cast<std::uint32_t>(j * u_count + i);
            auto b = a + 1;
            auto c = a + static_cast<std::uint32_t>(u_count);
            auto d = c + 1;
            add(a, b, d);
            add(a, d, c);
        }
    }
    return m;
}

double mesh_area(const Mesh& m) {
    double total = 0.0;
    for (const auto& f : m.faces) total += triangle_area(m.vertices[f[0]], m.vertices[f[1]], m.vertices[f[2]]);
    return total;
}

GeomValue eval_series(double start, double step, double count) {
    int n = to_count(count);
    if (n < 0) return error_value("Series requires a non-negative count");
    ListV out;
    out.items.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.items.emplace_back(start + step * i);
    return out;
}

GeomValue eval_range(double start, double end, double steps) {
    int n = to_count(steps);
    if (n < 1) return error_value("Range requires at least one step");
    ListV out;
    for (int i = 0; i <= n; ++i) out.items.emplace_back(start + (end - start) * i / n);
    return out;
}

std::vector<double> divide_fractions(const Curve& c, int count) {
    std::vector<double> fractions;
    int last = is_closed(c) ? count - 1 : count;
    for (int i = 0; i <= last; ++i) fractions.push_back(static_cast<double>(i) / count);
    return fractions;
}

GeomValue eval_divide_curve(const GeomValue& curve, double count) {
    auto* c = curve.get_if<Curve>();
    if (!c) return error_value("Divide Curve requires a curve input");
    int n = to_count(count);
    if (n < 1) return error_value("Divide Curve requires a count of at least 1");
    ListV pts;
    for (double f : divide_fractions(*c, n)) pts.items.emplace_back(point_at_fraction(*c, f));
    return pts;
}

GeomValue eval_move(const GeomValue& geometry, const GeomValue& motion) {
    auto* v = motion.get_if<Vector>();
    if (!v) return error_value("Move requires a vector input");
    if (!is_geometry(geometry)) return error_value("Move requires geometry to move");
    return translate(geometry, *v);
}

GeomValue eval_extrude_linear(const GeomValue& profile, const GeomValue& axis) {
    auto* v = axis.get_if<Vector>();
    if (!v) return error_value("Extrude Linear requires an axis input");
    auto* c = profile.get_if<Curve>();
    if (!c) return error_value("Extrude Linear requires a profile curve");
    if (norm(*v) == 0.0) return error_value("Extrude Linear requires a nonzero axis");
    return Extrusion{*c, *v};
}

GeomValue eval_loft(const GeomValue& sections) {
    Loft loft;
    if (auto* c = sections.get_if<Curve>()) {
        loft.sections.push_back(*c);
    } else if (auto* list = sections.get_if<ListV>()) {
        for (const auto& item : list->items) {
            auto* ic = item.get_if<Curve>();
            if (!ic) return error_value("Loft requires curve sections");
            loft.sections.push_back(*ic);
        }
    } else {
        return error_value("Loft requires curve sections");
    }
    if (loft.sections.size() < 2) return error_value("Loft requires at least two sections");
    return loft;
}

GeomValue eval_nurbs(const GeomValue& control, double degree) {
    auto pts = as_points(control);
    if (!pts) return error_value("Nurbs Curve requires a list of points");
    if (pts->size() < 2) return error_value("Nurbs Curve requires at least two control points");
    int d = to_count(degree);
    if (d < 1) return error_value("Nurbs Curve requires a degree of at least 1");
    d = std::min<int>(d, static_cast<int>(pts->size()) - 1);
    return Nurbs{std::move(*pts), d, {}};
}

GeomValue eval_interpolate(const GeomValue& points, double degree) {
    auto pts = as_points(points);
    if (!pts) return error_value("Interpolate Curve requires a list of points");
    const std::size_t n = pts->size();
    if (n < 2) return error_value("Interpolate Curve requires at least two points");
    int p = to_count(degree);
    if (p < 1) return error_value("Interpolate Curve requires a degree of at least 1");
    p = std::min<int>(p, static_cast<int>(n) - 1);

    // Chord-length parameters, uniform when any chord vanishes.
    std::vector<double> params(n, 0.0);
    auto cum = polyline_cumulative(*pts);
    bool degenerate = cum.back() <= 0.0;
    for (std::size_t i = 1; i < n && !degenerate; ++i) degenerate = (cum[i] - cum[i - 1]) <= 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        params[i] = degenerate ? static_cast<double>(i) / static_cast<double>(n - 1) : cum[i] / cum.back();
    }
    params.back() = 1.0;

    // Averaged knots.
    std::vector<double> knots(n + p + 1, 0.0);
    for (std::size_t j = 1; j + p < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = j; i < j + p; ++i) sum += params[i];
        knots[j + p] = sum / p;
    }
    for (std::size_t i = n; i < knots.size(); ++i) knots[i] = 1.0;

    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t span = find_span(knots, n, p, params[k]);
        auto b = basis_functions(knots, span, p, params[k]);
        for (int j = 0; j <= p; ++j) {
            basis(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(span - p + j)) = b[j];
        }
    }
    Eigen::MatrixXd rhs(static_cast<Eigen::Index>(n), 3);
    for (std::size_t k = 0; k < n; ++k) {
        rhs.row(static_cast<Eigen::Index>(k)) << (*pts)[k].x, (*pts)[k].y, (*pts)[k].z;
    }
    Eigen::MatrixXd solved = basis.fullPivLu().solve(rhs);
    Nurbs out;
    out.degree = p;
    out.knots = std::move(knots);
    for (std::size_t k = 0; k < n; ++k) {
        auto r = static_cast<Eigen::Index>(k);
        out.control.push_back({solved(r, 0), solved(r, 1), solved(r, 2)});
    }
    return out;
}

GeomValue eval_polyline(const GeomValue& vertices) {
    auto pts = as_points(vertices);
    if (!pts) return error_value("Polyline requires a list of points");
    if (pts->size() < 2) return error_value("Polyline requires at least two vertices");
    return Polyline{std::move(*pts)};
}

GeomValue eval_circle(const GeomValue& center, const GeomValue& normal, const GeomValue& radius) {
    auto* c = center.get_if<Point>();
    auto* n = normal.get_if<Vector>();
    auto r = as_number(radius);
    if (!c) return error_value("Circle requires a center point");
    if (!n) return error_value("Circle requires a normal vector");
    if (!r) return error_value("Circle requires a numeric radius");
    if (norm(*n) == 0.0) return error_value("Circle requires a nonzero normal");
    if (!(*r > 0.0)) return error_value("Circle requires a positive radius");
    return Circle{*c, *n, *r};
}

GeomValue eval_line(const GeomValue& start, const GeomValue& end) {
    auto* a = start.get_if<Point>();
    auto* b = end.get_if<Point>();
    if (!a || !b) return error_value("Line requires two points");
    return LineSeg{*a, *b};
}

GeomValue eval_line_sdl(const GeomValue& start, const GeomValue& direction, const GeomValue& len) {
    auto* a = start.get_if<Point>();
    auto* d = direction.get_if<Vector>();
    auto l = as_number(len);
    if (!a) return error_value("Line SDL requires a start point");
    if (!d) return error_value("Line SDL requires a direction vector");
    if (!l) return error_value("Line SDL requires a numeric length");
    if (norm(*d) == 0.0) return error_value("Line SDL requires a nonzero direction");
    return LineSeg{*a, *a + normalized(*d) * *l};
}

}  // namespace sforge
