#include "sforge/components.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <string>

namespace sforge {

namespace {

using Args = std::vector<GeomValue>;
using Outs = std::vector<GeomValue>;

std::optional<double> num(const GeomValue& v) {
    if (const auto* d = v.get_if<double>()) return *d;
    return std::nullopt;
}

// Applies a numeric function, or reports which component wanted numbers.
template <class F>
Outs numeric(const char* who, const Args& in, F f) {
    std::vector<double> xs;
    for (const auto& v : in) {
        auto x = num(v);
        if (!x) return {error_value(std::string(who) + " requires number inputs")};
        xs.push_back(*x);
    }
    return {f(xs)};
}

std::vector<GeomValue> items_of(const GeomValue& v) {
    if (const auto* l = v.get_if<ListV>()) return l->items;
    return {v};
}

const std::map<std::string_view, Kernel>& table() {
    static const std::map<std::string_view, Kernel> kernels{
        {"Number Slider", [](const Args& in) { return Outs{in[0]}; }},
        {"Panel", [](const Args& in) { return Outs{in[0]}; }},
        {"Construct Point",
         [](const Args& in) {
             return numeric("Construct Point", in, [](const auto& x) { return GeomValue(Point{x[0], x[1], x[2]}); });
         }},
        {"Unit X", [](const Args& in) { return numeric("Unit X", in, [](const auto& x) { return GeomValue(Vector{x[0], 0, 0}); }); }},
        {"Unit Y", [](const Args& in) { return numeric("Unit Y", in, [](const auto& x) { return GeomValue(Vector{0, x[0], 0}); }); }},
        {"Unit Z", [](const Args& in) { return numeric("Unit Z", in, [](const auto& x) { return GeomValue(Vector{0, 0, x[0]}); }); }},
        {"Vector XYZ",
         [](const Args& in) {
             auto v = numeric("Vector XYZ", in, [](const auto& x) { return GeomValue(Vector{x[0], x[1], x[2]}); });
             if (v[0].is_error()) return Outs{v[0], v[0]};
             return Outs{v[0], norm(*v[0].get_if<Vector>())};
         }},
        {"Line", [](const Args& in) { return Outs{eval_line(in[0], in[1])}; }},
        {"Line SDL", [](const Args& in) { return Outs{eval_line_sdl(in[0], in[1], in[2])}; }},
        {"Polyline", [](const Args& in) { return Outs{eval_polyline(in[0])}; }},
        {"Circle", [](const Args& in) { return Outs{eval_circle(in[0], in[1], in[2])}; }},
        {"Series",
         [](const Args& in) {
             return numeric("Series", in, [](const auto& x) { return eval_series(x[0], x[1], x[2]); });
         }},
        {"Range",
         [](const Args& in) { return numeric("Range", in, [](const auto& x) { return eval_range(x[0], x[1], x[2]); }); }},
        {"Divide Curve",
         [](const Args& in) {
             GeomValue pts = eval_divide_curve(in[0], num(in[1]).value_or(NAN));
             if (pts.is_error()) return Outs{pts, pts};
             ListV params;
             for (double f : divide_fractions(*in[0].get_if<Curve>(), static_cast<int>(std::llround(*num(in[1]))))) {
                 params.items.emplace_back(f);
             }
             return Outs{pts, params};
         }},
        {"Move", [](const Args& in) { return Outs{eval_move(in[0], in[1])}; }},
        {"Extrude Linear", [](const Args& in) { return Outs{eval_extrude_linear(in[0], in[1])}; }},
        {"Loft", [](const Args& in) { return Outs{eval_loft(in[0])}; }},
        {"Nurbs Curve",
         [](const Args& in) {
             auto d = num(in[1]);
             if (!d) return Outs{error_value("Nurbs Curve requires a numeric degree")};
             return Outs{eval_nurbs(in[0], *d)};
         }},
        {"Interpolate Curve",
         [](const Args& in) {
             auto d = num(in[1]);
             if (!d) return Outs{error_value("Interpolate Curve requires a numeric degree")};
             return Outs{eval_interpolate(in[0], *d)};
         }},
        {"Addition", [](const Args& in) { return numeric("Addition", in, [](const auto& x) { return GeomValue(x[0] + x[1]); }); }},
        {"Subtraction",
         [](const Args& in) { return numeric("Subtraction", in, [](const auto& x) { return GeomValue(x[0] - x[1]); }); }},
        {"Multiplication",
         [](const Args& in) { return numeric("Multiplication", in, [](const auto& x) { return GeomValue(x[0] * x[1]); }); }},
        {"Division",
         [](const Args& in) {
             return numeric("Division", in, [](const auto& x) {
                 return x[1] == 0.0 ? error_value("Division by zero") : GeomValue(x[0] / x[1]);
             });
         }},
        {"Negative", [](const Args& in) { return numeric("Negative", in, [](const auto& x) { return GeomValue(-x[0]); }); }},
        {"Merge",
         [](const Args& in) {
             std::vector<GeomValue> all;
             for (const auto& v : in) {
                 for (auto& item : items_of(v)) all.push_back(std::move(item));
             }
             return Outs{make_list(std::move(all))};
         }},
        {"List Item",
         [](const Args& in) {
             const auto items = items_of(in[0]);
             auto i = num(in[1]);
             if (!i) return Outs{error_value("List Item requires a numeric index")};
             const auto k = std::llround(*i);
             if (k < 0 || k >= static_cast<long long>(items.size())) {
                 return Outs{error_value("List Item index " + std::to_string(k) + " is out of range")};
             }
             return Outs{items[static_cast<std::size_t>(k)]};
         }},
    };
    return kernels;
}

}  // namespace

const Kernel* find_kernel(std::string_view canonical_name) {
    const auto& t = table();
    auto it = t.find(canonical_name);
    return it == t.end() ? nullptr : &it->second;
}

std::vector<std::string_view> kernel_names() {
    std::vector<std::string_view> out;
    for (const auto& [name, k] : table()) out.push_back(name);
    return out;
}

}  // namespace sforge
