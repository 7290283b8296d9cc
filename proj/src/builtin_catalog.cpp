#include "sforge/registry.hpp"

namespace sforge {

namespace {

// Closed allow-list of components. Port aliases carry the short names agents tend to emit.
constexpr std::string_view kBuiltinCatalog = R"json(
{
  "version": "builtin-1",
  "components": [
    {"name": "Number Slider", "aliases": ["Slider", "Num Slider"], "category": "params",
     "inputs":  [{"name": "N", "aliases": ["Value", "V"], "kind": "number", "default": 0}],
     "outputs": [{"name": "N", "aliases": ["Value", "Number"], "kind": "number"}]},
    {"name": "Panel", "aliases": ["Text Panel"], "category": "params",
     "inputs":  [{"name": "Content", "aliases": ["Text", "Input", "I"], "kind": "text", "default": ""}],
     "outputs": [{"name": "Out", "aliases": ["Output", "O"], "kind": "text"}]},
    {"name": "Construct Point", "aliases": ["Point XYZ", "Pt", "Construct Pt", "Point"], "category": "vector",
     "inputs":  [{"name": "X", "aliases": ["X coordinate"], "kind": "number", "default": 0},
                 {"name": "Y", "aliases": ["Y coordinate"], "kind": "number", "default": 0},
                 {"name": "Z", "aliases": ["Z coordinate"], "kind": "number", "default": 0}],
     "outputs": [{"name": "Pt", "aliases": ["Point", "P"], "kind": "point"}]},
    {"name": "Unit X", "aliases": ["Unit Vector X"], "category": "vector",
     "inputs":  [{"name": "F", "aliases": ["Factor"], "kind": "number", "default": 1}],
     "outputs": [{"name": "V", "aliases": ["Unit vector", "Vector"], "kind": "vector"}]},
    {"name": "Unit Y", "aliases": ["Unit Vector Y"], "category": "vector",
     "inputs":  [{"name": "F", "aliases": ["Factor"], "kind": "number", "default": 1}],
     "outputs": [{"name": "V", "aliases": ["Unit vector", "Vector"], "kind": "vector"}]},
    {"name": "Unit Z", "aliases": ["Unit Vector Z"], "category": "vector",
     "inputs":  [{"name": "F", "aliases": ["Factor"], "kind": "number", "default": 1}],
     "outputs": [{"name": "V", "aliases": ["Unit vector", "Vector"], "kind": "vector"}]},
    {"name": "Vector XYZ", "aliases": ["Vec", "Vector", "Construct Vector"], "category": "vector",
     "inputs":  [{"name": "X", "aliases": ["X component"], "kind": "number", "default": 0},
                 {"name": "Y", "aliases": ["Y component"], "kind": "number", "default": 0},
                 {"name": "Z", "aliases": ["Z component"], "kind": "number", "default": 0}],
     "outputs": [{"name": "V", "aliases": ["Vector"], "kind": "vector"},
                 {"name": "L", "aliases": ["Length"], "kind": "number"}]},
    {"name": "Line", "aliases": ["Ln", "Line Segment", "Segment"], "category": "curve",
     "inputs":  [{"name": "Start", "aliases": ["A", "Start Point"], "kind": "point", "required": true},
                 {"name": "End", "aliases": ["B", "End Point"], "kind": "point", "required": true}],
     "outputs": [{"name": "L", "aliases": ["Line"], "kind": "curve"}]},
    {"name": "Line SDL", "aliases": ["Line Start Direction Length"], "category": "curve",
     "inputs":  [{"name": "Start", "aliases": ["S", "Start Point"], "kind": "point", "required": true},
                 {"name": "Direction", "aliases": ["D", "Dir"], "kind": "vector", "required": true},
                 {"name": "Length", "aliases": ["L", "Len"], "kind": "number", "default": 1}],
     "outputs": [{"name": "L", "aliases": ["Line"], "kind": "curve"}]},
    {"name": "Polyline", "aliases": ["PLine", "Poly"], "category": "curve",
     "inputs":  [{"name": "Vertices", "aliases": ["V", "Points", "P"], "kind": "point", "cardinality": "list",
                  "required": true}],
     "outputs": [{"name": "Pl", "aliases": ["Polyline", "Curve", "C"], "kind": "curve"}]},
    {"name": "Circle", "aliases": ["Circle CNR"], "category": "curve",
     "inputs":  [{"name": "Center", "aliases": ["C", "Centre", "Center Point"], "kind": "point",
                  "default": {"point": [0, 0, 0]}},
                 {"name": "Normal", "aliases": ["N"], "kind": "vector", "default": {"vector": [0, 0, 1]}},
                 {"name": "Radius", "aliases": ["R"], "kind": "number", "required": true, "suggest": 1.0}],
     "outputs": [{"name": "C", "aliases": ["Circle", "Curve"], "kind": "curve"}]},
    {"name": "Series", "aliases": ["Number Series"], "category": "sets",
     "inputs":  [{"name": "Start", "aliases": ["S", "First"], "kind": "number", "default": 0},
                 {"name": "Step", "aliases": ["N"], "kind": "number", "default": 1},
                 {"name": "Count", "aliases": ["C"], "kind": "integer", "default": 10}],
     "outputs": [{"name": "Series", "aliases": ["S"], "kind": "number", "cardinality": "list"}]},
    {"name": "Range", "aliases": ["Number Range"], "category": "sets",
     "inputs":  [{"name": "Start", "aliases": ["From"], "kind": "number", "default": 0},
                 {"name": "End", "aliases": ["To"], "kind": "number", "default": 1},
                 {"name": "Steps", "aliases": ["N", "Count"], "kind": "integer", "default": 10}],
     "outputs": [{"name": "Range", "aliases": ["R"], "kind": "number", "cardinality": "list"}]},
    {"name": "Divide Curve", "aliases": ["Divide", "Curve Divide"], "category": "curve",
     "inputs":  [{"name": "Curve", "aliases": ["C"], "kind": "curve", "required": true},
                 {"name": "Count", "aliases": ["N"], "kind": "integer", "default": 10}],
     "outputs": [{"name": "Points", "aliases": ["P"], "kind": "point", "cardinality": "list"},
                 {"name": "Parameters", "aliases": ["t", "Params"], "kind": "number", "cardinality": "list"}]},
    {"name": "Move", "aliases": ["Translate"], "category": "transform",
     "inputs":  [{"name": "Geometry", "aliases": ["G", "Geo"], "kind": "geometry-any", "required": true,
                  "group": "T"},
                 {"name": "Motion", "aliases": ["T", "Translation", "Vector", "M"], "kind": "vector",
                  "required": true}],
     "outputs": [{"name": "Geometry", "aliases": ["G"], "kind": "geometry-any", "group": "T"}]},
    {"name": "Extrude Linear", "aliases": ["Extrude", "Linear Extrude"], "category": "surface",
     "inputs":  [{"name": "Profile", "aliases": ["B", "Base", "Curve"], "kind": "curve", "required": true},
                 {"name": "Axis", "aliases": ["A", "Direction", "D"], "kind": "vector", "required": true}],
     "outputs": [{"name": "Extrusion", "aliases": ["E", "Surface", "S"], "kind": "surface"}]},
    {"name": "Loft", "aliases": ["Loft Surface"], "category": "surface",
     "inputs":  [{"name": "Curves", "aliases": ["C", "Sections", "S"], "kind": "curve", "cardinality": "list",
                  "required": true}],
     "outputs": [{"name": "Loft", "aliases": ["L", "Surface"], "kind": "surface"}]},
    {"name": "Nurbs Curve", "aliases": ["NURBS", "NurbsCrv", "B-Spline"], "category": "curve",
     "inputs":  [{"name": "Points", "aliases": ["V", "Vertices", "Control Points", "P"], "kind": "point",
                  "cardinality": "list", "required": true},
                 {"name": "Degree", "aliases": ["D"], "kind": "integer", "default": 3}],
     "outputs": [{"name": "Curve", "aliases": ["C"], "kind": "curve"}]},
    {"name": "Interpolate Curve", "aliases": ["Interpolate", "IntCrv", "Interp Curve"], "category": "curve",
     "inputs":  [{"name": "Vertices", "aliases": ["V", "Points", "P"], "kind": "point", "cardinality": "list",
                  "required": true},
                 {"name": "Degree", "aliases": ["D"], "kind": "integer", "default": 3}],
     "outputs": [{"name": "Curve", "aliases": ["C"], "kind": "curve"}]},
    {"name": "Addition", "aliases": ["Add", "Plus", "Sum"], "category": "maths",
     "inputs":  [{"name": "A", "kind": "number", "default": 0}, {"name": "B", "kind": "number", "default": 0}],
     "outputs": [{"name": "Result", "aliases": ["R"], "kind": "number"}]},
    {"name": "Subtraction", "aliases": ["Subtract", "Minus"], "category": "maths",
     "inputs":  [{"name": "A", "kind": "number", "default": 0}, {"name": "B", "kind": "number", "default": 0}],
     "outputs": [{"name": "Result", "aliases": ["R"], "kind": "number"}]},
    {"name": "Multiplication", "aliases": ["Multiply", "Times", "Product"], "category": "maths",
     "inputs":  [{"name": "A", "kind": "number", "default": 1}, {"name": "B", "kind": "number", "default": 1}],
     "outputs": [{"name": "Result", "aliases": ["R"], "kind": "number"}]},
    {"name": "Division", "aliases": ["Div", "Quotient"], "category": "maths",
     "inputs":  [{"name": "A", "kind": "number", "default": 0}, {"name": "B", "kind": "number", "default": 1}],
     "outputs": [{"name": "Result", "aliases": ["R"], "kind": "number"}]},
    {"name": "Negative", "aliases": ["Negate", "Neg"], "category": "maths",
     "inputs":  [{"name": "Value", "aliases": ["V", "x"], "kind": "number", "default": 0}],
     "outputs": [{"name": "Result", "aliases": ["R"], "kind": "number"}]},
    {"name": "Merge", "aliases": ["Merge Data", "Combine"], "category": "sets",
     "inputs":  [{"name": "D1", "aliases": ["Data 1"], "kind": "any", "cardinality": "list", "group": "T"},
                 {"name": "D2", "aliases": ["Data 2"], "kind": "any", "cardinality": "list", "group": "T"},
                 {"name": "D3", "aliases": ["Data 3"], "kind": "any", "cardinality": "list", "group": "T"}],
     "outputs": [{"name": "Result", "aliases": ["R"], "kind": "any", "cardinality": "list", "group": "T"}]},
    {"name": "List Item", "aliases": ["Item", "Get Item"], "category": "sets",
     "inputs":  [{"name": "List", "aliases": ["L"], "kind": "any", "cardinality": "list", "required": true,
                  "group": "T"},
                 {"name": "Index", "aliases": ["i"], "kind": "integer", "default": 0}],
     "outputs": [{"name": "Item", "aliases": ["i"], "kind": "any", "group": "T"}]}
  ]
}
)json";

}  // namespace

std::string_view builtin_catalog_json() { return kBuiltinCatalog; }

}  // namespace sforge
