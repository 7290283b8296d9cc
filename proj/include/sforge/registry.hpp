#pragma once

#include "sforge/geometry.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sforge {

// `geometry_any` accepts point/curve/surface; `any` accepts every kind.
enum class ValueKind { number, integer, point, vector, curve, surface, geometry_any, any, text };
enum class Cardinality { scalar, list };
enum class Category { params, maths, vector, curve, surface, transform, sets };
enum class Side { in, out };

std::string_view to_string(ValueKind k);
std::string_view to_string(Cardinality c);
std::string_view to_string(Category c);
std::optional<ValueKind> parse_value_kind(std::string_view s);
std::optional<Cardinality> parse_cardinality(std::string_view s);
std::optional<Category> parse_category(std::string_view s);

// The coercion table. Only integer->number and geometry->geometry-any widen.
bool kind_accepts(ValueKind from, ValueKind to);
bool is_drawable(ValueKind k);

struct PortSpec {
    std::string name;
    std::vector<std::string> aliases;
    ValueKind kind{ValueKind::number};
    Cardinality cardinality{Cardinality::scalar};
    bool required{false};
    std::optional<GeomValue> default_value;  // absent when required
    std::optional<double> suggested;         // repair value for required numeric ports
    std::string group;                       // ports sharing a group carry one item kind
};

struct ComponentSpec {
    std::string canonical_name;
    std::string display_name;
    std::vector<std::string> aliases;
    std::vector<PortSpec> inputs;
    std::vector<PortSpec> outputs;
    Category category{Category::params};

    const std::vector<PortSpec>& ports(Side side) const { return side == Side::in ? inputs : outputs; }
};

class CatalogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Catalog {
public:
    Catalog() = default;
    Catalog(std::string version, std::vector<ComponentSpec> components);

    const std::string& version() const { return version_; }
    const std::vector<ComponentSpec>& components() const { return components_; }
    const ComponentSpec* find(std::string_view canonical_name) const;
    const ComponentSpec& at(std::size_t index) const { return components_.at(index); }
    std::size_t size() const { return components_.size(); }

private:
    std::string version_;
    std::vector<ComponentSpec> components_;
};

enum class MatchKind { exact, fuzzy, unknown };

struct NameMatch {
    std::size_t index{};  // into Catalog::components() or ComponentSpec::ports()
    int distance{};
    bool operator==(const NameMatch&) const = default;
};

struct Resolution {
    MatchKind kind{MatchKind::unknown};
    std::optional<NameMatch> match;  // set for exact and fuzzy
    std::vector<NameMatch> nearest;  // up to three, by distance then name
    bool operator==(const Resolution&) const = default;
};

constexpr int kFuzzyThreshold = 2;

std::string normalize_name(std::string_view raw);
int edit_distance(std::string_view a, std::string_view b);

Resolution resolve_name(const Catalog& catalog, std::string_view raw);
Resolution port_of(const ComponentSpec& spec, Side side, std::string_view raw);

Catalog load_catalog(const nlohmann::json& doc);
Catalog load_catalog_file(const std::filesystem::path& path);
const Catalog& builtin_catalog();
std::string_view builtin_catalog_json();

nlohmann::ordered_json catalog_to_json(const Catalog& catalog);

}  // namespace sforge
