#pragma once

#include "sforge/diagnostics.hpp"
#include "sforge/graph_ir.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace sforge {

struct RuleInfo {
    std::string id;
    std::string name;
    Severity severity;
};

// R1..R7 in id order.
const std::vector<RuleInfo>& rule_table();

// Runs every rule. Repairs are attached only when applying them alone does not add errors.
std::vector<Diagnostic> validate(const ScriptGraph& graph);

// Rule findings with every candidate repair attached, unfiltered.
std::vector<Diagnostic> validate_unfiltered(const ScriptGraph& graph);

// A subset of the attached repairs that is safe to apply together.
std::vector<Repair> suggest_repairs(const ScriptGraph& graph, const std::vector<Diagnostic>& diags);

class RepairError : public std::runtime_error {
public:
    RepairError(std::string message, std::vector<std::string> conflicts = {});
    const std::vector<std::string>& conflicts() const { return conflicts_; }

private:
    std::vector<std::string> conflicts_;
};

// Identical repairs collapse to one; two different repairs touching one element are rejected.
ScriptDocument apply_repairs(const ScriptDocument& doc, const std::vector<Repair>& repairs);

std::size_t error_count(const std::vector<Diagnostic>& diags);

}  // namespace sforge
