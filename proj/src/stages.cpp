#include "sforge/agents.hpp"
#include "sforge/validator.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>
#include <sstream>

namespace sforge {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

const char* const kNum = R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)";

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in{std::string(text)};
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

// Section name -> its lines. Headers may carry markdown decoration ("## INPUTS", "**LOGIC:**").
std::map<std::string, std::vector<std::string>> sections(std::string_view reply, const std::set<std::string>& names) {
    static const std::regex header(R"(^[#*\s]*([A-Za-z]+)\s*\**\s*:?\s*\**\s*(.*)$)");
    std::map<std::string, std::vector<std::string>> out;
    std::string current;
    for (const auto& raw : split_lines(reply)) {
        std::smatch m;
        if (std::regex_match(raw, m, header)) {
            const std::string name = upper(m[1].str());
            const bool colon = raw.find(':') != std::string::npos;
            const bool decorated = raw.find('#') != std::string::npos || raw.find("**") != std::string::npos;
            if (names.count(name) && (colon || decorated || trim(m[2].str()).empty())) {
                current = name;
                out[current];
                if (auto rest = trim(m[2].str()); !rest.empty()) out[current].push_back(rest);
                continue;
            }
        }
        if (!current.empty()) out[current].push_back(raw);
    }
    return out;
}

double to_double(const std::string& s) { return std::stod(s); }

std::string fmt_num(double v) { return fmt::format("{}", v); }

std::string strip_marker(const std::string& line) {
    static const std::regex marker(R"(^\s*(?:\d+[.)]|[-*])\s*)");
    return trim(std::regex_replace(line, marker, "", std::regex_constants::format_first_only));
}

std::vector<std::string> split_args(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : s) {
        if (c == '"') quoted = !quoted;
        if (c == ',' && !quoted) {
            out.push_back(trim(cur));
            cur.clear();
            continue;
        }
        cur.push_back(c);
    }
    if (quoted) throw ExtractError(fmt::format("unterminated text literal in '{}'", s));
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

Binding parse_binding(const std::string& text) {
    static const std::regex slider(fmt::format(R"(^slider\s+({0})\s*\.\.\s*({0})\s*@\s*({0})$)", kNum),
                                   std::regex::icase);
    static const std::regex number(fmt::format("^{}$", kNum));
    static const std::regex ref(R"(^([A-Za-z_]\w*)(?:\.(.+))?$)");
    std::smatch m;
    Binding b;
    if (std::regex_match(text, m, slider)) {
        b.kind = Binding::Kind::slider;
        b.slider = {to_double(m[1]), to_double(m[2]), to_double(m[3])};
    } else if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
        b.kind = Binding::Kind::text;
        b.text = text.substr(1, text.size() - 2);
    } else if (std::regex_match(text, m, number)) {
        b.kind = Binding::Kind::number;
        b.number = to_double(text);
    } else if (std::regex_match(text, m, ref)) {
        b.kind = Binding::Kind::ref;
        b.label = m[1];
        b.port = trim(m[2].str());
    } else {
        throw ExtractError(fmt::format("binding '{}' is not a label, number, text or slider", text));
    }
    return b;
}

std::string render_binding(const Binding& b) {
    switch (b.kind) {
        case Binding::Kind::ref: return b.port.empty() ? b.label : b.label + "." + b.port;
        case Binding::Kind::number: return fmt_num(b.number);
        case Binding::Kind::text: return "\"" + b.text + "\"";
        case Binding::Kind::slider:
            return fmt::format("slider {}..{} @ {}", fmt_num(b.slider.min), fmt_num(b.slider.max), fmt_num(b.slider.value));
    }
    return {};
}

std::string port_list(const std::vector<PortSpec>& ports) {
    std::vector<std::string> parts;
    for (const auto& p : ports) {
        std::string s = fmt::format("{} {}", p.name, to_string(p.kind));
        if (p.cardinality == Cardinality::list) s += " list";
        if (p.required) s += " required";
        parts.push_back(s);
    }
    return parts.empty() ? "none" : fmt::format("{}", fmt::join(parts, ", "));
}

}  // namespace

DesignBrief parse_brief(std::string_view reply) {
    static const std::regex input(
        fmt::format(R"(^(.+?)\s*:\s*min\s*=?\s*({0})\s*,\s*max\s*=?\s*({0})\s*,\s*default\s*=?\s*({0})\s*\.?$)", kNum),
        std::regex::icase);
    auto sec = sections(reply, {"INTENT", "INPUTS", "LOGIC", "NOTES"});
    for (const char* name : {"INTENT", "INPUTS", "LOGIC"}) {
        if (!sec.count(name)) throw ExtractError(fmt::format("missing {} section", name));
    }
    DesignBrief brief;
    std::vector<std::string> words;
    for (const auto& line : sec["INTENT"]) {
        if (auto t = trim(line); !t.empty()) words.push_back(t);
    }
    brief.intent = fmt::format("{}", fmt::join(words, " "));
    if (brief.intent.empty()) throw ExtractError("INTENT section is empty");

    for (const auto& line : sec["INPUTS"]) {
        const std::string t = strip_marker(line);
        if (t.empty() || upper(t) == "NONE") continue;
        std::smatch m;
        if (!std::regex_match(t, m, input)) throw ExtractError(fmt::format("input line not understood: '{}'", t));
        DesignInput in{m[1].str(), to_double(m[2]), to_double(m[3]), to_double(m[4])};
        if (in.min > in.max) throw ExtractError(fmt::format("input '{}' has min above max", in.name));
        brief.inputs.push_back(in);
    }
    for (const auto& line : sec["LOGIC"]) {
        if (auto t = strip_marker(line); !t.empty()) brief.logic.push_back(t);
    }
    return brief;
}

ComponentChain parse_chain(std::string_view reply) {
    static const std::regex loop(R"(\b(for each|foreach|for every|repeat|loop|while)\b)", std::regex::icase);
    static const std::regex step(R"(^([A-Za-z_]\w*)\s*=\s*([^()=]+?)\s*\((.*)\)\s*$)");
    static const std::regex arg(R"(^([^:]+?)\s*:\s*(.+)$)");
    auto sec = sections(reply, {"CHAIN", "NOTES"});
    if (!sec.count("CHAIN")) throw ExtractError("missing CHAIN section");

    ComponentChain chain;
    std::set<std::string> labels;
    for (const auto& line : sec["CHAIN"]) {
        const std::string t = strip_marker(line);
        if (t.empty()) continue;
        if (std::regex_search(t, loop)) throw ExtractError(fmt::format("loop construct in chain: '{}'", t));
        std::smatch m;
        if (!std::regex_match(t, m, step)) throw ExtractError(fmt::format("chain line not understood: '{}'", t));
        ChainStep s;
        s.label = m[1];
        s.component = trim(m[2].str());
        if (!labels.insert(s.label).second) throw ExtractError(fmt::format("label '{}' is defined twice", s.label));
        for (const auto& a : split_args(m[3].str())) {
            std::smatch am;
            if (!std::regex_match(a, am, arg)) throw ExtractError(fmt::format("argument '{}' has no port name", a));
            s.bindings.emplace_back(trim(am[1].str()), parse_binding(trim(am[2].str())));
        }
        chain.steps.push_back(std::move(s));
    }
    if (chain.steps.empty()) throw ExtractError("CHAIN section is empty");
    for (const auto& s : chain.steps) {
        for (const auto& [port, b] : s.bindings) {
            if (b.kind != Binding::Kind::ref) continue;
            if (!labels.count(b.label)) {
                throw ExtractError(fmt::format("step '{}' refers to undefined label '{}'", s.label, b.label));
            }
            if (b.label == s.label) throw ExtractError(fmt::format("step '{}' refers to itself", s.label));
        }
    }
    return chain;
}

std::string extract_notes(std::string_view reply) {
    auto sec = sections(reply, {"INTENT", "INPUTS", "LOGIC", "CHAIN", "NOTES"});
    auto it = sec.find("NOTES");
    if (it == sec.end()) return {};
    std::vector<std::string> kept;
    for (const auto& line : it->second) {
        if (line.rfind("```", 0) == 0) break;
        kept.push_back(line);
    }
    while (!kept.empty() && trim(kept.back()).empty()) kept.pop_back();
    while (!kept.empty() && trim(kept.front()).empty()) kept.erase(kept.begin());
    return fmt::format("{}", fmt::join(kept, "\n"));
}

std::string render_brief(const DesignBrief& brief) {
    std::string out = "INTENT:\n" + brief.intent + "\nINPUTS:\n";
    for (const auto& in : brief.inputs) {
        out += fmt::format("- {}: min {}, max {}, default {}\n", in.name, fmt_num(in.min), fmt_num(in.max), fmt_num(in.value));
    }
    out += "LOGIC:\n";
    for (std::size_t i = 0; i < brief.logic.size(); ++i) out += fmt::format("{}. {}\n", i + 1, brief.logic[i]);
    return out;
}

std::string render_chain(const ComponentChain& chain) {
    std::string out = "CHAIN:\n";
    for (const auto& s : chain.steps) {
        std::vector<std::string> args;
        for (const auto& [port, b] : s.bindings) args.push_back(port + ": " + render_binding(b));
        out += fmt::format("- {} = {}({})\n", s.label, s.component, fmt::join(args, ", "));
    }
    return out;
}

std::string extract_json(std::string_view raw) {
    std::string text;
    for (const auto& line : split_lines(raw)) {
        if (trim(line).rfind("```", 0) == 0) continue;
        text += line;
        text += '\n';
    }
    std::string best;
    for (std::size_t start = 0; start < text.size(); ++start) {
        if (text[start] != '{') continue;
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}' && --depth == 0) {
                if (i + 1 - start > best.size()) best = text.substr(start, i + 1 - start);
                start = i;
                break;
            }
        }
    }
    if (best.empty()) throw ExtractError("reply contains no JSON object");
    return best;
}

std::string stage1_system_prompt() {
    return R"(You are the first of three design agents. You turn a short request for a parametric
design into a design brief. Think step by step, in this order:

1. State the design intent in one or two sentences.
2. List the numeric inputs a designer would want to adjust, each with a sensible range and default.
3. Describe the construction logic as an ordered list of geometric operations that lead from the
   inputs to the goal geometry. Spell out any repetition as list operations (ranges, series,
   divisions) rather than loops.
4. Keep short notes on anything you were unsure about.

Reply with exactly these sections and nothing else:

INTENT:
<one or two sentences>
INPUTS:
- <name>: min <number>, max <number>, default <number>
LOGIC:
1. <first operation>
2. <next operation>
NOTES:
<your notes>
)";
}

std::string stage2_system_prompt(const Catalog& catalog) {
    std::string out = R"(You are the second of three design agents. You receive a design brief and map its logic
onto a chain of components. Work step by step, in this order:

1. Create one Number Slider per input of the brief.
2. Walk the logic in order and pick one component per operation.
3. Bind every input port either to an earlier label (optionally label.Port for a specific output),
   a number, a "text" literal, or for sliders a range written as slider <min>..<max> @ <value>.
4. Never use loops. Repetition must come from list components such as Range, Series or Divide Curve.
5. Keep short notes on any mapping you were unsure about.

Only these components exist (name: inputs -> outputs):
)";
    for (const auto& c : catalog.components()) {
        out += fmt::format("- {}: {} -> {}\n", c.canonical_name, port_list(c.inputs), port_list(c.outputs));
    }
    out += R"(
Reply with exactly these sections and nothing else:

CHAIN:
- <label> = <Component>(<Port>: <binding>, <Port>: <binding>)
NOTES:
<your notes>
)";
    return out;
}

std::string stage3_system_prompt() {
    return R"(You are the third of three design agents. You receive a component chain and write it out as
a script document in JSON. List every component once under "nodes" and every connection once
under "edges". Follow this grammar:

document := {"schema_version": 1, "nodes": [node...], "edges": [edge...]}
node     := {"id": <positive integer>, "component": <name>, "position": {"x": <number>, "y": <number>},
             "pins": {<input port>: <number> | <text> | {"slider": {"min": n, "max": n, "value": n}}}}
edge     := {"from": {"id": <node id>, "port": <output port>}, "to": {"id": <node id>, "port": <input port>}}

Literal bindings become pins. Label bindings become edges from the labelled node. Place nodes left
to right in chain order, 220 apart in x.

Example. The chain

- len = Number Slider(N: slider 1..10 @ 5)
- a = Construct Point()
- b = Construct Point(X: len)
- l = Line(Start: a, End: b)

becomes

{"schema_version": 1,
 "nodes": [
  {"id": 1, "component": "Number Slider", "position": {"x": 0, "y": 0}, "pins": {"N": {"slider": {"min": 1, "max": 10, "value": 5}}}},
  {"id": 2, "component": "Construct Point", "position": {"x": 0, "y": 120}, "pins": {}},
  {"id": 3, "component": "Construct Point", "position": {"x": 220, "y": 0}, "pins": {}},
  {"id": 4, "component": "Line", "position": {"x": 440, "y": 0}, "pins": {}}],
 "edges": [
  {"from": {"id": 1, "port": "N"}, "to": {"id": 3, "port": "X"}},
  {"from": {"id": 2, "port": "Pt"}, "to": {"id": 4, "port": "Start"}},
  {"from": {"id": 3, "port": "Pt"}, "to": {"id": 4, "port": "End"}}]}

Reply with the JSON document, optionally followed by a NOTES: section.
)";
}

namespace {

template <class Parse>
StageOutput run_stage(int stage, const std::string& system, const std::string& input, Backend& backend, Parse parse) {
    StageOutput out;
    out.stage = stage;
    out.input = input;
    const auto started = std::chrono::steady_clock::now();
    auto finish = [&] {
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return out;
    };
    std::string hint;
    for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
        out.attempts = attempt;
        try {
            out.raw = backend.complete({stage, system, input, hint, attempt});
        } catch (const std::exception& e) {
            out.error = fmt::format("stage {} backend failure: {}", stage, e.what());
            out.backend_failed = true;
            return finish();
        }
        try {
            out.diagnostics.clear();
            out.parsed = parse(out.raw, out.diagnostics);
            out.notes = extract_notes(out.raw);
            out.error.clear();
            return finish();
        } catch (const std::exception& e) {
            out.error = fmt::format("stage {} extraction failed after {} attempt{}: {}", stage, attempt,
                                    attempt == 1 ? "" : "s", e.what());
            hint = fmt::format("Your previous reply could not be used ({}). Reply again using the template exactly.",
                               e.what());
        }
    }
    return finish();
}

}  // namespace

StageOutput run_stage1(const std::string& prompt, Backend& backend) {
    if (trim(prompt).empty()) throw std::invalid_argument("prompt is empty");
    return run_stage(1, stage1_system_prompt(), prompt, backend,
                     [](const std::string& raw, std::vector<Diagnostic>&) { return parse_brief(raw); });
}

StageOutput run_stage2(const DesignBrief& brief, const Catalog& catalog, Backend& backend) {
    return run_stage(2, stage2_system_prompt(catalog), render_brief(brief), backend,
                     [&](const std::string& raw, std::vector<Diagnostic>& diags) {
                         ComponentChain chain = parse_chain(raw);
                         for (auto& s : chain.steps) {
                             if (resolve_name(catalog, s.component).kind != MatchKind::unknown) continue;
                             s.in_catalog = false;
                             diags.push_back(make_diagnostic(
                                 "A1", Severity::warning, {},
                                 fmt::format("chain step '{}' uses '{}', which is not in the catalog", s.label,
                                             s.component)));
                         }
                         return chain;
                     });
}

StageOutput run_stage3(const ComponentChain& chain, Backend& backend) {
    return run_stage(3, stage3_system_prompt(), render_chain(chain), backend,
                     [](const std::string& raw, std::vector<Diagnostic>& diags) {
                         TolerantParse parsed = parse_document_tolerant(extract_json(raw));
                         diags = std::move(parsed.diagnostics);
                         return parsed.document;
                     });
}

bool PipelineTranscript::backend_failed() const {
    return std::any_of(stages.begin(), stages.end(), [](const StageOutput& s) { return s.backend_failed; });
}

PipelineTranscript run_pipeline(const std::string& prompt, const Catalog& catalog, Backend& backend) {
    PipelineTranscript t;
    t.prompt = prompt;
    if (trim(prompt).empty()) {
        t.error = "prompt is empty";
        return t;
    }
    auto step = [&](StageOutput out) {
        t.stages.push_back(std::move(out));
        const StageOutput& s = t.stages.back();
        t.diagnostics.insert(t.diagnostics.end(), s.diagnostics.begin(), s.diagnostics.end());
        if (!s.ok()) t.error = s.error;
        return s.ok();
    };
    if (!step(run_stage1(prompt, backend))) return t;
    if (!step(run_stage2(std::get<DesignBrief>(*t.stages.back().parsed), catalog, backend))) return t;
    if (!step(run_stage3(std::get<ComponentChain>(*t.stages.back().parsed), backend))) return t;

    ScriptDocument doc = std::get<ScriptDocument>(*t.stages.back().parsed);
    doc.prompt = prompt;
    t.document = doc;
    try {
        BuildResult built = build_graph(doc, catalog);
        t.diagnostics.insert(t.diagnostics.end(), built.diagnostics.begin(), built.diagnostics.end());
        auto found = validate(built.graph);
        t.diagnostics.insert(t.diagnostics.end(), found.begin(), found.end());
    } catch (const CycleError& e) {
        t.diagnostics.push_back(make_diagnostic("G1", Severity::error, {}, e.what()));
    }
    sort_diagnostics(t.diagnostics);
    return t;
}

ojson to_json(const DesignBrief& brief) {
    ojson inputs = ojson::array();
    for (const auto& in : brief.inputs) {
        inputs.push_back({{"name", in.name}, {"min", in.min}, {"max", in.max}, {"default", in.value}});
    }
    return {{"intent", brief.intent}, {"inputs", inputs}, {"logic", brief.logic}};
}

ojson to_json(const ComponentChain& chain) {
    ojson steps = ojson::array();
    for (const auto& s : chain.steps) {
        ojson bindings = ojson::array();
        for (const auto& [port, b] : s.bindings) {
            ojson j{{"port", port}};
            switch (b.kind) {
                case Binding::Kind::ref:
                    j["ref"] = b.label;
                    if (!b.port.empty()) j["output"] = b.port;
                    break;
                case Binding::Kind::number: j["number"] = b.number; break;
                case Binding::Kind::text: j["text"] = b.text; break;
                case Binding::Kind::slider:
                    j["slider"] = {{"min", b.slider.min}, {"max", b.slider.max}, {"value", b.slider.value}};
                    break;
            }
            bindings.push_back(j);
        }
        steps.push_back(
            {{"label", s.label}, {"component", s.component}, {"in_catalog", s.in_catalog}, {"bindings", bindings}});
    }
    return {{"steps", steps}};
}

ojson to_json(const PipelineTranscript& t, bool include_timing) {
    ojson stages = ojson::array();
    for (const auto& s : t.stages) {
        ojson j;
        j["stage"] = s.stage;
        j["input"] = s.input;
        j["raw"] = s.raw;
        j["attempts"] = s.attempts;
        if (s.parsed) {
            std::visit(
                [&](const auto& p) {
                    using T = std::decay_t<decltype(p)>;
                    if constexpr (std::is_same_v<T, ScriptDocument>) {
                        j["parsed"] = document_to_json(p);
                    } else {
                        j["parsed"] = to_json(p);
                    }
                },
                *s.parsed);
        } else {
            j["parsed"] = nullptr;
        }
        j["notes"] = s.notes;
        if (!s.error.empty()) j["error"] = s.error;
        if (s.backend_failed) j["backend_failed"] = true;
        j["diagnostics"] = to_json(s.diagnostics);
        if (include_timing) j["seconds"] = s.seconds;
        stages.push_back(j);
    }
    ojson out;
    out["schema_version"] = 1;
    out["prompt"] = t.prompt;
    out["stages"] = stages;
    out["document"] = t.document ? document_to_json(*t.document) : ojson(nullptr);
    out["diagnostics"] = to_json(t.diagnostics);
    if (!t.error.empty()) out["error"] = t.error;
    return out;
}

}  // namespace sforge
