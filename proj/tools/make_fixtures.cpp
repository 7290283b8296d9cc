// Builds mock backend fixtures from hand-written stage replies.
//
//   make_fixtures <replies dir> <mock dir> [--check]
//
// Each case directory holds prompt.txt and stage1.txt..stage3.txt. The key of stage N is computed from
// the exact input the pipeline will send: the prompt, then the rendered brief, then the rendered chain.
// A case stops at the first missing or unparseable reply, which is how the garbage case is expressed.

#include "sforge/agents.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace sforge;

namespace {

std::optional<std::string> read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim_newline(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: make_fixtures <replies dir> <mock dir> [--check]\n";
        return 1;
    }
    const fs::path replies = argv[1];
    const fs::path mock = argv[2];
    const bool check = argc > 3 && std::string(argv[3]) == "--check";

    std::vector<fs::path> cases;
    for (const auto& e : fs::directory_iterator(replies)) {
        if (e.is_directory()) cases.push_back(e.path());
    }
    std::sort(cases.begin(), cases.end());

    std::map<fs::path, std::string> wanted;
    for (const auto& dir : cases) {
        const auto prompt = read(dir / "prompt.txt");
        if (!prompt) {
            std::cerr << dir.string() << ": no prompt.txt\n";
            return 1;
        }
        std::string input = trim_newline(*prompt);
        for (int stage = 1; stage <= 3; ++stage) {
            const auto reply = read(dir / fmt::format("stage{}.txt", stage));
            if (!reply) break;
            nlohmann::ordered_json j;
            j["stage"] = stage;
            j["key"] = mock_key(input);
            j["reply"] = *reply;
            wanted[mock / fmt::format("{}.stage{}.json", dir.filename().string(), stage)] = j.dump(2) + "\n";
            try {
                if (stage == 1) input = render_brief(parse_brief(*reply));
                if (stage == 2) input = render_chain(parse_chain(*reply));
            } catch (const ExtractError& e) {
                std::cerr << fmt::format("{}: stage {} reply does not parse ({}), stopping this case\n",
                                         dir.filename().string(), stage, e.what());
                break;
            }
        }
    }

    int stale = 0;
    for (const auto& [path, text] : wanted) {
        if (check) {
            if (read(path) != text) {
                std::cerr << path.string() << " is out of date\n";
                ++stale;
            }
            continue;
        }
        fs::create_directories(path.parent_path());
        std::ofstream(path, std::ios::binary) << text;
    }
    if (check && fs::is_directory(mock)) {
        for (const auto& e : fs::directory_iterator(mock)) {
            if (e.path().extension() == ".json" && !wanted.count(e.path())) {
                std::cerr << e.path().string() << " has no reply source\n";
                ++stale;
            }
        }
    }
    if (!check) std::cout << fmt::format("wrote {} fixtures to {}\n", wanted.size(), mock.string());
    return stale == 0 ? 0 : 1;
}
