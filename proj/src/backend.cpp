#include <httplib.h>


#include "sforge/agents.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sforge {

using json = nlohmann::json;

namespace {

std::atomic<std::size_t> g_live_calls{0};

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

}  // namespace

BackendConfig BackendConfig::from_env(BackendConfig c) {
    if (auto v = env("SF_BACKEND")) {
        if (*v == "live") {
            c.kind = BackendKind::live;
        } else if (*v == "mock") {
            c.kind = BackendKind::mock;
        } else {
            throw BackendError(fmt::format("SF_BACKEND must be live or mock, got '{}'", *v));
        }
    }
    if (auto v = env("SF_API_URL")) c.endpoint = *v;
    if (auto v = env("SF_API_KEY")) c.api_key = *v;
    if (auto v = env("SF_MODEL")) c.model = *v;
    if (auto v = env("SF_TEMPERATURE")) {
        char* end = nullptr;
        const double t = std::strtod(v->c_str(), &end);
        if (end == v->c_str() || *end != '\0' || t < 0.0 || t > 2.0) {
            throw BackendError(fmt::format("SF_TEMPERATURE must be a number in [0, 2], got '{}'", *v));
        }
        c.temperature = t;
    }
    return c;
}

BackendConfig BackendConfig::from_env() { return from_env(BackendConfig{}); }

std::string normalize_stage_input(std::string_view text) {
    std::string out;
    bool space = false;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            space = !out.empty();
            continue;
        }
        if (space) out.push_back(' ');
        space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::string mock_key(std::string_view stage_input) {
    std::uint64_t h = 14695981039346656037ull;
    for (char c : normalize_stage_input(stage_input)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return fmt::format("{:016x}", h);
}

MockBackend::MockBackend(std::vector<MockFixture> fixtures, MockFallback fallback) : fallback_(fallback) {
    for (auto& f : fixtures) replies_[{f.stage, f.key}] = std::move(f.reply);
}

std::unique_ptr<MockBackend> MockBackend::from_dir(const std::filesystem::path& dir, MockFallback fallback) {
    std::vector<MockFixture> fixtures;
    if (!std::filesystem::is_directory(dir)) throw BackendError(fmt::format("fixture directory {} not found", dir.string()));
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        std::ifstream in(path);
        try {
            const json j = json::parse(in);
            fixtures.push_back({j.at("stage").get<int>(), j.at("key").get<std::string>(), j.at("reply").get<std::string>()});
        } catch (const json::exception& e) {
            throw BackendError(fmt::format("bad fixture {}: {}", path.string(), e.what()));
        }
    }
    return std::make_unique<MockBackend>(std::move(fixtures), fallback);
}

std::string MockBackend::complete(const BackendRequest& request) {
    ++calls_;
    const std::string key = mock_key(request.user);
    if (auto it = replies_.find({request.stage, key}); it != replies_.end()) return it->second;
    if (fallback_ == MockFallback::echo) return request.user;
    throw BackendError(fmt::format("mock backend has no stage {} reply for key {}", request.stage, key));
}

LiveBackend::LiveBackend(BackendConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw BackendError("live backend needs SF_API_URL");
}

std::string LiveBackend::complete(const BackendRequest& request) {
    ++g_live_calls;
    const std::string& url = config_.endpoint;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw BackendError(fmt::format("endpoint '{}' has no scheme", url));
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    json body;
    body["model"] = config_.model;
    body["temperature"] = config_.temperature;
    body["max_tokens"] = config_.max_tokens;
    std::string user = request.user;
    if (!request.hint.empty()) user += "\n\n" + request.hint;
    body["messages"] = json::array({{{"role", "system"}, {"content", request.system}}, {{"role", "user"}, {"content", user}}});

    httplib::Client client(origin);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) throw BackendError(fmt::format("request to {} failed: {}", origin, httplib::to_string(res.error())));
    if (res->status != 200) throw BackendError(fmt::format("backend answered HTTP {}", res->status));
    try {
        const json reply = json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(fmt::format("unexpected backend reply: {}", e.what()));
    }
}

std::size_t live_backend_calls() { return g_live_calls.load(); }

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
    if (config.kind == BackendKind::live) return std::make_unique<LiveBackend>(config);
    return MockBackend::from_dir(config.fixtures_dir, config.fallback);
}

}  // namespace sforge
