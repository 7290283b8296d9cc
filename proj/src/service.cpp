#include "sforge/service.hpp"

#include <httplib.h>
#include <fmt/format.h>

#include <algorithm>
#include <mutex>
#include <random>

namespace sforge {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

struct Session {
    std::mutex mutex;
    ScriptDocument document;
    std::map<NodeId, double> overrides;
    std::vector<ojson> transcripts;
};

std::string new_session_id() {
    static std::mutex m;
    static std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(m);
    return fmt::format("{:016x}{:016x}", rng(), rng());
}

void send(httplib::Response& res, int status, const ojson& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        json j = json::parse(req.body);
        if (!j.is_object()) throw ApiError(400, "bad_request", "request body must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw ApiError(400, "bad_request", fmt::format("request body is not JSON: {}", e.what()));
    }
}

const json& require(const json& body, const char* field) {
    if (!body.contains(field)) throw ApiError(422, "missing_field", fmt::format("request needs '{}'", field));
    return body.at(field);
}

std::optional<std::vector<std::string>> repair_ids(const json& body) {
    if (!body.contains("repair_ids")) return std::nullopt;
    const json& ids = body.at("repair_ids");
    if (!ids.is_array() || !std::all_of(ids.begin(), ids.end(), [](const json& x) { return x.is_string(); })) {
        throw ApiError(422, "bad_request", "repair_ids must be an array of strings");
    }
    return ids.get<std::vector<std::string>>();
}

ojson overrides_json(const std::map<NodeId, double>& overrides) {
    ojson j = ojson::object();
    for (const auto& [id, v] : overrides) j[std::to_string(id)] = v;
    return j;
}

}  // namespace

struct Service::Impl {
    const Catalog& catalog;
    std::shared_ptr<Backend> backend;
    ServiceOptions options;
    httplib::Server server;
    std::mutex sessions_mutex;
    std::map<std::string, std::shared_ptr<Session>> sessions;

    Impl(const Catalog& c, std::shared_ptr<Backend> b, ServiceOptions o)
        : catalog(c), backend(std::move(b)), options(std::move(o)) {
        routes();
    }

    std::shared_ptr<Session> session(const std::string& id) {
        std::lock_guard lock(sessions_mutex);
        auto it = sessions.find(id);
        if (it == sessions.end()) {
            throw ApiError(404, "unknown_session", fmt::format("no session '{}'", id), {{"location", {{"session", id}}}});
        }
        return it->second;
    }

    static ojson state(const std::string& id, const Session& s) {
        ojson history = ojson::array();
        for (std::size_t i = 0; i < s.transcripts.size(); ++i) {
            const auto& t = s.transcripts[i];
            history.push_back({{"index", i}, {"prompt", t.at("prompt")}, {"has_document", !t.at("document").is_null()}});
        }
        return {{"schema_version", kSchemaVersion},
                {"id", id},
                {"document", document_to_json(s.document)},
                {"overrides", overrides_json(s.overrides)},
                {"transcripts", history}};
    }

    // Overrides must name slider nodes of the session document.
    void check_overrides(const ScriptDocument& doc, const std::map<NodeId, double>& overrides) const {
        for (const auto& [id, v] : overrides) {
            const ScriptNode* n = doc.find(id);
            const bool slider = n != nullptr && [&] {
                const auto r = resolve_name(catalog, n->component);
                return r.match && catalog.at(r.match->index).canonical_name == "Number Slider";
            }();
            if (!slider) {
                throw ApiError(422, "bad_override", fmt::format("node {} is not a Number Slider", id),
                               {{"location", {{"node", id}}}});
            }
        }
    }

    // Runs the pipeline; a backend failure becomes a 502 carrying the transcript.
    ojson generate(const json& body) {
        const json& p = require(body, "prompt");
        if (!p.is_string()) throw ApiError(422, "bad_request", "prompt must be a string");
        const std::string prompt = p.get<std::string>();
        if (prompt.find_first_not_of(" \t\r\n") == std::string::npos) {
            throw ApiError(422, "empty_prompt", "prompt is empty");
        }
        PipelineTranscript t = run_pipeline(prompt, catalog, *backend);
        ojson tj = to_json(t);
        if (t.backend_failed()) {
            throw ApiError(502, "backend_failure", t.error,
                           {{"location", {{"stage", t.stages.back().stage}}}, {"transcript", tj}});
        }
        return tj;
    }

    template <class F>
    void handle(const std::string& pattern, bool post, F f) {
        auto wrapped = [f](const httplib::Request& req, httplib::Response& res) {
            try {
                send(res, 200, f(req));
            } catch (const ApiError& e) {
                send(res, e.status(), e.body());
            } catch (const std::exception& e) {
                send(res, 500, ApiError(500, "internal", e.what()).body());
            }
        };
        if (post) {
            server.Post(pattern, wrapped);
        } else {
            server.Get(pattern, wrapped);
        }
    }

    void routes() {
        server.set_read_timeout(std::chrono::seconds(120));
        server.set_write_timeout(std::chrono::seconds(120));

        handle("/api/v1/generate", true, [this](const httplib::Request& req) { return generate(parse_body(req)); });
        handle("/api/v1/validate", true, [this](const httplib::Request& req) {
            return validate_response(load_document(require(parse_body(req), "document")), catalog);
        });
        handle("/api/v1/repair", true, [this](const httplib::Request& req) {
            const json body = parse_body(req);
            return repair_response(load_document(require(body, "document")), repair_ids(body), catalog);
        });
        handle("/api/v1/evaluate", true, [this](const httplib::Request& req) {
            const json body = parse_body(req);
            const auto overrides = overrides_from_json(body.value("overrides", json::object()));
            return evaluate_response(load_document(require(body, "document")), overrides, catalog);
        });
        handle("/api/v1/registry", false, [this](const httplib::Request&) { return registry_response(catalog); });

        handle("/api/v1/session", false, [this](const httplib::Request&) {
            std::lock_guard lock(sessions_mutex);
            ojson ids = ojson::array();
            for (const auto& [id, s] : sessions) ids.push_back(id);
            return ojson{{"schema_version", kSchemaVersion}, {"sessions", ids}};
        });
        handle("/api/v1/session", true, [this](const httplib::Request& req) {
            const json body = parse_body(req);
            auto s = std::make_shared<Session>();
            if (body.contains("document")) s->document = load_document(body.at("document")).document;
            if (body.contains("overrides")) {
                s->overrides = overrides_from_json(body.at("overrides"));
                check_overrides(s->document, s->overrides);
            }
            const std::string id = new_session_id();
            {
                std::lock_guard lock(sessions_mutex);
                sessions[id] = s;
            }
            std::lock_guard lock(s->mutex);
            return state(id, *s);
        });
        handle(R"(/api/v1/session/([0-9a-f]+))", false, [this](const httplib::Request& req) {
            const std::string id = req.matches[1];
            auto s = session(id);
            std::lock_guard lock(s->mutex);
            return state(id, *s);
        });
        handle(R"(/api/v1/session/([0-9a-f]+))", true, [this](const httplib::Request& req) {
            const std::string id = req.matches[1];
            const json body = parse_body(req);
            auto s = session(id);
            std::lock_guard lock(s->mutex);
            ScriptDocument doc = s->document;
            auto overrides = s->overrides;
            if (body.contains("document")) {
                doc = load_document(body.at("document")).document;
                overrides.clear();
            }
            if (body.contains("overrides")) overrides = overrides_from_json(body.at("overrides"));
            check_overrides(doc, overrides);
            s->document = std::move(doc);
            s->overrides = std::move(overrides);
            return state(id, *s);
        });
        server.Delete(R"(/api/v1/session/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(sessions_mutex);
            if (sessions.erase(req.matches[1]) == 0) {
                send(res, 404, ApiError(404, "unknown_session", "no such session").body());
                return;
            }
            send(res, 200, {{"schema_version", kSchemaVersion}, {"deleted", req.matches[1].str()}});
        });
        handle(R"(/api/v1/session/([0-9a-f]+)/generate)", true, [this](const httplib::Request& req) {
            const std::string id = req.matches[1];
            auto s = session(id);
            const json body = parse_body(req);
            ojson t;
            try {
                t = generate(body);
            } catch (const ApiError& e) {
                if (e.extra().contains("transcript")) {
                    std::lock_guard lock(s->mutex);
                    s->transcripts.push_back(e.extra().at("transcript"));
                }
                throw;
            }
            std::lock_guard lock(s->mutex);
            s->transcripts.push_back(t);
            if (!t.at("document").is_null()) {
                s->document = load_document(std::string_view(t.at("document").dump())).document;
                s->overrides.clear();
            }
            return t;
        });
        handle(R"(/api/v1/session/([0-9a-f]+)/transcripts/(\d+))", false, [this](const httplib::Request& req) {
            auto s = session(req.matches[1]);
            std::lock_guard lock(s->mutex);
            const std::size_t n = std::stoul(req.matches[2]);
            if (n >= s->transcripts.size()) throw ApiError(404, "unknown_transcript", "no such transcript");
            return s->transcripts[n];
        });
        handle(R"(/api/v1/session/([0-9a-f]+)/validate)", true, [this](const httplib::Request& req) {
            auto s = session(req.matches[1]);
            std::lock_guard lock(s->mutex);
            return validate_response({s->document, {}}, catalog);
        });
        handle(R"(/api/v1/session/([0-9a-f]+)/evaluate)", true, [this](const httplib::Request& req) {
            const json body = parse_body(req);
            auto s = session(req.matches[1]);
            std::lock_guard lock(s->mutex);
            if (body.contains("overrides")) {
                auto overrides = overrides_from_json(body.at("overrides"));
                check_overrides(s->document, overrides);
                s->overrides = std::move(overrides);
            }
            return evaluate_response({s->document, {}}, s->overrides, catalog);
        });
        handle(R"(/api/v1/session/([0-9a-f]+)/repair)", true, [this](const httplib::Request& req) {
            const json body = parse_body(req);
            auto s = session(req.matches[1]);
            std::lock_guard lock(s->mutex);
            ojson out = repair_response({s->document, {}}, repair_ids(body), catalog);
            s->document = load_document(std::string_view(out.at("document").dump())).document;
            std::erase_if(s->overrides, [&](const auto& kv) { return s->document.find(kv.first) == nullptr; });
            return out;
        });

        if (options.static_dir) server.set_mount_point("/", options.static_dir->string());
    }
};

Service::Service(const Catalog& catalog, std::shared_ptr<Backend> backend, ServiceOptions options)
    : impl_(std::make_unique<Impl>(catalog, std::move(backend), std::move(options))) {}

Service::~Service() { stop(); }

int Service::bind() {
    auto& o = impl_->options;
    if (o.port == 0) {
        const int port = impl_->server.bind_to_any_port(o.host);
        if (port > 0) o.port = port;
        return port > 0 ? port : -1;
    }
    return impl_->server.bind_to_port(o.host, o.port) ? o.port : -1;
}

bool Service::run() { return impl_->server.listen_after_bind(); }

void Service::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace sforge
