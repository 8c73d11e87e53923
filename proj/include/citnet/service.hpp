#pragma once

// Session service behind the HTTP front end. Transport-agnostic: the server
// in tools/ converts HTTP requests into Request and back.
//
//   POST   /v1/sessions                          create (JSON upload or raw export/archive)
//   GET    /v1/sessions/{sid}                    state
//   DELETE /v1/sessions/{sid}
//   GET    /v1/sessions/{sid}/publications       ?pattern=&scope=&offset=&limit=
//   GET    /v1/sessions/{sid}/publications/{id}  bibliographic details
//   GET    /v1/sessions/{sid}/frame              layout parameters in the query
//   GET    /v1/sessions/{sid}/components         ?limit=
//   GET    /v1/sessions/{sid}/path               ?from=&to=&kind=&max_paths=
//   GET    /v1/sessions/{sid}/archive            gzip session archive
//   POST   /v1/sessions/{sid}/{op}               mark select drill component expand remove
//                                                cluster cores back forward

#include <atomic>
#include <charconv>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citnet/archive.hpp"
#include "citnet/error.hpp"
#include "citnet/layout.hpp"
#include "citnet/load.hpp"
#include "citnet/ops.hpp"
#include "citnet/render.hpp"

namespace citnet {

struct Request {
    std::string method;
    std::string path; // decoded
    std::map<std::string, std::string> query;
    std::string body;
    std::string content_type;
};

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

inline int http_status(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::format: return 400;
    case ErrorKind::not_found: return 404;
    case ErrorKind::precondition: return 409;
    case ErrorKind::contract: return 422;
    case ErrorKind::io: return 500;
    }
    return 500;
}

struct ServiceOptions {
    MatchOptions match;
    std::size_t frame_cache_entries = 16; // per session
};

class Service {
public:
    explicit Service(ServiceOptions options = {}) : options_(options) {}

    Response handle(const Request& req) {
        try {
            return route(req);
        } catch (const Error& e) {
            return error(http_status(e.kind()), to_string(e.kind()), e.what());
        } catch (const nlohmann::json::exception& e) {
            return error(400, "format", std::string("malformed JSON: ") + e.what());
        } catch (const std::bad_alloc&) {
            return error(500, "internal", "out of memory");
        }
    }

    std::size_t session_count() const {
        std::shared_lock lock(sessions_mutex_);
        return sessions_.size();
    }

private:
    struct FrameCacheEntry {
        std::uint64_t view_key;
        std::string params_key;
        std::string body;
    };

    struct SessionState {
        explicit SessionState(Session s) : session(std::move(s)) {}
        Session session;
        std::shared_mutex mutex; // shared for reads, exclusive for mutations
        std::mutex cache_mutex;
        std::list<FrameCacheEntry> frames; // most recent first
    };

    using StatePtr = std::shared_ptr<SessionState>;

    static Response json_response(int status, const nlohmann::json& j) { return {status, j.dump(), "application/json"}; }

    static Response error(int status, const std::string& type, const std::string& message) {
        return json_response(status, {{"error", {{"status", status}, {"type", type}, {"message", message}}}});
    }

    static std::vector<std::string> split_path(const std::string& path) {
        std::vector<std::string> parts;
        std::size_t i = 0;
        while (i < path.size()) {
            while (i < path.size() && path[i] == '/') ++i;
            const auto j = path.find('/', i);
            const auto end = j == std::string::npos ? path.size() : j;
            if (end > i) parts.push_back(path.substr(i, end - i));
            i = end;
        }
        return parts;
    }

    static Response method_not_allowed(const std::string& method, const std::string& path) {
        return error(405, "method", "method " + method + " is not allowed on " + path);
    }

    Response route(const Request& req) {
        const auto parts = split_path(req.path);
        if (parts.size() < 2 || parts[0] != "v1" || parts[1] != "sessions")
            throw NotFoundError("no endpoint at '" + req.path + "'");
        if (parts.size() == 2) {
            if (req.method == "POST") return create(req);
            if (req.method == "GET") return list_sessions();
            return method_not_allowed(req.method, req.path);
        }
        const auto& sid = parts[2];
        if (parts.size() == 3) {
            if (req.method == "GET") return read(sid, [](const Session& s) { return nlohmann::json{{"state", state_json(s)}}; });
            if (req.method == "DELETE") return remove_session(sid);
            return method_not_allowed(req.method, req.path);
        }
        const auto& what = parts[3];
        if (what == "publications" && parts.size() > 4) {
            if (req.method != "GET") return method_not_allowed(req.method, req.path);
            // Ids may contain '/', e.g. DOI-derived ids.
            std::string id = parts[4];
            for (std::size_t i = 5; i < parts.size(); ++i) id += "/" + parts[i];
            return read(sid, [&](const Session& s) { return read_op(s, "details", {{"id", id}}); });
        }
        if (parts.size() != 4) throw NotFoundError("no endpoint at '" + req.path + "'");
        if (req.method == "GET") {
            if (what == "state") return read(sid, [](const Session& s) { return nlohmann::json{{"state", state_json(s)}}; });
            if (what == "publications") return read_query(sid, "search", req, {{"pattern", 's'}, {"q", 's'}, {"scope", 's'}, {"offset", 'u'}, {"limit", 'u'}});
            if (what == "components") return read_query(sid, "components", req, {{"limit", 'u'}});
            if (what == "path") return read_query(sid, "path", req, {{"from", 's'}, {"to", 's'}, {"kind", 's'}, {"max_paths", 'u'}});
            if (what == "frame") return frame(sid, req);
            if (what == "archive") return archive(sid);
            if (is_write_op(what)) return method_not_allowed(req.method, req.path);
            throw NotFoundError("no endpoint at '" + req.path + "'");
        }
        if (req.method == "POST") {
            if (!is_write_op(what)) {
                if (is_read_op(what) || what == "frame" || what == "archive") return method_not_allowed(req.method, req.path);
                throw NotFoundError("no endpoint at '" + req.path + "'");
            }
            const auto body = parse_body(req.body);
            return mutate(sid, what, body);
        }
        return method_not_allowed(req.method, req.path);
    }

    static nlohmann::json parse_body(const std::string& body) {
        if (body.find_first_not_of(" \t\r\n") == std::string::npos) return nlohmann::json::object();
        try {
            return nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("malformed JSON body: ") + e.what());
        }
    }

    // ---- sessions

    Response create(const Request& req) {
        std::optional<Session> session;
        nlohmann::json report;
        const auto format_q = req.query.count("format") ? req.query.at("format") : std::string();
        const bool is_json = req.content_type.rfind("application/json", 0) == 0;
        if (format_q == "archive" || req.content_type.rfind("application/gzip", 0) == 0) {
            session.emplace(load_archive(req.body));
            report = {{"publications", session->network().size()}, {"citations", session->network().edge_count()}};
        } else if (is_json) {
            const auto body = parse_body(req.body);
            detail::Fields f(body, "create");
            const auto format = f.require<std::string>("format");
            LoadedNetwork loaded;
            if (format == "wos") {
                std::vector<std::string> texts;
                if (body.contains("text") && body.at("text").is_string()) {
                    texts.push_back(f.require<std::string>("text"));
                    f.ignore("texts");
                } else {
                    f.ignore("text");
                    texts = f.require<std::vector<std::string>>("texts");
                }
                MatchOptions mo = options_.match;
                mo.incomplete_min_citations = f.get("incomplete_min_citations", mo.incomplete_min_citations);
                f.done();
                loaded = load_wos(texts, mo);
            } else if (format == "pairs") {
                const auto pubs = f.require<std::string>("publications");
                const auto cits = f.require<std::string>("citations");
                f.done();
                loaded = load_pairs(pubs, cits);
            } else {
                throw FormatError("create: format must be 'wos' or 'pairs'");
            }
            report = load_report_json(loaded);
            session.emplace(loaded.network);
        } else if (format_q == "wos" || format_q.empty()) {
            auto loaded = load_wos({req.body}, options_.match);
            report = load_report_json(loaded);
            session.emplace(loaded.network);
        } else {
            throw FormatError("unsupported upload format '" + format_q + "'");
        }
        auto state = std::make_shared<SessionState>(std::move(*session));
        const auto sid = "s" + std::to_string(++next_id_);
        nlohmann::json out{{"session", sid}, {"load", report}, {"state", state_json(state->session)}};
        {
            std::unique_lock lock(sessions_mutex_);
            sessions_.emplace(sid, std::move(state));
        }
        return json_response(201, out);
    }

    Response list_sessions() const {
        std::shared_lock lock(sessions_mutex_);
        nlohmann::json ids = nlohmann::json::array();
        for (const auto& [id, s] : sessions_) ids.push_back(id);
        return json_response(200, {{"sessions", ids}});
    }

    Response remove_session(const std::string& sid) {
        std::unique_lock lock(sessions_mutex_);
        if (!sessions_.erase(sid)) throw NotFoundError("unknown session '" + sid + "'");
        return json_response(200, {{"deleted", sid}});
    }

    StatePtr find(const std::string& sid) const {
        std::shared_lock lock(sessions_mutex_);
        auto it = sessions_.find(sid);
        if (it == sessions_.end()) throw NotFoundError("unknown session '" + sid + "'");
        return it->second;
    }

    template <class F>
    Response read(const std::string& sid, F&& f) {
        auto state = find(sid);
        std::shared_lock lock(state->mutex);
        return json_response(200, f(state->session));
    }

    /// Converts typed query parameters ('s' string, 'u' unsigned) into an op body.
    Response read_query(const std::string& sid, const char* op, const Request& req, const std::map<std::string, char>& types) {
        nlohmann::json args = nlohmann::json::object();
        for (const auto& [key, value] : req.query) {
            auto it = types.find(key);
            if (it == types.end()) throw FormatError(std::string(op) + ": unknown query parameter '" + key + "'");
            const std::string name = key == "q" ? "pattern" : key;
            if (it->second == 'u') args[name] = parse_unsigned(key, value);
            else args[name] = value;
        }
        return read(sid, [&](const Session& s) { return read_op(s, op, args); });
    }

    Response mutate(const std::string& sid, const std::string& op, const nlohmann::json& body) {
        auto state = find(sid);
        std::unique_lock lock(state->mutex);
        auto result = write_op(state->session, op, body);
        return json_response(200, {{"result", std::move(result)}, {"state", state_json(state->session)}});
    }

    Response archive(const std::string& sid) {
        auto state = find(sid);
        std::shared_lock lock(state->mutex);
        return {200, save_archive(state->session), "application/gzip"};
    }

    // ---- frames

    static std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || ptr != value.data() + value.size())
            throw FormatError("query parameter '" + key + "' must be a non-negative integer");
        return v;
    }

    static double parse_double(const std::string& key, const std::string& value) {
        double v = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || ptr != value.data() + value.size()) throw FormatError("query parameter '" + key + "' must be a number");
        return v;
    }

    static LayoutParams params_from_query(const std::map<std::string, std::string>& q) {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [key, value] : q) {
            if (key == "alpha" || key == "beta" || key == "stop_probability") {
                j[key] = parse_double(key, value);
            } else if (key == "use_transitive_reduction" || key == "score_within_view") {
                if (value != "true" && value != "false") throw FormatError("query parameter '" + key + "' must be true or false");
                j[key] = value == "true";
            } else {
                j[key] = parse_unsigned(key, value);
            }
        }
        return layout_params_from_json(j);
    }

    /// Content hash of the view: members and attributes.
    static std::uint64_t view_key(const NetworkView& view) {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&](std::uint64_t x) {
            h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 1099511628211ull;
        };
        mix(view.member_count());
        for (NodeIndex v : view.members()) mix(v);
        mix(0xAAAA);
        for (NodeIndex v : view.attributes().marked) mix(v);
        mix(0xBBBB);
        for (NodeIndex v : view.attributes().selected) mix(v);
        mix(0xCCCC);
        for (NodeIndex v : view.members()) mix(view.attributes().group(v));
        return h;
    }

    Response frame(const std::string& sid, const Request& req) {
        const auto params = params_from_query(req.query);
        params.validate();
        const auto params_key = layout_params_to_json(params).dump();
        auto state = find(sid);
        std::shared_lock lock(state->mutex);
        const auto key = view_key(state->session.current());
        {
            std::lock_guard cache_lock(state->cache_mutex);
            for (auto it = state->frames.begin(); it != state->frames.end(); ++it) {
                if (it->view_key == key && it->params_key == params_key) {
                    state->frames.splice(state->frames.begin(), state->frames, it);
                    return {200, it->body, "application/json"};
                }
            }
        }
        auto body = frame_to_json(compose_frame(state->session.current(), params)).dump();
        {
            std::lock_guard cache_lock(state->cache_mutex);
            state->frames.push_front({key, params_key, body});
            if (state->frames.size() > options_.frame_cache_entries) state->frames.pop_back();
        }
        return {200, std::move(body), "application/json"};
    }

    ServiceOptions options_;
    mutable std::shared_mutex sessions_mutex_;
    std::map<std::string, StatePtr> sessions_;
    std::atomic<std::uint64_t> next_id_{0};
};

} // namespace citnet
