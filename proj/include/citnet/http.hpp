#pragma once

// HTTP front end for Service on top of cpp-httplib.

#include <functional>
#include <string>

#include <httplib.h>

#include "citnet/error.hpp"
#include "citnet/service.hpp"

namespace citnet {

class HttpServer {
public:
    explicit HttpServer(Service& service) : service_(service) {
        auto handler = [this](const httplib::Request& req, httplib::Response& res) { forward(req, res); };
        server_.Get(R"(/v1(/.*)?)", handler);
        server_.Post(R"(/v1(/.*)?)", handler);
        server_.Delete(R"(/v1(/.*)?)", handler);
        server_.Put(R"(/v1(/.*)?)", handler);
        server_.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
            if (!res.body.empty()) return;
            const nlohmann::json j{{"error", {{"status", res.status}, {"type", "not_found"}, {"message", "no endpoint at '" + req.path + "'"}}}};
            res.set_content(j.dump(), "application/json");
        });
    }

    /// Binds and returns the port; port 0 picks a free one.
    int bind(const std::string& host, int port) {
        if (port == 0) {
            const int chosen = server_.bind_to_any_port(host);
            if (chosen < 0) throw IoError("cannot bind to " + host);
            return chosen;
        }
        if (!server_.bind_to_port(host, port)) throw IoError("cannot bind to " + host + ":" + std::to_string(port));
        return port;
    }

    /// Blocks until stop().
    void run() {
        if (!server_.listen_after_bind()) throw IoError("server stopped unexpectedly");
    }

    void stop() { server_.stop(); }
    void wait_until_ready() { server_.wait_until_ready(); }

private:
    void forward(const httplib::Request& req, httplib::Response& res) {
        Request r;
        r.method = req.method;
        r.path = req.path;
        for (const auto& [k, v] : req.params) r.query[k] = v;
        r.body = req.body;
        r.content_type = req.get_header_value("Content-Type");
        auto out = service_.handle(r);
        res.status = out.status;
        res.set_content(std::move(out.body), out.content_type);
    }

    Service& service_;
    httplib::Server server_;
};

} // namespace citnet
