#include "dform/app.hpp"
#include "dform/expr.hpp"
#include "httplib.h"

namespace dform {

using nlohmann::json;

namespace {

HttpReply json_reply(int status, const json& j) { return {status, "application/json", j.dump() + "\n"}; }

HttpReply error_reply(int status, const std::string& message) { return json_reply(status, {{"error", message}}); }

bool depends_on(const Expr& e, Var v) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return false;
        case Expr::Kind::Variable: return e.var() == v;
        case Expr::Kind::Unary: return depends_on(e.arg(), v);
        case Expr::Kind::Binary: return depends_on(e.lhs(), v) || depends_on(e.rhs(), v);
    }
    return false;
}

json parse_body(const std::string& body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw Error(std::string("request body is not valid JSON: ") + e.what());
    }
}

HttpReply run(const std::string& body, const Config& config, OutputFormat format) {
    const JobResult r = run_job(JobSpec::from_json(parse_body(body)), config);
    const std::string out = render_output(r, format, config);
    return {200, format == OutputFormat::Svg ? "image/svg+xml" : "application/json", out};
}

HttpReply parse_endpoint(const std::string& body) {
    const json j = parse_body(body);
    if (!j.is_object() || !j.contains("expr") || !j.at("expr").is_string()) throw Error("parse: body must be {\"expr\": string}");
    for (const auto& [key, _] : j.items()) {
        if (key != "expr") throw Error("parse: unknown key '" + key + "'");
    }
    const Expr e = parse(j.at("expr").get<std::string>());
    json vars = json::array();
    if (depends_on(e, Var::X)) vars.push_back("x");
    if (depends_on(e, Var::Y)) vars.push_back("y");
    return json_reply(200, {{"ok", true}, {"canonical", to_string(e)}, {"variables", vars}, {"ast", expr_to_json(e)}});
}

HttpReply check_endpoint(const std::string& body, const Config& config) {
    const json j = parse_body(body);
    const JobSpec job = JobSpec::from_json(j);
    if (!job.object.is_object() || !job.object.contains("kind")) throw Error("object: missing kind");
    const auto kinds = typecheck(kind_from_name(job.object.at("kind").get<std::string>()), job.ops, config);
    json names = json::array();
    for (Kind k : kinds) names.push_back(std::string(name_of(k)));
    return json_reply(200, {{"ok", true}, {"kinds", names}});
}

}  // namespace

HttpReply handle_request(const std::string& method, const std::string& path, const std::string& body,
                         const Config& config) {
    try {
        if (path == "/api/health") {
            if (method != "GET") return error_reply(405, "use GET for " + path);
            return json_reply(200, {{"status", "ok"}, {"version", kVersion}});
        }
        const bool known = path == "/api/parse" || path == "/api/scene" || path == "/api/render" || path == "/api/check";
        if (!known) return error_reply(404, "no such endpoint: " + path);
        if (method != "POST") return error_reply(405, "use POST for " + path);
        if (body.size() > config.body_limit) {
            return error_reply(413, "request body exceeds " + std::to_string(config.body_limit) + " bytes");
        }
        if (path == "/api/parse") return parse_endpoint(body);
        if (path == "/api/check") return check_endpoint(body, config);
        return run(body, config, path == "/api/render" ? OutputFormat::Svg : OutputFormat::SceneJson);
    } catch (const ParseError& e) {
        return json_reply(400, {{"error", e.message()}, {"offset", e.offset()}, {"token", e.token()}});
    } catch (const Error& e) {
        return error_reply(400, e.what());
    } catch (const std::exception& e) {
        return error_reply(500, std::string("internal error: ") + e.what());
    }
}

struct HttpServer::Impl {
    Config config;
    httplib::Server server;
    int port = 0;
};

HttpServer::HttpServer(Config config) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    auto& s = impl_->server;
    s.set_payload_max_length(impl_->config.body_limit);
    const auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        const HttpReply r = handle_request(req.method, req.path, req.body, impl_->config);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    s.Get(R"(/api/.*)", handler);
    s.Post(R"(/api/.*)", handler);
    s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        // Transport-level failures (oversized payloads, unknown routes) keep the JSON error shape.
        if (!res.body.empty()) return;
        const std::string msg = res.status == 413 ? "request body too large" : "no such endpoint";
        res.set_content(json{{"error", msg}}.dump() + "\n", "application/json");
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
    auto& s = impl_->server;
    impl_->port = impl_->config.port == 0 ? s.bind_to_any_port(impl_->config.bind)
                                          : (s.bind_to_port(impl_->config.bind, impl_->config.port) ? impl_->config.port : -1);
    if (impl_->port < 0) throw Error("cannot bind " + impl_->config.bind + ":" + std::to_string(impl_->config.port));
    return impl_->port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace dform
