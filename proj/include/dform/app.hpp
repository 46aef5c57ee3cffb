#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dform/render.hpp"
#include "json.hpp"

namespace dform {

inline constexpr const char* kVersion = "0.1.0";

/// Numeric settings shared by the CLI and the service. Loaded from the JSON
/// file named by DFORM_CONFIG when set; every key is optional.
struct Config {
    double threshold = kDefaultSingularThreshold;
    int canvas = 800;
    std::size_t max_grid = 201;  ///< points per axis, any grid a job creates
    int port = 7325;
    std::string bind = "127.0.0.1";
    std::size_t body_limit = 1 << 20;

    static Config from_json(const nlohmann::json& j, Config base);
    static Config from_json(const nlohmann::json& j);
    /// Defaults, then DFORM_CONFIG if the variable is set.
    static Config load();
};

inline Config Config::from_json(const nlohmann::json& j) { return from_json(j, Config{}); }

/// {"kind", "grid": {"x": {min, max, n}, "y": ...}, "components": [{"expr"} | {"values"}]}
Object object_from_json(const nlohmann::json& j, const Config& config = {});
/// Grid, expressions, row-major values (non-finite as null) and the sparse
/// mask [{"i", "j", "kind"}].
nlohmann::json object_to_json(const Object& obj);
nlohmann::json grid_to_json(const Grid2& g);

/// AST summary used by the parse endpoint.
nlohmann::json expr_to_json(const Expr& e);

/// How a job finishes with an inset: plain re-evaluation or one of the
/// local derivative fields.
enum class InsetMode { Zoom, Deriv, Div, Curl };

struct InsetSpec {
    ZoomSpec zoom;
    InsetMode mode = InsetMode::Zoom;
};

enum class OutputFormat { Svg, SceneJson, ValuesJson };
OutputFormat format_from_name(std::string_view name);

struct JobSpec {
    nlohmann::json object;
    nlohmann::json ops = nlohmann::json::array();
    PlotStyle style;
    std::optional<InsetSpec> inset;
    OutputFormat format = OutputFormat::Svg;

    static JobSpec from_json(const nlohmann::json& j);
};

/// Kinds after each op, starting with the object's own kind. Throws Error
/// at the first op whose input kind does not fit; nothing is computed.
std::vector<Kind> typecheck(Kind start, const nlohmann::json& ops, const Config& config = {});

/// Apply one op (JSON descriptor) to an object.
Object apply_op(const Object& obj, const nlohmann::json& op, const Config& config = {});

struct JobResult {
    Object object;
    std::vector<Kind> kinds;
    Scene scene;
    std::vector<std::string> warnings;
};

/// Type-check, compute the chain, build the scene (with the inset if asked).
JobResult run_job(const JobSpec& job, const Config& config = {});
/// The job's output document in its requested format.
std::string render_output(const JobResult& result, OutputFormat format, const Config& config = {});

/// Parse a CLI chain "op[:key=val...][,op...]" into op descriptors. A value
/// with ';' becomes a list; numeric text becomes a number.
nlohmann::json chain_from_cli(const std::string& chain);

/// One HTTP exchange, independent of the transport.
struct HttpReply {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

HttpReply handle_request(const std::string& method, const std::string& path, const std::string& body,
                         const Config& config = {});

/// HTTP transport over handle_request.
class HttpServer {
public:
    explicit HttpServer(Config config);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Bind config.bind:config.port (0 picks a free port); returns the port.
    int bind();
    /// Serve until stop(). Blocks.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Entry point of the dform CLI; returns the process exit code.
int cli_main(int argc, char** argv);

}  // namespace dform
