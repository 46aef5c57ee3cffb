#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dform/app.hpp"

namespace dform {

using nlohmann::json;

namespace {

struct Flags {
    std::string kind;
    std::vector<std::string> comps;
    std::string range, xrange, yrange;
    int n = 31;
    std::string chain;
    std::string style_file;
    std::string job_file;
    std::string out = "-";
    std::string format;
    bool check = false;

    std::optional<int> max_sheets;
    std::string color;
    bool log_scaling = false;
    std::optional<int> levels;
    bool labels = false;
    bool no_arrowheads = false;

    std::vector<double> target;
    double mag = 2.0;
    int dpd = 9;
    double insize = 0.3;
    std::string zoom_mode = "zoom";
    bool no_inset = false;

    std::optional<int> port;
    std::string bind;
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(path + ": " + e.what());
    }
}

/// "a:b" -> {min, max}.
std::pair<double, double> parse_range(const std::string& s, const char* flag) {
    const auto colon = s.find(':', 1);
    if (colon == std::string::npos) throw Error(std::string(flag) + ": expected a:b, got '" + s + "'");
    try {
        std::size_t used_a = 0, used_b = 0;
        const std::string a = s.substr(0, colon), b = s.substr(colon + 1);
        const double lo = std::stod(a, &used_a), hi = std::stod(b, &used_b);
        if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument(s);
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw Error(std::string(flag) + ": expected a:b, got '" + s + "'");
    }
}

json axis_json(const std::string& r, const char* flag, int n) {
    const auto [lo, hi] = parse_range(r, flag);
    return {{"min", lo}, {"max", hi}, {"n", n}};
}

JobSpec job_from_flags(const Flags& f, const std::string& command) {
    JobSpec job;
    if (!f.job_file.empty()) {
        job = JobSpec::from_json(read_json_file(f.job_file));
    } else {
        if (f.kind.empty()) throw Error("--kind is required (form0, form1, form2 or vf)");
        const std::string xr = !f.xrange.empty() ? f.xrange : !f.range.empty() ? f.range : "-5:5";
        const std::string yr = !f.yrange.empty() ? f.yrange : !f.range.empty() ? f.range : "-5:5";
        json comps = json::array();
        for (const auto& c : f.comps) comps.push_back({{"expr", c}});
        job.object = {{"kind", f.kind},
                      {"grid", {{"x", axis_json(xr, "--xrange", f.n)}, {"y", axis_json(yr, "--yrange", f.n)}}},
                      {"components", comps}};
        if (!f.chain.empty()) job.ops = chain_from_cli(f.chain);
        job.format = command == "op" ? OutputFormat::ValuesJson : OutputFormat::Svg;
    }

    json overrides = json::object();
    if (f.max_sheets) overrides["max_sheets"] = *f.max_sheets;
    if (!f.color.empty()) overrides["color"] = f.color;
    if (f.log_scaling) overrides["log_scaling"] = true;
    if (f.levels) overrides["levels"] = *f.levels;
    if (f.labels) overrides["labels"] = true;
    if (f.no_arrowheads) overrides["arrowheads"] = false;
    if (!f.style_file.empty()) job.style = style_from_json(read_json_file(f.style_file), job.style);
    job.style = style_from_json(overrides, job.style);

    if (command == "zoom") {
        if (f.target.size() != 2) throw Error("zoom: --target x,y is required");
        json z = {{"target", f.target}, {"mag", f.mag}, {"dpd", f.dpd}, {"insize", f.insize},
                  {"inset", !f.no_inset}, {"mode", f.zoom_mode}};
        job.inset = JobSpec::from_json({{"object", job.object}, {"zoom", z}}).inset;
    }
    if (!f.format.empty()) job.format = format_from_name(f.format);
    return job;
}

void write_output(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out) throw Error("write failed: " + path);
}

int run_check(const JobSpec& job, const Config& config) {
    if (!job.object.is_object() || !job.object.contains("kind")) throw Error("object: missing kind");
    const auto kinds = typecheck(kind_from_name(job.object.at("kind").get<std::string>()), job.ops, config);
    std::string line;
    for (std::size_t k = 0; k < kinds.size(); ++k) line += (k ? " -> " : "") + std::string(name_of(kinds[k]));
    std::cout << "ok: " << line << "\n";
    return 0;
}

void add_object_flags(CLI::App* app, Flags& f) {
    app->add_option("--kind", f.kind, "Object kind")->check(CLI::IsMember({"form0", "form1", "form2", "vf"}));
    app->add_option("--comp", f.comps, "Component equation (repeat per component)")->allow_extra_args(false);
    app->add_option("--range", f.range, "Shared axis range a:b")->allow_extra_args(false);
    app->add_option("--xrange", f.xrange, "x range a:b")->allow_extra_args(false);
    app->add_option("--yrange", f.yrange, "y range a:b")->allow_extra_args(false);
    app->add_option("--n", f.n, "Points per axis")->check(CLI::Range(2, 100000));
    app->add_option("--chain", f.chain, "Ops: op[:key=val...][,op...]");
    app->add_option("--job", f.job_file, "JobSpec JSON file (replaces the object flags)");
    app->add_option("--style", f.style_file, "Style JSON file");
    app->add_option("--out", f.out, "Output path, - for stdout");
    app->add_option("--format", f.format, "svg, scene-json or values-json")
        ->check(CLI::IsMember({"svg", "scene-json", "values-json"}));
    app->add_flag("--check", f.check, "Type-check the chain only");
    app->add_option("--max-sheets", f.max_sheets, "Sheets for the largest magnitude");
    app->add_option("--color", f.color, "Stroke colour");
    app->add_flag("--log-scaling", f.log_scaling, "Scale magnitudes logarithmically");
    app->add_option("--levels", f.levels, "Number of contour levels");
    app->add_flag("--labels", f.labels, "Label contour lines");
    app->add_flag("--no-arrowheads", f.no_arrowheads, "Plain stacks");
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"Differential forms on the plane: compute, plot and serve", "dform"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Flags f;

    auto* plot = app.add_subcommand("plot", "Render an object (after an optional chain)");
    auto* op = app.add_subcommand("op", "Apply a chain and write the resulting values");
    auto* zoom = app.add_subcommand("zoom", "Render an object with a zoom or derivative inset");
    auto* check = app.add_subcommand("check", "Type-check a chain without computing");
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    for (auto* sub : {plot, op, zoom, check}) add_object_flags(sub, f);
    zoom->add_option("--target", f.target, "Target point x,y")->delimiter(',')->expected(2);
    zoom->add_option("--mag", f.mag, "Magnification");
    zoom->add_option("--dpd", f.dpd, "Inset points per axis");
    zoom->add_option("--insize", f.insize, "Inset side, fraction of the plot side");
    zoom->add_option("--zoom-mode", f.zoom_mode, "zoom, deriv, div or curl")
        ->check(CLI::IsMember({"zoom", "deriv", "div", "curl"}));
    zoom->add_flag("--no-inset", f.no_inset, "Render the zoomed window on its own");
    serve->add_option("--port", f.port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
    serve->add_option("--bind", f.bind, "Bind address");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        Config config = Config::load();
        if (serve->parsed()) {
            if (f.port) config.port = *f.port;
            if (!f.bind.empty()) config.bind = f.bind;
            HttpServer server(config);
            const int port = server.bind();
            std::cerr << "dform " << kVersion << " listening on http://" << config.bind << ":" << port << "\n";
            server.listen();
            return 0;
        }
        const std::string command = plot->parsed() ? "plot" : op->parsed() ? "op" : zoom->parsed() ? "zoom" : "check";
        const JobSpec job = job_from_flags(f, command);
        if (command == "check" || f.check) return run_check(job, config);
        const JobResult r = run_job(job, config);
        for (const auto& w : r.warnings) std::cerr << "dform: warning: " << w << "\n";
        write_output(f.out, render_output(r, job.format, config));
        return 0;
    } catch (const Error& e) {
        std::cerr << "dform: error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "dform: internal error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace dform
