#include <algorithm>
#include <charconv>
#include <cmath>

#include "dform/app.hpp"

namespace dform {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(what); }
[[noreturn]] void bad_kind(const std::string& what) { throw KindError(what); }

/// Descriptor normalised to {"op": name, ...args}.
json normalise(const json& op) {
    if (op.is_string()) return json{{"op", op.get<std::string>()}};
    if (op.is_object() && op.contains("op") && op.at("op").is_string()) return op;
    bad("op must be a name or an object with an \"op\" key: " + op.dump());
}

void allow_keys(const json& op, std::initializer_list<const char*> keys) {
    for (const auto& [key, _] : op.items()) {
        if (key == "op") continue;
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
            bad(op.at("op").get<std::string>() + ": unknown argument '" + key + "'");
        }
    }
}

Mode mode_of(const json& op) {
    return op.contains("mode") ? mode_from_name(op.at("mode").get<std::string>()) : Mode::Auto;
}

std::string expr_text(const json& v) {
    if (v.is_number()) return v.dump();
    if (v.is_string()) return v.get<std::string>();
    bad("expected an equation or a number, got " + v.dump());
}

std::vector<std::string> expr_list(const json& v, std::size_t want, const char* what) {
    if (!v.is_array() || v.size() != want) bad(std::string(what) + " needs a list of " + std::to_string(want) + " entries");
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(expr_text(e));
    return out;
}

int degree(Kind k) {
    switch (k) {
        case Kind::Form0: return 0;
        case Kind::Form1: return 1;
        case Kind::Form2: return 2;
        default: return -1;
    }
}

Kind form_of_degree(int p) { return p == 0 ? Kind::Form0 : p == 1 ? Kind::Form1 : p == 2 ? Kind::Form2 : Kind::Zero; }

std::string kname(Kind k) { return std::string(name_of(k)); }

/// Kind of a "with" operand without building it.
Kind operand_kind(const json& with, Kind self) {
    if (with.is_string()) {
        const auto s = with.get<std::string>();
        if (s == "self") return self;
        if (s == "hodge") return form_of_degree(2 - degree(self));
        bad("with must be an object, \"self\" or \"hodge\"");
    }
    if (!with.is_object() || !with.contains("kind")) bad("with must be an object, \"self\" or \"hodge\"");
    return kind_from_name(with.at("kind").get<std::string>());
}

std::size_t density_arg(const json& v, const Config& config) {
    const auto n = v.get<long long>();
    if (n < 2) bad("set_density: n must be at least 2");
    if (static_cast<std::size_t>(n) > config.max_grid) {
        bad("grid too large: at most " + std::to_string(config.max_grid) + " points per axis");
    }
    return static_cast<std::size_t>(n);
}

/// Output kind of one op; validates every argument it can without data.
Kind step(Kind in, const json& op, const Config& config) {
    const std::string name = op.at("op").get<std::string>();
    if (in == Kind::Zero) bad_kind(name + ": the object is identically zero (degree above 2); nothing to apply");
    if (op.contains("mode")) mode_from_name(op.at("mode").get<std::string>());

    if (name == "ext_d") {
        allow_keys(op, {"mode"});
        if (in == Kind::Form2) bad_kind("ext_d: exterior derivative of a top-degree form is zero (a 2-form on R^2 has no 3-form)");
        if (in == Kind::VectorField) bad_kind("ext_d: applies to forms; convert the vector field with covariant first");
        return form_of_degree(degree(in) + 1);
    }
    if (name == "interior_d") {
        allow_keys(op, {"mode", "v"});
        if (op.contains("v")) expr_list(op.at("v"), 2, "interior_d: v");
        if (in == Kind::Form0) bad_kind("interior_d: the interior derivative of a 0-form is zero");
        if (in == Kind::VectorField) bad_kind("interior_d: applies to forms, not vector fields");
        return form_of_degree(degree(in) - 1);
    }
    if (name == "hodge") {
        allow_keys(op, {"mode", "keep_object"});
        if (in == Kind::VectorField) bad_kind("hodge: applies to forms, not vector fields");
        if (op.value("keep_object", false) && in != Kind::Form1) {
            bad_kind("hodge: keep_object only applies to 1-forms");
        }
        return form_of_degree(2 - degree(in));
    }
    if (name == "wedge") {
        allow_keys(op, {"mode", "with"});
        if (!op.contains("with")) bad("wedge: missing argument 'with'");
        const Kind other = operand_kind(op.at("with"), in);
        if (in == Kind::VectorField || other == Kind::VectorField) bad_kind("wedge: applies to forms, not vector fields");
        if (other == Kind::Zero) bad_kind("wedge: operand is identically zero");
        return form_of_degree(degree(in) + degree(other));
    }
    if (name == "add") {
        allow_keys(op, {"mode", "with"});
        if (!op.contains("with")) bad("add: missing argument 'with'");
        const Kind other = operand_kind(op.at("with"), in);
        if (other != in) bad_kind("add: cannot add a " + kname(other) + " to a " + kname(in));
        return in;
    }
    if (name == "covariant" || name == "contravariant") {
        allow_keys(op, {"mode", "metric"});
        if (op.contains("metric")) expr_list(op.at("metric"), 4, (name + ": metric").c_str());
        if (name == "covariant") {
            if (in != Kind::VectorField) bad_kind("covariant: lowers the index of a vector field, got a " + kname(in));
            return Kind::Form1;
        }
        if (in != Kind::Form1) bad_kind("contravariant: raises the index of a 1-form, got a " + kname(in));
        return Kind::VectorField;
    }
    if (name == "scale") {
        allow_keys(op, {"mode", "factor"});
        const double f = op.at("factor").get<double>();
        if (!std::isfinite(f)) bad("scale: factor must be finite");
        return in;
    }
    if (name == "set_density") {
        allow_keys(op, {"n", "nx", "ny"});
        if (op.contains("n")) {
            density_arg(op.at("n"), config);
        } else {
            if (!op.contains("nx") || !op.contains("ny")) bad("set_density: needs n, or nx and ny");
            if (in != Kind::Form2) bad_kind("set_density: separate nx and ny apply to 2-forms");
            density_arg(op.at("nx"), config);
            density_arg(op.at("ny"), config);
        }
        return in;
    }
    if (name == "log_scale") {
        allow_keys(op, {});
        if (in == Kind::Form0) bad_kind("log_scale: log scaling applies to 1-forms, 2-forms and vector fields");
        return in;
    }
    if (name == "give_eqn") {
        allow_keys(op, {"exprs"});
        expr_list(op.at("exprs"), component_count(in), "give_eqn: exprs");
        return in;
    }
    bad("unknown op '" + name + "'");
}

Object operand(const json& with, const Object& self, Mode mode, const Config& config) {
    if (with.is_string()) {
        if (with.get<std::string>() == "self") return self;
        return hodge(self, mode);
    }
    Object other = object_from_json(with, config);
    if (!(grid_of(other) == grid_of(self))) bad("operand grid does not match the object's grid");
    return other;
}

Metric metric_of(const json& op) {
    if (!op.contains("metric")) return Metric::identity();
    const auto m = expr_list(op.at("metric"), 4, "metric");
    return Metric::from_strings(m[0], m[1], m[2], m[3]);
}

InsetSpec inset_from_json(const json& z) {
    if (!z.is_object()) bad("zoom must be a JSON object");
    InsetSpec s;
    for (const auto& [key, v] : z.items()) {
        if (key == "target") {
            if (!v.is_array() || v.size() != 2) bad("zoom: target must be [x, y]");
            s.zoom.target_x = v[0].get<double>();
            s.zoom.target_y = v[1].get<double>();
        } else if (key == "mag") {
            s.zoom.mag = v.get<double>();
        } else if (key == "dpd") {
            const auto d = v.get<long long>();
            if (d < 2) bad("zoom: dpd must be at least 2");
            s.zoom.dpd = static_cast<std::size_t>(d);
        } else if (key == "insize") {
            s.zoom.insize = v.get<double>();
        } else if (key == "inset") {
            s.zoom.inset = v.get<bool>();
        } else if (key == "mode") {
            const auto m = v.get<std::string>();
            if (m == "zoom") s.mode = InsetMode::Zoom;
            else if (m == "deriv") s.mode = InsetMode::Deriv;
            else if (m == "div") s.mode = InsetMode::Div;
            else if (m == "curl") s.mode = InsetMode::Curl;
            else bad("zoom: mode must be zoom, deriv, div or curl");
        } else {
            bad("zoom: unknown key '" + key + "'");
        }
    }
    if (!z.contains("target")) bad("zoom: missing target");
    s.zoom.validate();
    return s;
}

json scalar_from_text(const std::string& s) {
    double v = 0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec == std::errc() && p == end && !s.empty()) return v;
    if (s == "true") return true;
    if (s == "false") return false;
    return s;
}

}  // namespace

OutputFormat format_from_name(std::string_view name) {
    if (name == "svg") return OutputFormat::Svg;
    if (name == "scene-json") return OutputFormat::SceneJson;
    if (name == "values-json") return OutputFormat::ValuesJson;
    bad("unknown output format '" + std::string(name) + "' (expected svg, scene-json or values-json)");
}

JobSpec JobSpec::from_json(const json& j) {
    if (!j.is_object()) bad("job must be a JSON object");
    JobSpec job;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "object") job.object = v;
            else if (key == "chain") job.ops = v;
            else if (key == "style") job.style = style_from_json(v);
            else if (key == "zoom") job.inset = inset_from_json(v);
            else if (key == "format") job.format = format_from_name(v.get<std::string>());
            else bad("job: unknown key '" + key + "'");
        }
    } catch (const json::exception& e) {
        bad(std::string("job: ") + e.what());
    }
    if (job.object.is_null()) bad("job: missing object");
    if (!job.ops.is_array()) bad("job: chain must be a list of ops");
    return job;
}

std::vector<Kind> typecheck(Kind start, const json& ops, const Config& config) {
    if (!ops.is_array()) bad("chain must be a list of ops");
    std::vector<Kind> kinds{start};
    try {
        for (const auto& raw : ops) kinds.push_back(step(kinds.back(), normalise(raw), config));
    } catch (const json::exception& e) {
        bad(std::string("chain: ") + e.what());
    }
    return kinds;
}

Object apply_op(const Object& obj, const json& raw, const Config& config) {
    const json op = normalise(raw);
    try {
        step(kind_of(obj), op, config);
        const std::string name = op.at("op").get<std::string>();
        const Mode mode = mode_of(op);
        if (name == "ext_d") return ext_d(obj, mode);
        if (name == "interior_d") {
            if (!op.contains("v")) return interior_d(obj, std::nullopt, mode);
            const auto v = expr_list(op.at("v"), 2, "interior_d: v");
            return interior_d(obj, v[0], v[1], mode);
        }
        if (name == "hodge") {
            if (!op.value("keep_object", false)) return hodge(obj, mode);
            Object copy = obj;
            hodge_in_place(copy, mode);
            return copy;
        }
        if (name == "wedge") return wedge(obj, operand(op.at("with"), obj, mode, config), mode);
        if (name == "add") return add(obj, operand(op.at("with"), obj, mode, config), mode);
        if (name == "covariant") return covariant(std::get<VectorField>(obj), metric_of(op), mode);
        if (name == "contravariant") return contravariant(std::get<Form1>(obj), metric_of(op), mode);
        if (name == "scale") return scale(op.at("factor").get<double>(), obj, mode);
        if (name == "set_density") {
            if (op.contains("n")) return set_density(obj, density_arg(op.at("n"), config));
            return set_density2(obj, density_arg(op.at("nx"), config), density_arg(op.at("ny"), config));
        }
        if (name == "log_scale") return log_scale(obj);
        if (name == "give_eqn") {
            const auto e = expr_list(op.at("exprs"), component_count(kind_of(obj)), "give_eqn: exprs");
            return give_eqn(obj, e);
        }
    } catch (const json::exception& e) {
        bad(std::string("op: ") + e.what());
    }
    throw std::logic_error("apply_op: op passed the type check but has no implementation");
}

JobResult run_job(const JobSpec& job, const Config& config) {
    job.style.validate();
    // Kinds first: a bad chain is rejected before any grid is sampled.
    if (!job.object.is_object() || !job.object.contains("kind") || !job.object.at("kind").is_string()) {
        bad("object: missing kind");
    }
    auto kinds = typecheck(kind_from_name(job.object.at("kind").get<std::string>()), job.ops, config);
    JobResult r{object_from_json(job.object, config), std::move(kinds), {}, {}};
    if (job.inset && job.inset->mode != InsetMode::Zoom && r.kinds.back() != Kind::VectorField) {
        bad_kind("zoom: deriv, div and curl insets apply to vector fields, got a " + kname(r.kinds.back()));
    }
    for (const auto& op : job.ops) r.object = apply_op(r.object, op, config);

    r.scene = scene_of(r.object, job.style);
    if (!job.inset) return r;

    const ZoomSpec& zs = job.inset->zoom;
    if (zs.dpd > config.max_grid) bad("grid too large: at most " + std::to_string(config.max_grid) + " points per axis");
    Zoomed z = [&] {
        switch (job.inset->mode) {
            case InsetMode::Deriv: return deriv(std::get<VectorField>(r.object), zs);
            case InsetMode::Div: return div(std::get<VectorField>(r.object), zs);
            case InsetMode::Curl: return curl(std::get<VectorField>(r.object), zs);
            case InsetMode::Zoom: break;
        }
        return zoom(r.object, zs);
    }();
    r.warnings = std::move(z.warnings);
    const Scene child = scene_of(z.object, job.style);
    if (zs.inset) {
        r.scene = compose_inset(r.scene, child, zs.target_x, zs.target_y, zs.insize);
    } else {
        r.scene = child;
        r.object = std::move(z.object);
    }
    return r;
}

std::string render_output(const JobResult& result, OutputFormat format, const Config& config) {
    switch (format) {
        case OutputFormat::Svg: return render_svg(result.scene, SvgOptions{config.canvas});
        case OutputFormat::SceneJson: return to_json(result.scene).dump(1) + "\n";
        case OutputFormat::ValuesJson: {
            json kinds = json::array();
            for (Kind k : result.kinds) kinds.push_back(kname(k));
            return json{{"object", object_to_json(result.object)}, {"kinds", kinds}, {"warnings", result.warnings}}.dump() + "\n";
        }
    }
    return {};
}

json chain_from_cli(const std::string& chain) {
    json ops = json::array();
    std::size_t pos = 0;
    while (pos <= chain.size()) {
        const auto comma = std::min(chain.find(',', pos), chain.size());
        const std::string part = chain.substr(pos, comma - pos);
        pos = comma + 1;
        if (part.empty()) bad("--chain: empty op in '" + chain + "'");

        std::size_t colon = part.find(':');
        json op{{"op", part.substr(0, colon)}};
        while (colon != std::string::npos) {
            const auto next = part.find(':', colon + 1);
            const std::string kv = part.substr(colon + 1, next == std::string::npos ? std::string::npos : next - colon - 1);
            colon = next;
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) bad("--chain: expected key=value, got '" + kv + "'");
            const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
            if (val.find(';') != std::string::npos) {
                json list = json::array();
                std::size_t p = 0;
                while (p <= val.size()) {
                    const auto semi = std::min(val.find(';', p), val.size());
                    list.push_back(scalar_from_text(val.substr(p, semi - p)));
                    p = semi + 1;
                }
                op[key] = std::move(list);
            } else {
                op[key] = scalar_from_text(val);
            }
        }
        ops.push_back(std::move(op));
    }
    return ops;
}

}  // namespace dform
