#include <cmath>
#include <cstdlib>
#include <fstream>

#include "dform/app.hpp"

namespace dform {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(what); }

Axis read_axis(const json& j, const char* name) {
    if (j.is_object()) {
        for (const auto& [key, _] : j.items()) {
            if (key != "min" && key != "max" && key != "n") bad(std::string("grid.") + name + ": unknown key '" + key + "'");
        }
        const auto n = j.at("n").get<long long>();
        if (n < 2) bad(std::string("grid.") + name + ".n must be at least 2");
        return Axis{j.at("min").get<double>(), j.at("max").get<double>(), static_cast<std::size_t>(n)};
    }
    if (j.is_array()) {
        // Explicit coordinates.
        const auto c = j.get<std::vector<double>>();
        if (c.size() < 2) bad(std::string("grid.") + name + " needs at least 2 coordinates");
        const std::vector<double> other{0.0, 1.0};
        return Grid2::from_coordinates(c, other).x();
    }
    bad(std::string("grid.") + name + " must be {min, max, n} or a coordinate list");
}

}  // namespace

Config Config::from_json(const json& j, Config c) {
    if (!j.is_object()) bad("config must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "threshold") c.threshold = v.get<double>();
            else if (key == "canvas") c.canvas = v.get<int>();
            else if (key == "max_grid") c.max_grid = v.get<std::size_t>();
            else if (key == "port") c.port = v.get<int>();
            else if (key == "bind") c.bind = v.get<std::string>();
            else if (key == "body_limit") c.body_limit = v.get<std::size_t>();
            else bad("config: unknown key '" + key + "'");
        }
    } catch (const json::exception& e) {
        bad(std::string("config: ") + e.what());
    }
    if (!(c.threshold > 0)) bad("config: threshold must be positive");
    if (c.canvas < 16) bad("config: canvas must be at least 16 pixels");
    if (c.max_grid < 2) bad("config: max_grid must be at least 2");
    return c;
}

Config Config::load() {
    const char* path = std::getenv("DFORM_CONFIG");
    if (!path || !*path) return {};
    std::ifstream in(path);
    if (!in) bad(std::string("cannot read config file ") + path);
    try {
        return from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        bad(std::string("config file ") + path + ": " + e.what());
    }
}

Object object_from_json(const json& j, const Config& config) {
    try {
        if (!j.is_object()) bad("object must be a JSON object");
        for (const auto& [key, _] : j.items()) {
            if (key != "kind" && key != "grid" && key != "components") bad("object: unknown key '" + key + "'");
        }
        const Kind kind = kind_from_name(j.at("kind").get<std::string>());
        const json& gj = j.at("grid");
        const Axis ax = read_axis(gj.at("x"), "x");
        const Axis ay = gj.contains("y") ? read_axis(gj.at("y"), "y") : ax;
        if (ax.n > config.max_grid || ay.n > config.max_grid) {
            bad("grid too large: at most " + std::to_string(config.max_grid) + " points per axis");
        }
        const Grid2 grid(ax, ay);

        std::vector<ComponentSpec> specs;
        for (const auto& c : j.at("components")) {
            ComponentSpec spec;
            for (const auto& [key, v] : c.items()) {
                if (key == "expr") {
                    spec.expr = v.is_number() ? v.dump() : v.get<std::string>();
                } else if (key == "values") {
                    std::vector<double> vals;
                    for (const auto& x : v) vals.push_back(x.is_null() ? std::nan("") : x.get<double>());
                    if (vals.size() != grid.size()) {
                        bad("component values: expected " + std::to_string(grid.size()) + " row-major numbers, got " +
                            std::to_string(vals.size()));
                    }
                    spec.values = std::move(vals);
                } else {
                    bad("component: unknown key '" + key + "'");
                }
            }
            specs.push_back(std::move(spec));
        }
        return make_field(kind, grid, specs, config.threshold);
    } catch (const json::exception& e) {
        bad(std::string("object: ") + e.what());
    }
}

json grid_to_json(const Grid2& g) {
    return {{"x", {{"min", g.x().min}, {"max", g.x().max}, {"n", g.nx()}}},
            {"y", {{"min", g.y().min}, {"max", g.y().max}, {"n", g.ny()}}}};
}

json object_to_json(const Object& obj) {
    json j;
    j["kind"] = std::string(name_of(kind_of(obj)));
    const Grid2& g = grid_of(obj);
    j["grid"] = grid_to_json(g);
    if (kind_of(obj) == Kind::Zero) {
        j["degree"] = std::get<ZeroForm>(obj).degree;
        j["components"] = json::array();
        j["mask"] = json::array();
        return j;
    }
    json comps = json::array();
    json mask = json::array();
    std::vector<PointKind> worst(g.size(), PointKind::Finite);
    for (const auto* c : components(obj)) {
        json cj;
        if (c->expr()) cj["expr"] = to_string(*c->expr());
        json vals = json::array();
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double v = (*c)[k];
            if (std::isfinite(v)) vals.push_back(v);
            else vals.push_back(nullptr);
            if (c->kind(k) == PointKind::Undefined || (c->kind(k) == PointKind::Infinite && worst[k] == PointKind::Finite)) {
                worst[k] = c->kind(k);
            }
        }
        cj["values"] = std::move(vals);
        comps.push_back(std::move(cj));
    }
    for (std::size_t i = 0; i < g.nx(); ++i) {
        for (std::size_t j2 = 0; j2 < g.ny(); ++j2) {
            const PointKind k = worst[g.index(i, j2)];
            if (k != PointKind::Finite) mask.push_back({{"i", i}, {"j", j2}, {"kind", std::string(name_of(k))}});
        }
    }
    j["components"] = std::move(comps);
    j["mask"] = std::move(mask);
    return j;
}

json expr_to_json(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Constant:
            if (e.is_named()) return {{"type", "constant"}, {"name", std::string(e.constant_name())}, {"value", e.value()}};
            return {{"type", "number"}, {"value", e.value()}};
        case Expr::Kind::Variable:
            return {{"type", "variable"}, {"name", std::string(name_of(e.var()))}};
        case Expr::Kind::Unary:
            return {{"type", "call"}, {"func", std::string(name_of(e.func()))}, {"arg", expr_to_json(e.arg())}};
        case Expr::Kind::Binary: {
            static constexpr const char* kOps[] = {"+", "-", "*", "/", "^"};
            return {{"type", "binary"},
                    {"op", kOps[static_cast<int>(e.op())]},
                    {"lhs", expr_to_json(e.lhs())},
                    {"rhs", expr_to_json(e.rhs())}};
        }
    }
    return nullptr;
}

}  // namespace dform
