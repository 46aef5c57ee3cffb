#include "dform/render.hpp"

namespace dform {

using nlohmann::json;

namespace {

json point(double x, double y) { return json::array({x, y}); }

struct PrimitiveJson {
    json operator()(const Stack& s) const {
        return {{"t", "stack"}, {"p", point(s.x, s.y)}, {"angle", s.angle}, {"n", s.n},       {"len", s.len},
                {"head", s.head}, {"hw", s.head_width}, {"hh", s.head_height}, {"color", s.color}};
    }
    json operator()(const Arrow& a) const {
        return {{"t", "arrow"}, {"p", point(a.x, a.y)}, {"angle", a.angle}, {"len", a.len}, {"head", a.head},
                {"color", a.color}};
    }
    json operator()(const Block& b) const {
        return {{"t", "block"}, {"p", point(b.x, b.y)}, {"n", b.n}, {"cell", b.cell}, {"color", b.color}};
    }
    json operator()(const Polyline& p) const {
        json pts = json::array();
        for (const auto& q : p.pts) pts.push_back(point(q[0], q[1]));
        json j = {{"t", "poly"}, {"pts", pts}, {"level", p.level}, {"color", p.color}};
        if (!p.label.empty()) j["label"] = p.label;
        return j;
    }
    json operator()(const Marker& m) const {
        return {{"t", "marker"}, {"p", point(m.x, m.y)}, {"kind", std::string(name_of(m.kind))}};
    }
    json operator()(const Inset& i) const {
        return {{"t", "inset"}, {"anchor", point(i.anchor_x, i.anchor_y)}, {"size", i.size}, {"scene", to_json(*i.scene)}};
    }
};

std::array<double, 2> read_point(const json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 2) throw Error("scene: points need two coordinates");
    return {v[0], v[1]};
}

Primitive read_primitive(const json& j) {
    const std::string t = j.at("t").get<std::string>();
    if (t == "stack") {
        Stack s;
        const auto p = read_point(j.at("p"));
        s.x = p[0];
        s.y = p[1];
        s.angle = j.at("angle").get<double>();
        s.n = j.at("n").get<int>();
        s.len = j.at("len").get<double>();
        s.head = j.value("head", false);
        s.head_width = j.value("hw", 0.3);
        s.head_height = j.value("hh", 0.2);
        s.color = j.at("color").get<std::string>();
        return s;
    }
    if (t == "arrow") {
        Arrow a;
        const auto p = read_point(j.at("p"));
        a.x = p[0];
        a.y = p[1];
        a.angle = j.at("angle").get<double>();
        a.len = j.at("len").get<double>();
        a.head = j.value("head", true);
        a.color = j.at("color").get<std::string>();
        return a;
    }
    if (t == "block") {
        Block b;
        const auto p = read_point(j.at("p"));
        b.x = p[0];
        b.y = p[1];
        b.n = j.at("n").get<int>();
        b.cell = j.at("cell").get<double>();
        b.color = j.at("color").get<std::string>();
        return b;
    }
    if (t == "poly") {
        Polyline pl;
        for (const auto& q : j.at("pts")) pl.pts.push_back(read_point(q));
        pl.level = j.value("level", 0.0);
        pl.label = j.value("label", std::string());
        pl.color = j.value("color", std::string("black"));
        return pl;
    }
    if (t == "marker") {
        Marker m;
        const auto p = read_point(j.at("p"));
        m.x = p[0];
        m.y = p[1];
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "infinite") m.kind = PointKind::Infinite;
        else if (kind == "undefined") m.kind = PointKind::Undefined;
        else throw Error("scene: marker kind must be 'infinite' or 'undefined'");
        return m;
    }
    if (t == "inset") {
        Inset i;
        const auto a = read_point(j.at("anchor"));
        i.anchor_x = a[0];
        i.anchor_y = a[1];
        i.size = j.at("size").get<double>();
        i.scene = std::make_shared<const Scene>(scene_from_json(j.at("scene")));
        return i;
    }
    throw Error("scene: unknown primitive type '" + t + "'");
}

}  // namespace

json to_json(const Scene& scene) {
    json prims = json::array();
    for (const auto& p : scene.primitives) prims.push_back(std::visit(PrimitiveJson{}, p));
    return {{"viewport", {{"x", json::array({scene.x0, scene.x1})}, {"y", json::array({scene.y0, scene.y1})}}},
            {"surround_space", scene.surround_space},
            {"font_size", scene.font_size},
            {"primitives", prims}};
}

Scene scene_from_json(const json& j) {
    try {
        Scene s;
        const auto x = read_point(j.at("viewport").at("x"));
        const auto y = read_point(j.at("viewport").at("y"));
        s.x0 = x[0];
        s.x1 = x[1];
        s.y0 = y[0];
        s.y1 = y[1];
        if (!(s.x0 < s.x1 && s.y0 < s.y1)) throw Error("scene: viewport extents must be increasing");
        s.surround_space = j.value("surround_space", 10.0);
        s.font_size = j.value("font_size", 10);
        for (const auto& p : j.at("primitives")) s.primitives.push_back(read_primitive(p));
        return s;
    } catch (const json::exception& e) {
        throw Error(std::string("scene: ") + e.what());
    }
}

}  // namespace dform
