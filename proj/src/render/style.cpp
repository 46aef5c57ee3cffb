#include <algorithm>
#include <cctype>
#include <cmath>

#include "dform/render.hpp"

namespace dform {
namespace {

// CSS Color Module Level 4 named colours.
constexpr std::string_view kNamedColors[] = {
    "aliceblue", "antiquewhite", "aqua", "aquamarine", "azure", "beige", "bisque", "black", "blanchedalmond",
    "blue", "blueviolet", "brown", "burlywood", "cadetblue", "chartreuse", "chocolate", "coral",
    "cornflowerblue", "cornsilk", "crimson", "cyan", "darkblue", "darkcyan", "darkgoldenrod", "darkgray",
    "darkgreen", "darkgrey", "darkkhaki", "darkmagenta", "darkolivegreen", "darkorange", "darkorchid",
    "darkred", "darksalmon", "darkseagreen", "darkslateblue", "darkslategray", "darkslategrey",
    "darkturquoise", "darkviolet", "deeppink", "deepskyblue", "dimgray", "dimgrey", "dodgerblue",
    "firebrick", "floralwhite", "forestgreen", "fuchsia", "gainsboro", "ghostwhite", "gold", "goldenrod",
    "gray", "green", "greenyellow", "grey", "honeydew", "hotpink", "indianred", "indigo", "ivory", "khaki",
    "lavender", "lavenderblush", "lawngreen", "lemonchiffon", "lightblue", "lightcoral", "lightcyan",
    "lightgoldenrodyellow", "lightgray", "lightgreen", "lightgrey", "lightpink", "lightsalmon",
    "lightseagreen", "lightskyblue", "lightslategray", "lightslategrey", "lightsteelblue", "lightyellow",
    "lime", "limegreen", "linen", "magenta", "maroon", "mediumaquamarine", "mediumblue", "mediumorchid",
    "mediumpurple", "mediumseagreen", "mediumslateblue", "mediumspringgreen", "mediumturquoise",
    "mediumvioletred", "midnightblue", "mintcream", "mistyrose", "moccasin", "navajowhite", "navy",
    "oldlace", "olive", "olivedrab", "orange", "orangered", "orchid", "palegoldenrod", "palegreen",
    "paleturquoise", "palevioletred", "papayawhip", "peachpuff", "peru", "pink", "plum", "powderblue",
    "purple", "rebeccapurple", "red", "rosybrown", "royalblue", "saddlebrown", "salmon", "sandybrown",
    "seagreen", "seashell", "sienna", "silver", "skyblue", "slateblue", "slategray", "slategrey", "snow",
    "springgreen", "steelblue", "tan", "teal", "thistle", "tomato", "turquoise", "violet", "wheat", "white",
    "whitesmoke", "yellow", "yellowgreen",
};

void check_fraction(double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) throw Error(std::string("style: ") + name + " must lie in (0, 1]");
}

}  // namespace

bool is_color(std::string_view s) {
    if (s.size() == 7 && s[0] == '#') {
        return std::all_of(s.begin() + 1, s.end(), [](unsigned char c) { return std::isxdigit(c) != 0; });
    }
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    return std::find(std::begin(kNamedColors), std::end(kNamedColors), lower) != std::end(kNamedColors);
}

void PlotStyle::validate() const {
    if (!is_color(color)) throw Error("style: '" + color + "' is not a CSS colour name or #RRGGBB");
    for (const auto& c : palette) {
        if (!is_color(c)) throw Error("style: palette entry '" + c + "' is not a CSS colour name or #RRGGBB");
    }
    check_fraction(head_width, "head_width");
    check_fraction(head_height, "head_height");
    check_fraction(sheet_size, "sheet_size");
    if (max_sheets < 1) throw Error("style: max_sheets must be a positive integer");
    if (!(surround_space >= 1.0) || !std::isfinite(surround_space)) throw Error("style: surround_space must be >= 1");
    if (font_size < 1) throw Error("style: font_size must be a positive integer");
    if (levels.values.empty()) {
        if (levels.count < 1) throw Error("style: levels must be a positive integer or an ascending list");
    } else {
        for (std::size_t k = 0; k < levels.values.size(); ++k) {
            if (!std::isfinite(levels.values[k]) || (k > 0 && !(levels.values[k - 1] < levels.values[k]))) {
                throw Error("style: level values must be finite and strictly ascending");
            }
        }
    }
}

PlotStyle style_from_json(const nlohmann::json& j, PlotStyle s) {
    if (!j.is_object()) throw Error("style must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "color") s.color = v.get<std::string>();
            else if (key == "arrowheads") s.arrowheads = v.get<bool>();
            else if (key == "head_width") s.head_width = v.get<double>();
            else if (key == "head_height") s.head_height = v.get<double>();
            else if (key == "log_scaling") s.log_scaling = v.get<bool>();
            else if (key == "max_sheets") s.max_sheets = v.get<int>();
            else if (key == "sheet_size") s.sheet_size = v.get<double>();
            else if (key == "surround_space") s.surround_space = v.get<double>();
            else if (key == "labels") s.labels = v.get<bool>();
            else if (key == "font_size") s.font_size = v.get<int>();
            else if (key == "palette") {
                const auto p = v.get<std::vector<std::string>>();
                if (p.size() != 3) throw Error("style: palette needs exactly 3 colours [ccw, cw, zero]");
                std::copy(p.begin(), p.end(), s.palette.begin());
            } else if (key == "levels") {
                if (v.is_array()) {
                    s.levels.values = v.get<std::vector<double>>();
                } else {
                    s.levels.count = v.get<int>();
                    s.levels.values.clear();
                }
            } else {
                throw Error("style: unknown key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("style: ") + e.what());
    }
    s.validate();
    return s;
}

nlohmann::json to_json(const PlotStyle& s) {
    nlohmann::json j;
    j["color"] = s.color;
    j["arrowheads"] = s.arrowheads;
    j["head_width"] = s.head_width;
    j["head_height"] = s.head_height;
    j["log_scaling"] = s.log_scaling;
    j["max_sheets"] = s.max_sheets;
    j["sheet_size"] = s.sheet_size;
    j["surround_space"] = s.surround_space;
    j["palette"] = s.palette;
    if (s.levels.values.empty()) j["levels"] = s.levels.count;
    else j["levels"] = s.levels.values;
    j["labels"] = s.labels;
    j["font_size"] = s.font_size;
    return j;
}

}  // namespace dform
