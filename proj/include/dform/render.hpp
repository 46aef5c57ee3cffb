#pragma once

#include <array>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dform/calculus.hpp"
#include "json.hpp"

namespace dform {

/// Contour levels: `count` levels uniformly spaced strictly between the
/// finite min and max, or explicit ascending `values` when non-empty.
struct Levels {
    int count = 15;
    std::vector<double> values;
};

struct PlotStyle {
    std::string color = "black";
    bool arrowheads = true;
    double head_width = 0.3;   ///< arrowhead base, fraction of stack length
    double head_height = 0.2;  ///< arrowhead height, fraction of stack length
    bool log_scaling = false;
    int max_sheets = 5;
    double sheet_size = 0.05;  ///< stack length, fraction of plot width
    double surround_space = 10;  ///< margin = canvas / surround_space
    std::array<std::string, 3> palette{"red", "blue", "grey"};  ///< ccw, cw, zero
    Levels levels;
    bool labels = false;
    int font_size = 10;

    /// Throws Error on an invalid field.
    void validate() const;
};

/// CSS colour name or #RRGGBB.
bool is_color(std::string_view s);

PlotStyle style_from_json(const nlohmann::json& j, PlotStyle base = {});
nlohmann::json to_json(const PlotStyle& style);

struct Scene;

/// 1-form stack at a grid point. `angle` is the direction of (a1, a2);
/// sheets run perpendicular to it.
struct Stack {
    double x = 0, y = 0;
    double angle = 0;
    int n = 0;
    double len = 0;
    bool head = false;
    double head_width = 0;
    double head_height = 0;
    std::string color;
};

struct Arrow {
    double x = 0, y = 0;
    double angle = 0;
    double len = 0;
    bool head = true;
    std::string color;
};

/// n nested concentric squares; the outermost has side `cell`.
struct Block {
    double x = 0, y = 0;
    int n = 0;
    double cell = 0;
    std::string color;
};

struct Polyline {
    std::vector<std::array<double, 2>> pts;
    double level = 0;
    std::string label;  ///< empty when labels are off
    std::string color;
};

struct Marker {
    double x = 0, y = 0;
    PointKind kind = PointKind::Undefined;
};

struct Inset {
    double anchor_x = 0, anchor_y = 0;
    double size = 0.3;
    std::shared_ptr<const Scene> scene;
};

using Primitive = std::variant<Stack, Arrow, Block, Polyline, Marker, Inset>;

struct Scene {
    double x0 = -1, x1 = 1;
    double y0 = -1, y1 = 1;
    double surround_space = 10;
    int font_size = 10;
    std::vector<Primitive> primitives;
};

/// Largest magnitude over non-masked points: |(a1, a2)|, |(u, v)| or |w|.
/// Zero when every point is masked or zero.
double max_magnitude(const Object& obj);

/// Sheet or square count for magnitude m: ceil(max_sheets * m / m_max).
int bucket(double m, double m_max, int max_sheets);

Scene scene_form0(const Form0& form, const PlotStyle& style = {});
Scene scene_form1(const Form1& form, const PlotStyle& style = {});
Scene scene_form2(const Form2& form, const PlotStyle& style = {});
Scene scene_vf(const VectorField& vf, const PlotStyle& style = {});
/// Dispatch on kind. An identically-zero form gives an empty scene.
Scene scene_of(const Object& obj, const PlotStyle& style = {});

/// Contour segments joined into polylines, one entry per level crossing
/// component. Cells touching a masked point are skipped.
std::vector<Polyline> contours(const ScalarField& f, double level);
/// The levels a Levels spec selects for `f`.
std::vector<double> contour_levels(const ScalarField& f, const Levels& levels);

/// Embed `child` at `anchor` with side insize x parent side. Throws Error
/// when the anchor is outside the parent viewport.
Scene compose_inset(const Scene& parent, const Scene& child, double anchor_x, double anchor_y, double insize);

struct SvgOptions {
    int canvas = 800;
};

/// Deterministic SVG 1.1: identical scenes give identical bytes.
std::string render_svg(const Scene& scene, const SvgOptions& options = {});

nlohmann::json to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);

}  // namespace dform
