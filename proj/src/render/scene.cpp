#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "dform/render.hpp"
#include "number_format.hpp"

namespace dform {
namespace {

Scene empty_scene(const Grid2& g, const PlotStyle& style) {
    Scene s;
    s.x0 = g.x().min;
    s.x1 = g.x().max;
    s.y0 = g.y().min;
    s.y1 = g.y().max;
    s.surround_space = style.surround_space;
    s.font_size = style.font_size;
    return s;
}

double min_spacing(const Grid2& g) { return std::min(g.x().spacing(), g.y().spacing()); }

PointKind worst(const ScalarField& a, const ScalarField& b, std::size_t k) {
    if (a.kind(k) == PointKind::Undefined || b.kind(k) == PointKind::Undefined) return PointKind::Undefined;
    return PointKind::Infinite;
}

}  // namespace

double max_magnitude(const Object& obj) {
    double m = 0.0;
    auto pair_max = [&](const ScalarField& a, const ScalarField& b) {
        for (std::size_t k = 0; k < a.grid().size(); ++k) {
            if (!a.masked(k) && !b.masked(k)) m = std::max(m, std::hypot(a[k], b[k]));
        }
    };
    auto single_max = [&](const ScalarField& a) {
        for (std::size_t k = 0; k < a.grid().size(); ++k) {
            if (!a.masked(k)) m = std::max(m, std::fabs(a[k]));
        }
    };
    switch (kind_of(obj)) {
        case Kind::Form0: single_max(std::get<Form0>(obj).phi); break;
        case Kind::Form1: pair_max(std::get<Form1>(obj).dx(), std::get<Form1>(obj).dy()); break;
        case Kind::Form2: single_max(std::get<Form2>(obj).w); break;
        case Kind::VectorField: pair_max(std::get<VectorField>(obj).u(), std::get<VectorField>(obj).v()); break;
        case Kind::Zero: break;
    }
    return m;
}

int bucket(double m, double m_max, int max_sheets) {
    if (!(m > 0.0) || !(m_max > 0.0)) return 0;
    const double r = max_sheets * (m / m_max);
    // A few ulps of slack so that values landing on an integer boundary
    // do not flip under a rescaling of the whole field.
    const double n = std::ceil(r - 1e-9 * std::max(1.0, r));
    return static_cast<int>(std::clamp(n, 1.0, static_cast<double>(max_sheets)));
}

Scene scene_form1(const Form1& form_in, const PlotStyle& style) {
    style.validate();
    const Form1 form = style.log_scaling ? std::get<Form1>(log_scale(form_in)) : form_in;
    const Grid2& g = form.grid();
    Scene s = empty_scene(g, style);
    const double m_max = max_magnitude(form);
    const double len = style.sheet_size * (g.x().max - g.x().min);
    const auto& a = form.dx();
    const auto& b = form.dy();
    for (std::size_t i = 0; i < g.nx(); ++i) {
        for (std::size_t j = 0; j < g.ny(); ++j) {
            const std::size_t k = g.index(i, j);
            if (a.masked(k) || b.masked(k)) {
                s.primitives.push_back(Marker{g.x_at(i), g.y_at(j), worst(a, b, k)});
                continue;
            }
            Stack st;
            st.x = g.x_at(i);
            st.y = g.y_at(j);
            st.angle = std::atan2(b[k], a[k]);
            st.n = bucket(std::hypot(a[k], b[k]), m_max, style.max_sheets);
            st.len = len;
            st.head = style.arrowheads && st.n > 0;
            st.head_width = style.head_width;
            st.head_height = style.head_height;
            st.color = style.color;
            s.primitives.push_back(std::move(st));
        }
    }
    return s;
}

Scene scene_vf(const VectorField& vf_in, const PlotStyle& style) {
    style.validate();
    const VectorField vf = style.log_scaling ? std::get<VectorField>(log_scale(vf_in)) : vf_in;
    const Grid2& g = vf.grid();
    Scene s = empty_scene(g, style);
    const double m_max = max_magnitude(vf);
    const double longest = 0.9 * min_spacing(g);
    const auto& u = vf.u();
    const auto& v = vf.v();
    for (std::size_t i = 0; i < g.nx(); ++i) {
        for (std::size_t j = 0; j < g.ny(); ++j) {
            const std::size_t k = g.index(i, j);
            if (u.masked(k) || v.masked(k)) {
                s.primitives.push_back(Marker{g.x_at(i), g.y_at(j), worst(u, v, k)});
                continue;
            }
            const double m = std::hypot(u[k], v[k]);
            Arrow ar;
            ar.x = g.x_at(i);
            ar.y = g.y_at(j);
            ar.angle = std::atan2(v[k], u[k]);
            ar.len = m_max > 0 ? longest * (m / m_max) : 0.0;
            ar.head = style.arrowheads;
            ar.color = style.color;
            s.primitives.push_back(std::move(ar));
        }
    }
    return s;
}

Scene scene_form2(const Form2& form_in, const PlotStyle& style) {
    style.validate();
    const Form2 form = style.log_scaling ? std::get<Form2>(log_scale(form_in)) : form_in;
    const auto& w = form.w;
    const Grid2& g = w.grid();
    Scene s = empty_scene(g, style);
    const double w_max = max_magnitude(form);
    const double cell = 0.9 * min_spacing(g);
    for (std::size_t i = 0; i < g.nx(); ++i) {
        for (std::size_t j = 0; j < g.ny(); ++j) {
            const std::size_t k = g.index(i, j);
            if (w.masked(k)) {
                s.primitives.push_back(Marker{g.x_at(i), g.y_at(j), w.kind(k)});
                continue;
            }
            Block bl;
            bl.x = g.x_at(i);
            bl.y = g.y_at(j);
            bl.n = bucket(std::fabs(w[k]), w_max, style.max_sheets);
            // Outer square shrinks with the count; a zero weight keeps one
            // small square so the cell is visibly zero rather than empty.
            bl.cell = cell * std::max(bl.n, 1) / style.max_sheets;
            bl.color = w[k] > 0 ? style.palette[0] : w[k] < 0 ? style.palette[1] : style.palette[2];
            s.primitives.push_back(std::move(bl));
        }
    }
    return s;
}

std::vector<double> contour_levels(const ScalarField& f, const Levels& levels) {
    if (!levels.values.empty()) return levels.values;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = 0; k < f.grid().size(); ++k) {
        if (f.masked(k)) continue;
        lo = std::min(lo, f[k]);
        hi = std::max(hi, f[k]);
    }
    std::vector<double> out;
    if (!(lo < hi)) return out;
    for (int l = 1; l <= levels.count; ++l) out.push_back(lo + (hi - lo) * l / (levels.count + 1));
    return out;
}

std::vector<Polyline> contours(const ScalarField& f, double level) {
    const Grid2& g = f.grid();
    const std::size_t ny = g.ny();
    // Edge ids: 2*(i*ny + j) for the x-edge (i,j)-(i+1,j), +1 for the
    // y-edge (i,j)-(i,j+1).
    auto h_edge = [&](std::size_t i, std::size_t j) { return 2 * (i * ny + j); };
    auto v_edge = [&](std::size_t i, std::size_t j) { return 2 * (i * ny + j) + 1; };
    auto crossing = [&](std::size_t edge) -> std::array<double, 2> {
        const std::size_t node = edge / 2;
        const std::size_t i = node / ny;
        const std::size_t j = node % ny;
        const bool horizontal = edge % 2 == 0;
        const std::size_t i2 = horizontal ? i + 1 : i;
        const std::size_t j2 = horizontal ? j : j + 1;
        const double a = f.at(i, j);
        const double b = f.at(i2, j2);
        const double t = (level - a) / (b - a);
        return {g.x_at(i) + t * (g.x_at(i2) - g.x_at(i)), g.y_at(j) + t * (g.y_at(j2) - g.y_at(j))};
    };

    // Segments run from one edge crossing to the next with the region above
    // the level on their left, so joined polylines have a consistent winding.
    std::vector<std::array<std::size_t, 2>> segs;
    for (std::size_t i = 0; i + 1 < g.nx(); ++i) {
        for (std::size_t j = 0; j + 1 < ny; ++j) {
            // Corners counter-clockwise from the lower left; edge c joins
            // corner c to corner c + 1.
            const std::size_t idx[4] = {g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)};
            if (f.masked(idx[0]) || f.masked(idx[1]) || f.masked(idx[2]) || f.masked(idx[3])) continue;
            const std::size_t edges[4] = {h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)};
            bool above[4];
            int code = 0;
            for (int c = 0; c < 4; ++c) {
                above[c] = f[idx[c]] > level;
                code |= above[c] << c;
            }
            if (code == 0 || code == 15) continue;
            auto isolate = [&](int c) {
                const std::size_t before = edges[(c + 3) % 4];
                if (above[c]) segs.push_back({edges[c], before});
                else segs.push_back({before, edges[c]});
            };
            if (code == 5 || code == 10) {
                // Saddle: the centre value decides which diagonal pair is
                // connected.
                const double centre = 0.25 * (f[idx[0]] + f[idx[1]] + f[idx[2]] + f[idx[3]]);
                const int first = (code == 5) != (centre > level) ? 0 : 1;
                isolate(first);
                isolate(first + 2);
                continue;
            }
            std::size_t from = 0, to = 0;
            for (int e = 0; e < 4; ++e) {
                const bool next = above[(e + 1) % 4];
                if (above[e] && !next) from = edges[e];
                if (!above[e] && next) to = edges[e];
            }
            segs.push_back({from, to});
        }
    }

    std::unordered_map<std::size_t, std::size_t> starting_at;
    std::unordered_map<std::size_t, std::size_t> ending_at;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        starting_at[segs[s][0]] = s;
        ending_at[segs[s][1]] = s;
    }
    std::vector<bool> used(segs.size(), false);
    std::vector<Polyline> out;
    auto walk = [&](std::size_t seg) {
        Polyline line;
        line.level = level;
        line.pts.push_back(crossing(segs[seg][0]));
        for (;;) {
            used[seg] = true;
            line.pts.push_back(crossing(segs[seg][1]));
            const auto next = starting_at.find(segs[seg][1]);
            if (next == starting_at.end() || used[next->second]) break;
            seg = next->second;
        }
        out.push_back(std::move(line));
    };
    // Open chains first: they start where no segment ends.
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (!used[s] && !ending_at.count(segs[s][0])) walk(s);
    }
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (!used[s]) walk(s);
    }
    return out;
}

Scene scene_form0(const Form0& form, const PlotStyle& style) {
    style.validate();
    const auto& f = form.phi;
    const Grid2& g = f.grid();
    Scene s = empty_scene(g, style);
    for (double level : contour_levels(f, style.levels)) {
        for (auto& line : contours(f, level)) {
            line.color = style.color;
            if (style.labels) line.label = format_number(level);
            s.primitives.push_back(std::move(line));
        }
    }
    for (std::size_t i = 0; i < g.nx(); ++i) {
        for (std::size_t j = 0; j < g.ny(); ++j) {
            const std::size_t k = g.index(i, j);
            if (f.masked(k)) s.primitives.push_back(Marker{g.x_at(i), g.y_at(j), f.kind(k)});
        }
    }
    return s;
}

Scene scene_of(const Object& obj, const PlotStyle& style) {
    switch (kind_of(obj)) {
        case Kind::Form0: return scene_form0(std::get<Form0>(obj), style);
        case Kind::Form1: return scene_form1(std::get<Form1>(obj), style);
        case Kind::Form2: return scene_form2(std::get<Form2>(obj), style);
        case Kind::VectorField: return scene_vf(std::get<VectorField>(obj), style);
        case Kind::Zero: break;
    }
    style.validate();
    return empty_scene(grid_of(obj), style);
}

Scene compose_inset(const Scene& parent, const Scene& child, double anchor_x, double anchor_y, double insize) {
    if (!(anchor_x >= parent.x0 && anchor_x <= parent.x1 && anchor_y >= parent.y0 && anchor_y <= parent.y1)) {
        throw Error("inset anchor (" + format_number(anchor_x) + ", " + format_number(anchor_y) +
                    ") lies outside the parent viewport");
    }
    if (!(insize > 0.0 && insize <= 1.0)) throw Error("inset size must lie in (0, 1]");
    Scene out = parent;
    out.primitives.push_back(Inset{anchor_x, anchor_y, insize, std::make_shared<const Scene>(child)});
    return out;
}

}  // namespace dform
