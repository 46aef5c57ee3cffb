#include <algorithm>
#include <cmath>
#include <sstream>

#include "dform/render.hpp"
#include "number_format.hpp"

namespace dform {
namespace {

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Plot units to pixels for one drawing area.
struct Frame {
    double left, top, side;
    double x0, x1, y0, y1;

    double px(double x) const { return left + (x - x0) / (x1 - x0) * side; }
    double py(double y) const { return top + (y1 - y) / (y1 - y0) * side; }
    std::string pt(double x, double y) const { return format_number(px(x)) + "," + format_number(py(y)); }
};

class Writer {
public:
    explicit Writer(std::ostringstream& out) : out_(out) {}

    void body(const Scene& scene, const Frame& f, bool ticks) {
        out_ << "<rect x=\"" << n(f.left) << "\" y=\"" << n(f.top) << "\" width=\"" << n(f.side) << "\" height=\""
             << n(f.side) << "\" fill=\"white\" stroke=\"black\" stroke-width=\"1\"/>\n";
        if (ticks) axis_ticks(scene, f);
        group<Stack>(scene, "stacks", "fill=\"none\" stroke-width=\"1\"", [&](const Stack& s) { stack(s, f); });
        group<Arrow>(scene, "arrows", "stroke-width=\"1\"", [&](const Arrow& a) { arrow(a, f); });
        group<Block>(scene, "blocks", "fill=\"none\" stroke-width=\"1\"", [&](const Block& b) { block(b, f); });
        group<Polyline>(scene, "contours", "fill=\"none\" stroke-width=\"1\"",
                        [&](const Polyline& p) { polyline(p, f, scene.font_size); });
        group<Marker>(scene, "markers", "stroke=\"none\"", [&](const Marker& m) { marker(m, f); });
        group<Inset>(scene, "insets", "", [&](const Inset& i) { inset(i, f); });
    }

private:
    static std::string n(double v) { return format_number(v); }

    template <class T, class Fn>
    void group(const Scene& scene, const char* id, const char* attrs, Fn fn) {
        bool open = false;
        for (const auto& p : scene.primitives) {
            const T* t = std::get_if<T>(&p);
            if (!t) continue;
            if (!open) {
                out_ << "<g class=\"" << id << "\"" << (*attrs ? " " : "") << attrs << ">\n";
                open = true;
            }
            fn(*t);
        }
        if (open) out_ << "</g>\n";
    }

    void axis_ticks(const Scene& s, const Frame& f) {
        out_ << "<g class=\"axes\" font-family=\"sans-serif\" font-size=\"" << s.font_size
             << "\" fill=\"black\" stroke=\"black\" stroke-width=\"1\">\n";
        for (int k = 0; k <= 4; ++k) {
            const double x = s.x0 + (s.x1 - s.x0) * k / 4;
            const double y = s.y0 + (s.y1 - s.y0) * k / 4;
            const double bottom = f.top + f.side;
            out_ << "<line x1=\"" << n(f.px(x)) << "\" y1=\"" << n(bottom) << "\" x2=\"" << n(f.px(x)) << "\" y2=\""
                 << n(bottom + 5) << "\"/>\n";
            out_ << "<text x=\"" << n(f.px(x)) << "\" y=\"" << n(bottom + 7 + s.font_size)
                 << "\" stroke=\"none\" text-anchor=\"middle\">" << n(x) << "</text>\n";
            out_ << "<line x1=\"" << n(f.left - 5) << "\" y1=\"" << n(f.py(y)) << "\" x2=\"" << n(f.left) << "\" y2=\""
                 << n(f.py(y)) << "\"/>\n";
            out_ << "<text x=\"" << n(f.left - 7) << "\" y=\"" << n(f.py(y) + s.font_size / 3.0)
                 << "\" stroke=\"none\" text-anchor=\"end\">" << n(y) << "</text>\n";
        }
        out_ << "</g>\n";
    }

    void stack(const Stack& s, const Frame& f) {
        if (s.n <= 0) return;
        const double ax = std::cos(s.angle), ay = std::sin(s.angle);
        const double qx = -ay, qy = ax;
        const double half = s.len / 2;
        out_ << "<path stroke=\"" << escape(s.color) << "\" d=\"";
        for (int k = 0; k < s.n; ++k) {
            const double t = s.len * ((k + 0.5) / s.n - 0.5);
            const double cx = s.x + t * ax, cy = s.y + t * ay;
            out_ << (k ? " " : "") << "M" << f.pt(cx - half * qx, cy - half * qy) << "L"
                 << f.pt(cx + half * qx, cy + half * qy);
        }
        out_ << "\"/>\n";
        if (s.head) {
            const double bx = s.x + half * ax, by = s.y + half * ay;
            const double w = s.head_width * s.len / 2;
            const double h = s.head_height * s.len;
            out_ << "<path fill=\"" << escape(s.color) << "\" stroke=\"none\" d=\"M" << f.pt(bx - w * qx, by - w * qy)
                 << "L" << f.pt(bx + h * ax, by + h * ay) << "L" << f.pt(bx + w * qx, by + w * qy) << "Z\"/>\n";
        }
    }

    void arrow(const Arrow& a, const Frame& f) {
        if (a.len <= 0) return;
        const double ax = std::cos(a.angle), ay = std::sin(a.angle);
        const double tx = a.x + a.len * ax, ty = a.y + a.len * ay;
        out_ << "<path stroke=\"" << escape(a.color) << "\" d=\"M" << f.pt(a.x, a.y) << "L" << f.pt(tx, ty) << "\"/>\n";
        if (a.head) {
            const double w = 0.15 * a.len, h = 0.3 * a.len;
            const double bx = tx - h * ax, by = ty - h * ay;
            out_ << "<path fill=\"" << escape(a.color) << "\" stroke=\"none\" d=\"M" << f.pt(bx + w * ay, by - w * ax)
                 << "L" << f.pt(tx, ty) << "L" << f.pt(bx - w * ay, by + w * ax) << "Z\"/>\n";
        }
    }

    void block(const Block& b, const Frame& f) {
        const int count = std::max(b.n, 1);
        out_ << "<path stroke=\"" << escape(b.color) << "\" d=\"";
        for (int k = count; k >= 1; --k) {
            const double h = b.cell * k / count / 2;
            out_ << (k == count ? "" : " ") << "M" << f.pt(b.x - h, b.y - h) << "L" << f.pt(b.x + h, b.y - h) << "L"
                 << f.pt(b.x + h, b.y + h) << "L" << f.pt(b.x - h, b.y + h) << "Z";
        }
        out_ << "\"/>\n";
    }

    void polyline(const Polyline& p, const Frame& f, int font_size) {
        out_ << "<polyline stroke=\"" << escape(p.color.empty() ? "black" : p.color) << "\" points=\"";
        for (std::size_t k = 0; k < p.pts.size(); ++k) out_ << (k ? " " : "") << f.pt(p.pts[k][0], p.pts[k][1]);
        out_ << "\"/>\n";
        if (!p.label.empty() && !p.pts.empty()) {
            const auto& mid = p.pts[p.pts.size() / 2];
            out_ << "<text x=\"" << n(f.px(mid[0])) << "\" y=\"" << n(f.py(mid[1]))
                 << "\" font-family=\"sans-serif\" font-size=\"" << font_size << "\" fill=\"black\" stroke=\"none\">"
                 << escape(p.label) << "</text>\n";
        }
    }

    void marker(const Marker& m, const Frame& f) {
        if (m.kind == PointKind::Infinite) {
            out_ << "<circle cx=\"" << n(f.px(m.x)) << "\" cy=\"" << n(f.py(m.y)) << "\" r=\"4\" fill=\"red\"/>\n";
        } else {
            out_ << "<rect x=\"" << n(f.px(m.x) - 4) << "\" y=\"" << n(f.py(m.y) - 4)
                 << "\" width=\"8\" height=\"8\" fill=\"grey\"/>\n";
        }
    }

    void inset(const Inset& i, const Frame& f) {
        const double side = i.size * f.side;
        // Centred on the anchor, shifted to stay inside the parent frame.
        const double left = std::clamp(f.px(i.anchor_x) - side / 2, f.left, f.left + f.side - side);
        const double top = std::clamp(f.py(i.anchor_y) - side / 2, f.top, f.top + f.side - side);
        out_ << "<svg x=\"" << n(left) << "\" y=\"" << n(top) << "\" width=\"" << n(side) << "\" height=\"" << n(side)
             << "\" viewBox=\"0 0 " << n(side) << " " << n(side) << "\">\n";
        const Scene& c = *i.scene;
        body(c, Frame{0, 0, side, c.x0, c.x1, c.y0, c.y1}, false);
        out_ << "</svg>\n";
    }

    std::ostringstream& out_;
};

}  // namespace

std::string render_svg(const Scene& scene, const SvgOptions& options) {
    const double canvas = options.canvas;
    const double margin = std::round(canvas / std::max(1.0, scene.surround_space));
    const double total = canvas + 2 * margin;
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << format_number(total)
        << "\" height=\"" << format_number(total) << "\" viewBox=\"0 0 " << format_number(total) << " "
        << format_number(total) << "\">\n";
    out << "<rect width=\"" << format_number(total) << "\" height=\"" << format_number(total) << "\" fill=\"white\"/>\n";
    Writer(out).body(scene, Frame{margin, margin, canvas, scene.x0, scene.x1, scene.y0, scene.y1}, true);
    out << "</svg>\n";
    return out.str();
}

}  // namespace dform
