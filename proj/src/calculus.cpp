#include "dform/calculus.hpp"

#include <cmath>
#include <sstream>
#include <type_traits>

namespace dform {

std::string_view name_of(Mode m) {
    switch (m) {
        case Mode::Auto: return "auto";
        case Mode::Analytic: return "analytic";
        case Mode::Numeric: return "numeric";
    }
    return "auto";
}

Mode mode_from_name(std::string_view name) {
    for (auto m : {Mode::Auto, Mode::Analytic, Mode::Numeric}) {
        if (name_of(m) == name) return m;
    }
    throw Error("unknown mode '" + std::string(name) + "' (expected auto, analytic or numeric)");
}

namespace {

using Inputs = std::vector<const ScalarField*>;

void check_same_grid(const Inputs& in, std::string_view op) {
    for (const auto* f : in) {
        if (!(f->grid() == in.front()->grid())) {
            throw Error(std::string(op) + ": operands are defined on different grids");
        }
    }
}

bool analytic_path(Mode mode, const Inputs& in, std::string_view op) {
    bool all = true;
    for (const auto* f : in) all = all && f->expr().has_value();
    switch (mode) {
        case Mode::Auto: return all;
        case Mode::Numeric: return false;
        case Mode::Analytic:
            if (!all) throw Error(std::string(op) + ": analytic mode needs component equations on every operand");
            return true;
    }
    return false;
}

std::vector<bool> union_mask(const Inputs& in) {
    std::vector<bool> mask(in.front()->grid().size(), false);
    for (const auto* f : in) {
        for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = mask[k] || f->masked(k);
    }
    return mask;
}

ScalarField with_propagated_mask(const ScalarField& f, const Inputs& in) {
    return f.masked_by(union_mask(in));
}

/// One output component from pointwise inputs. `fn` is generic over the
/// component type: it receives a vector of Expr (analytic) or double
/// (numeric) in the order of `in`.
template <class Fn>
ScalarField combine(const Inputs& in, bool analytic, Fn fn) {
    const Grid2& grid = in.front()->grid();
    const double threshold = in.front()->threshold();
    if (analytic) {
        std::vector<Expr> exprs;
        for (const auto* f : in) exprs.push_back(*f->expr());
        return with_propagated_mask(ScalarField(grid, simplify(fn(exprs)), threshold), in);
    }
    std::vector<double> out(grid.size());
    std::vector<double> args(in.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        for (std::size_t a = 0; a < in.size(); ++a) args[a] = (*in[a])[k];
        out[k] = fn(args);
    }
    return with_propagated_mask(ScalarField(grid, std::move(out), threshold), in);
}

VectorField unit_diagonal(const Grid2& grid, double threshold) {
    return VectorField(ScalarField(grid, constant(1), threshold), ScalarField(grid, constant(1), threshold));
}

std::string degree_name(Kind k) {
    switch (k) {
        case Kind::Form0: return "0-form";
        case Kind::Form1: return "1-form";
        case Kind::Form2: return "2-form";
        case Kind::VectorField: return "vector field";
        case Kind::Zero: return "identically-zero form";
    }
    return "object";
}

int degree_of(const Object& obj) {
    switch (kind_of(obj)) {
        case Kind::Form0: return 0;
        case Kind::Form1: return 1;
        case Kind::Form2: return 2;
        case Kind::Zero: return std::get<ZeroForm>(obj).degree;
        case Kind::VectorField: break;
    }
    throw KindError("wedge: vector fields are not differential forms; convert with covariant first");
}

}  // namespace

// ---------------------------------------------------------------------------
// Exterior derivative

std::vector<double> partial(const ScalarField& f, Var axis) {
    const Grid2& g = f.grid();
    const bool along_x = axis == Var::X;
    const std::size_t n = along_x ? g.nx() : g.ny();
    const std::size_t m = along_x ? g.ny() : g.nx();
    const double h = along_x ? g.x().spacing() : g.y().spacing();
    auto at = [&](std::size_t line, std::size_t s) {
        return along_x ? g.index(s, line) : g.index(line, s);
    };
    std::vector<double> out(g.size());
    for (std::size_t line = 0; line < m; ++line) {
        auto v = [&](std::size_t s) { return f[at(line, s)]; };
        if (n == 2) {
            const double d = (v(1) - v(0)) / h;
            out[at(line, 0)] = d;
            out[at(line, 1)] = d;
            continue;
        }
        for (std::size_t s = 1; s + 1 < n; ++s) out[at(line, s)] = (v(s + 1) - v(s - 1)) / (2 * h);
        out[at(line, 0)] = (-3 * v(0) + 4 * v(1) - v(2)) / (2 * h);
        out[at(line, n - 1)] = (3 * v(n - 1) - 4 * v(n - 2) + v(n - 3)) / (2 * h);
    }
    return out;
}

namespace {

ScalarField derivative_field(const ScalarField& f, Var axis, bool analytic) {
    if (analytic) {
        return with_propagated_mask(ScalarField(f.grid(), differentiate(*f.expr(), axis), f.threshold()), {&f});
    }
    return with_propagated_mask(ScalarField(f.grid(), partial(f, axis), f.threshold()), {&f});
}

}  // namespace

Object ext_d(const Object& form, Mode mode) {
    switch (kind_of(form)) {
        case Kind::Form0: {
            const auto& phi = std::get<Form0>(form).phi;
            const bool analytic = analytic_path(mode, {&phi}, "ext_d");
            return Form1(derivative_field(phi, Var::X, analytic), derivative_field(phi, Var::Y, analytic));
        }
        case Kind::Form1: {
            const auto& a = std::get<Form1>(form);
            const Inputs in{&a.dx(), &a.dy()};
            if (analytic_path(mode, in, "ext_d")) {
                const Expr w = simplify(differentiate(*a.dy().expr(), Var::X) - differentiate(*a.dx().expr(), Var::Y));
                return Form2{with_propagated_mask(ScalarField(a.grid(), w, a.dx().threshold()), in)};
            }
            const auto dy_dx = partial(a.dy(), Var::X);
            const auto dx_dy = partial(a.dx(), Var::Y);
            std::vector<double> w(dy_dx.size());
            for (std::size_t k = 0; k < w.size(); ++k) w[k] = dy_dx[k] - dx_dy[k];
            return Form2{with_propagated_mask(ScalarField(a.grid(), std::move(w), a.dx().threshold()), in)};
        }
        case Kind::Form2:
            throw KindError("ext_d: exterior derivative of a top-degree form is zero (a 2-form on R^2 has no 3-form)");
        default:
            throw KindError("ext_d: not defined for a " + degree_name(kind_of(form)));
    }
}

// ---------------------------------------------------------------------------
// Interior derivative

Object interior_d(const Object& form, const std::optional<VectorField>& v_in, Mode mode) {
    const Kind kind = kind_of(form);
    if (kind != Kind::Form1 && kind != Kind::Form2) {
        throw KindError("interior_d: not defined for a " + degree_name(kind) + " (needs a 1-form or 2-form)");
    }
    const Grid2& grid = grid_of(form);
    const VectorField v = v_in ? *v_in : unit_diagonal(grid, components(form).front()->threshold());
    if (!(v.grid() == grid)) throw Error("interior_d: vector field grid does not match the form's grid");

    if (kind == Kind::Form1) {
        const auto& a = std::get<Form1>(form);
        const Inputs in{&v.u(), &a.dx(), &v.v(), &a.dy()};
        const bool analytic = analytic_path(mode, in, "interior_d");
        return Form0{combine(in, analytic, [](const auto& c) { return c[0] * c[1] + c[2] * c[3]; })};
    }
    const auto& w = std::get<Form2>(form).w;
    const Inputs in{&w, &v.u(), &v.v()};
    const bool analytic = analytic_path(mode, in, "interior_d");
    // w (v1 dy - v2 dx)
    return Form1(combine(in, analytic, [](const auto& c) { return -(c[0] * c[2]); }),
                 combine(in, analytic, [](const auto& c) { return c[0] * c[1]; }));
}

Object interior_d(const Object& form, const std::string& vx, const std::string& vy, Mode mode) {
    const Grid2& grid = grid_of(form);
    const auto comps = components(form);
    const double threshold = comps.empty() ? kDefaultSingularThreshold : comps.front()->threshold();
    return interior_d(form, VectorField(ScalarField(grid, parse(vx), threshold), ScalarField(grid, parse(vy), threshold)),
                      mode);
}

// ---------------------------------------------------------------------------
// Hodge star

namespace {

/// Sign flip that undoes itself structurally, so ** reproduces the input
/// tree and its values bit for bit.
Expr negated(const Expr& e) {
    if (e.kind() == Expr::Kind::Unary && e.func() == Func::Neg) return e.arg();
    if (e.is_constant() && !e.is_named()) return e.value() == 0 ? e : constant(-e.value());
    return -e;
}

/// A component carried over unchanged or negated.
ScalarField relabel(const ScalarField& f, bool analytic, bool negate) {
    if (analytic) {
        const Expr& e = *f.expr();
        return with_propagated_mask(ScalarField(f.grid(), negate ? negated(e) : e, f.threshold()), {&f});
    }
    std::vector<double> out(f.values().begin(), f.values().end());
    if (negate) {
        for (double& v : out) v = -v;
    }
    return with_propagated_mask(ScalarField(f.grid(), std::move(out), f.threshold()), {&f});
}

}  // namespace

Object hodge(const Object& form, Mode mode) {
    switch (kind_of(form)) {
        case Kind::Form0: {
            const auto& phi = std::get<Form0>(form).phi;
            return Form2{relabel(phi, analytic_path(mode, {&phi}, "hodge"), false)};
        }
        case Kind::Form1: {
            const auto& a = std::get<Form1>(form);
            const bool analytic = analytic_path(mode, {&a.dx(), &a.dy()}, "hodge");
            return Form1(relabel(a.dy(), analytic, true), relabel(a.dx(), analytic, false));
        }
        case Kind::Form2: {
            const auto& w = std::get<Form2>(form).w;
            return Form0{relabel(w, analytic_path(mode, {&w}, "hodge"), false)};
        }
        default:
            throw KindError("hodge: not defined for a " + degree_name(kind_of(form)));
    }
}

void hodge_in_place(Object& form, Mode mode) {
    if (kind_of(form) != Kind::Form1) {
        throw KindError("hodge: keep_object only applies to 1-forms (the Hodge dual of a " +
                        degree_name(kind_of(form)) + " has a different degree)");
    }
    auto& a = std::get<Form1>(form);
    auto dual = std::get<Form1>(hodge(form, mode));
    a.set_components(dual.dx(), dual.dy());
}

// ---------------------------------------------------------------------------
// Wedge

namespace {

Object scale_by(const ScalarField& phi, const Object& b, Mode mode) {
    auto scaled = [&](const ScalarField& c) {
        const Inputs in{&phi, &c};
        return combine(in, analytic_path(mode, {&phi, &c}, "wedge"), [](const auto& v) { return v[0] * v[1]; });
    };
    auto check = [&](const Inputs& in) {
        Inputs all = in;
        all.push_back(&phi);
        check_same_grid(all, "wedge");
        // Decide once so that every component takes the same path.
        return analytic_path(mode, all, "wedge") ? Mode::Analytic : Mode::Numeric;
    };
    switch (kind_of(b)) {
        case Kind::Form0: {
            const auto& q = std::get<Form0>(b).phi;
            mode = check({&q});
            return Form0{scaled(q)};
        }
        case Kind::Form1: {
            const auto& a = std::get<Form1>(b);
            mode = check({&a.dx(), &a.dy()});
            return Form1(scaled(a.dx()), scaled(a.dy()));
        }
        case Kind::Form2: {
            const auto& w = std::get<Form2>(b).w;
            mode = check({&w});
            return Form2{scaled(w)};
        }
        default:
            throw KindError("wedge: not defined for a " + degree_name(kind_of(b)));
    }
}

}  // namespace

Object wedge(const Object& a, const Object& b, Mode mode) {
    const int p = degree_of(a);
    const int q = degree_of(b);
    if (!(grid_of(a) == grid_of(b))) throw Error("wedge: operands are defined on different grids");
    if (p + q > 2) return ZeroForm{grid_of(a), p + q};
    if (p == 0) return scale_by(std::get<Form0>(a).phi, b, mode);
    if (q == 0) return scale_by(std::get<Form0>(b).phi, a, mode);
    const auto& f = std::get<Form1>(a);
    const auto& g = std::get<Form1>(b);
    const Inputs in{&f.dx(), &g.dy(), &f.dy(), &g.dx()};
    const bool analytic = analytic_path(mode, in, "wedge");
    return Form2{combine(in, analytic, [](const auto& c) { return c[0] * c[1] - c[2] * c[3]; })};
}

// ---------------------------------------------------------------------------
// Index raising / lowering

Form1 covariant(const VectorField& vf, const Metric& g, Mode mode) {
    const auto gs = g.on(vf.grid(), vf.u().threshold());
    // g_xx v^x + g_xy v^y, g_yx v^x + g_yy v^y
    Inputs in{&gs[0], &vf.u(), &gs[1], &vf.v()};
    Inputs in2{&gs[2], &vf.u(), &gs[3], &vf.v()};
    Inputs all{&gs[0], &gs[1], &gs[2], &gs[3], &vf.u(), &vf.v()};
    const bool analytic = analytic_path(mode, all, "covariant");
    auto row = [](const auto& c) { return c[0] * c[1] + c[2] * c[3]; };
    return Form1(combine(in, analytic, row), combine(in2, analytic, row));
}

VectorField contravariant(const Form1& form, const Metric& g, Mode mode) {
    const auto gs = g.on(form.grid(), form.dx().threshold());
    Inputs all{&gs[0], &gs[1], &gs[2], &gs[3], &form.dx(), &form.dy()};
    const bool analytic = analytic_path(mode, all, "contravariant");

    // Inverse of [[a, b], [c, d]] is [[d, -b], [-c, a]] / (ad - bc).
    auto vx = combine(all, analytic, [](const auto& c) { return (c[3] * c[4] - c[1] * c[5]) / (c[0] * c[3] - c[1] * c[2]); });
    auto vy = combine(all, analytic, [](const auto& c) { return (c[0] * c[5] - c[2] * c[4]) / (c[0] * c[3] - c[1] * c[2]); });

    std::vector<bool> singular(form.grid().size(), false);
    for (std::size_t k = 0; k < singular.size(); ++k) {
        const double det = gs[0][k] * gs[3][k] - gs[1][k] * gs[2][k];
        singular[k] = !(std::isfinite(det) && det != 0.0);
    }
    return VectorField(vx.masked_by(singular), vy.masked_by(singular));
}

// ---------------------------------------------------------------------------
// Linear combinations

Object add(const Object& a, const Object& b, Mode mode) {
    if (kind_of(a) != kind_of(b)) {
        throw KindError("add: cannot add a " + degree_name(kind_of(a)) + " and a " + degree_name(kind_of(b)));
    }
    if (kind_of(a) == Kind::Zero) return a;
    const auto ca = components(a);
    const auto cb = components(b);
    Inputs all(ca.begin(), ca.end());
    all.insert(all.end(), cb.begin(), cb.end());
    check_same_grid(all, "add");
    const bool analytic = analytic_path(mode, all, "add");
    std::vector<ScalarField> out;
    for (std::size_t k = 0; k < ca.size(); ++k) {
        out.push_back(combine({ca[k], cb[k]}, analytic, [](const auto& c) { return c[0] + c[1]; }));
    }
    switch (kind_of(a)) {
        case Kind::Form0: return Form0{out[0]};
        case Kind::Form1: return Form1(out[0], out[1]);
        case Kind::Form2: return Form2{out[0]};
        default: return VectorField(out[0], out[1]);
    }
}

Object scale(double factor, const Object& a, Mode mode) {
    if (kind_of(a) == Kind::Zero) return a;
    const auto ca = components(a);
    const bool analytic = analytic_path(mode, Inputs(ca.begin(), ca.end()), "scale");
    std::vector<ScalarField> out;
    for (const auto* c : ca) {
        out.push_back(combine({c}, analytic, [&](const auto& v) {
            if constexpr (std::is_same_v<std::decay_t<decltype(v[0])>, Expr>) {
                return constant(factor) * v[0];
            } else {
                return factor * v[0];
            }
        }));
    }
    switch (kind_of(a)) {
        case Kind::Form0: return Form0{out[0]};
        case Kind::Form1: return Form1(out[0], out[1]);
        case Kind::Form2: return Form2{out[0]};
        default: return VectorField(out[0], out[1]);
    }
}

// ---------------------------------------------------------------------------
// Zoom and local derivatives

void ZoomSpec::validate() const {
    if (!std::isfinite(target_x) || !std::isfinite(target_y)) throw Error("zoom: target must be finite");
    if (!(mag >= 1.0) || !std::isfinite(mag)) throw Error("zoom: mag must be a finite number >= 1");
    if (dpd < 2) throw Error("zoom: dpd must be at least 2");
    if (!(insize > 0.0 && insize <= 1.0)) throw Error("zoom: insize must lie in (0, 1]");
}

namespace {

struct Window {
    Grid2 grid;
    InsetViewport viewport;
    std::vector<std::string> warnings;
};

Window zoom_window(const Grid2& parent, const ZoomSpec& spec) {
    spec.validate();
    const double hx = spec.insize * parent.x().half_extent() / spec.mag;
    const double hy = spec.insize * parent.y().half_extent() / spec.mag;
    Axis wx{spec.target_x - hx, spec.target_x + hx, spec.dpd};
    Axis wy{spec.target_y - hy, spec.target_y + hy, spec.dpd};
    InsetViewport vp;
    vp.anchor_x = spec.target_x;
    vp.anchor_y = spec.target_y;
    vp.frac_x = (spec.target_x - parent.x().min) / (parent.x().max - parent.x().min);
    vp.frac_y = (spec.target_y - parent.y().min) / (parent.y().max - parent.y().min);
    vp.size = spec.insize;
    vp.window_x = wx;
    vp.window_y = wy;
    std::vector<std::string> warnings;
    if (spec.target_x < parent.x().min || spec.target_x > parent.x().max || spec.target_y < parent.y().min ||
        spec.target_y > parent.y().max) {
        std::ostringstream msg;
        msg << "zoom target (" << spec.target_x << ", " << spec.target_y << ") lies outside the parent extent";
        warnings.push_back(msg.str());
    }
    return {Grid2(wx, wy), vp, std::move(warnings)};
}

}  // namespace

Zoomed zoom(const Object& obj, const ZoomSpec& spec) {
    const Kind kind = kind_of(obj);
    if (kind == Kind::Form0) throw KindError("zoom: 0-forms cannot be zoomed");
    if (kind == Kind::Zero) throw KindError("zoom: not defined for an identically-zero form");
    if (!has_expressions(obj)) {
        throw Error("zoom: the object needs component equations; provide them at creation or with give_eqn");
    }
    auto w = zoom_window(grid_of(obj), spec);
    std::vector<ScalarField> comps;
    for (const auto* c : components(obj)) comps.push_back(c->resampled(w.grid));
    Object out = kind == Kind::Form1 ? Object(Form1(comps[0], comps[1]))
                 : kind == Kind::Form2 ? Object(Form2{comps[0]})
                                       : Object(VectorField(comps[0], comps[1]));
    return {std::move(out), w.viewport, std::move(w.warnings)};
}

namespace {

enum class Projection { None, Radial, Tangential };

Zoomed local_derivative(const VectorField& vf, const ZoomSpec& spec, Projection proj) {
    if (!vf.u().expr() || !vf.v().expr()) {
        throw Error("deriv/div/curl: the vector field needs component equations");
    }
    auto w = zoom_window(vf.grid(), spec);
    const double x0 = spec.target_x;
    const double y0 = spec.target_y;
    const Expr& fu = *vf.u().expr();
    const Expr& fv = *vf.v().expr();
    const double u0 = fu.evaluate(x0, y0);
    const double v0 = fv.evaluate(x0, y0);
    const double thr = vf.u().threshold();

    // Unsimplified on purpose: evaluates to exactly F(p) - F(p0).
    ScalarField du(w.grid, fu - constant(u0), thr);
    ScalarField dv(w.grid, fv - constant(v0), thr);
    if (proj == Projection::None) return {VectorField(du, dv), w.viewport, std::move(w.warnings)};

    const Grid2& g = w.grid;
    std::vector<double> pu(g.size(), 0.0);
    std::vector<double> pv(g.size(), 0.0);
    for (std::size_t i = 0; i < g.nx(); ++i) {
        for (std::size_t j = 0; j < g.ny(); ++j) {
            const std::size_t k = g.index(i, j);
            const double rx = g.x_at(i) - x0;
            const double ry = g.y_at(j) - y0;
            const double r2 = rx * rx + ry * ry;
            if (r2 == 0.0) {
                // Direction undefined at the target itself: zero vector.
                if (std::isnan(du[k]) || std::isnan(dv[k])) pu[k] = pv[k] = std::nan("");
                continue;
            }
            // Project onto d = (rx, ry) or t = (-ry, rx): ((D . d) / |d|^2) d
            const double dx = proj == Projection::Radial ? rx : -ry;
            const double dy = proj == Projection::Radial ? ry : rx;
            const double s = (du[k] * dx + dv[k] * dy) / r2;
            pu[k] = s * dx;
            pv[k] = s * dy;
        }
    }
    const Inputs in{&du, &dv};
    return {VectorField(with_propagated_mask(ScalarField(g, std::move(pu), thr), in),
                        with_propagated_mask(ScalarField(g, std::move(pv), thr), in)),
            w.viewport, std::move(w.warnings)};
}

}  // namespace

Zoomed deriv(const VectorField& vf, const ZoomSpec& spec) { return local_derivative(vf, spec, Projection::None); }
Zoomed div(const VectorField& vf, const ZoomSpec& spec) { return local_derivative(vf, spec, Projection::Radial); }
Zoomed curl(const VectorField& vf, const ZoomSpec& spec) { return local_derivative(vf, spec, Projection::Tangential); }

}  // namespace dform
