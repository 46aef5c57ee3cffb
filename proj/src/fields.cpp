#include "dform/fields.hpp"

#include <cmath>
#include <utility>

namespace dform {

double Axis::at(std::size_t i) const {
    // Weighted endpoints: exact at both ends and symmetric about the centre.
    const double last = static_cast<double>(n - 1);
    const double k = static_cast<double>(i);
    return (min * (last - k) + max * k) / last;
}

namespace {

void check_axis(const Axis& a, const char* name) {
    if (a.n < 2) throw Error(std::string("grid ") + name + " axis needs at least 2 points");
    if (!std::isfinite(a.min) || !std::isfinite(a.max) || !(a.min < a.max)) {
        throw Error(std::string("grid ") + name + " range must be finite and increasing");
    }
}

Axis axis_from(std::span<const double> c, const char* name) {
    if (c.size() < 2) throw Error(std::string("grid ") + name + " axis needs at least 2 points");
    Axis a{c.front(), c.back(), c.size()};
    check_axis(a, name);
    const double h = a.spacing();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (std::fabs(c[i] - a.at(i)) > 1e-12 * std::max(std::fabs(h), std::fabs(a.at(i)))) {
            throw Error(std::string("grid ") + name + " coordinates are not uniformly spaced");
        }
    }
    return a;
}

}  // namespace

Grid2::Grid2(Axis x, Axis y) : x_(x), y_(y) {
    check_axis(x_, "x");
    check_axis(y_, "y");
}

Grid2 Grid2::from_coordinates(std::span<const double> xs, std::span<const double> ys) {
    return Grid2(axis_from(xs, "x"), axis_from(ys, "y"));
}

PointKind classify(double value, double threshold) {
    if (std::isnan(value)) return PointKind::Undefined;
    if (std::isinf(value) || std::fabs(value) > threshold) return PointKind::Infinite;
    return PointKind::Finite;
}

std::string_view name_of(PointKind k) {
    switch (k) {
        case PointKind::Finite: return "finite";
        case PointKind::Infinite: return "infinite";
        case PointKind::Undefined: return "undefined";
    }
    return "finite";
}

// ---------------------------------------------------------------------------
// ScalarField

ScalarField::ScalarField(Grid2 grid, std::vector<double> values, double threshold)
    : grid_(std::move(grid)), values_(std::move(values)), threshold_(threshold) {
    if (values_.size() != grid_.size()) {
        throw Error("component has " + std::to_string(values_.size()) + " values, grid needs " +
                    std::to_string(grid_.size()));
    }
    classify_all();
}

ScalarField::ScalarField(Grid2 grid, Expr expr, double threshold)
    : grid_(std::move(grid)), expr_(std::move(expr)), threshold_(threshold) {
    values_.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.nx(); ++i) {
        const double x = grid_.x_at(i);
        for (std::size_t j = 0; j < grid_.ny(); ++j) {
            values_[grid_.index(i, j)] = expr_->evaluate(x, grid_.y_at(j));
        }
    }
    classify_all();
}

void ScalarField::classify_all() {
    kinds_.resize(values_.size());
    for (std::size_t k = 0; k < values_.size(); ++k) kinds_[k] = classify(values_[k], threshold_);
}

std::size_t ScalarField::masked_count() const {
    std::size_t n = 0;
    for (auto k : kinds_) n += k != PointKind::Finite;
    return n;
}

ScalarField ScalarField::resampled(const Grid2& grid) const {
    if (!expr_) throw Error("resampling needs component equations; attach them with give_eqn");
    return ScalarField(grid, *expr_, threshold_);
}

ScalarField ScalarField::masked_by(const std::vector<bool>& mask) const {
    ScalarField out = *this;
    for (std::size_t k = 0; k < mask.size() && k < out.values_.size(); ++k) {
        if (mask[k]) {
            out.values_[k] = std::nan("");
            out.kinds_[k] = PointKind::Undefined;
        }
    }
    return out;
}

ScalarField ScalarField::values_only() const {
    ScalarField out = *this;
    out.expr_.reset();
    return out;
}

// ---------------------------------------------------------------------------
// Objects

Form1::Form1(ScalarField dx, ScalarField dy) : dx_(std::move(dx)), dy_(std::move(dy)) {
    if (!(dx_.grid() == dy_.grid())) throw Error("1-form components must share one grid");
}

void Form1::set_components(ScalarField dx, ScalarField dy) { *this = Form1(std::move(dx), std::move(dy)); }

VectorField::VectorField(ScalarField u, ScalarField v) : u_(std::move(u)), v_(std::move(v)) {
    if (!(u_.grid() == v_.grid())) throw Error("vector field components must share one grid");
}

std::string_view name_of(Kind k) {
    switch (k) {
        case Kind::Form0: return "form0";
        case Kind::Form1: return "form1";
        case Kind::Form2: return "form2";
        case Kind::VectorField: return "vf";
        case Kind::Zero: return "zero";
    }
    return "zero";
}

Kind kind_from_name(std::string_view name) {
    for (auto k : {Kind::Form0, Kind::Form1, Kind::Form2, Kind::VectorField}) {
        if (name_of(k) == name) return k;
    }
    throw Error("unknown object kind '" + std::string(name) + "' (expected form0, form1, form2 or vf)");
}

Kind kind_of(const Object& obj) { return static_cast<Kind>(obj.index()); }

const Grid2& grid_of(const Object& obj) {
    return std::visit(
        [](const auto& o) -> const Grid2& {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, Form0>) return o.phi.grid();
            else if constexpr (std::is_same_v<T, Form2>) return o.w.grid();
            else if constexpr (std::is_same_v<T, ZeroForm>) return o.grid;
            else return o.grid();
        },
        obj);
}

std::vector<const ScalarField*> components(const Object& obj) {
    return std::visit(
        [](const auto& o) -> std::vector<const ScalarField*> {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, Form0>) return {&o.phi};
            else if constexpr (std::is_same_v<T, Form1>) return {&o.dx(), &o.dy()};
            else if constexpr (std::is_same_v<T, Form2>) return {&o.w};
            else if constexpr (std::is_same_v<T, VectorField>) return {&o.u(), &o.v()};
            else return {};
        },
        obj);
}

std::size_t component_count(Kind kind) {
    switch (kind) {
        case Kind::Form1:
        case Kind::VectorField: return 2;
        case Kind::Zero: return 0;
        default: return 1;
    }
}

bool has_expressions(const Object& obj) {
    const auto comps = components(obj);
    if (comps.empty()) return false;
    for (const auto* c : comps) {
        if (!c->expr()) return false;
    }
    return true;
}

namespace {

Object assemble(Kind kind, std::vector<ScalarField> c) {
    switch (kind) {
        case Kind::Form0: return Form0{std::move(c[0])};
        case Kind::Form1: return Form1(std::move(c[0]), std::move(c[1]));
        case Kind::Form2: return Form2{std::move(c[0])};
        case Kind::VectorField: return VectorField(std::move(c[0]), std::move(c[1]));
        case Kind::Zero: break;
    }
    throw Error("cannot construct an identically-zero object from components");
}

void check_count(Kind kind, std::size_t given) {
    const std::size_t want = component_count(kind);
    if (want == 0) throw Error("identically-zero objects have no components");
    if (given != want) {
        throw Error(std::string(name_of(kind)) + " needs " + std::to_string(want) + " component(s), got " +
                    std::to_string(given));
    }
}

}  // namespace

Object make_field(Kind kind, const Grid2& grid, std::span<const ComponentSpec> specs, double threshold) {
    check_count(kind, specs.size());
    std::vector<ScalarField> comps;
    for (const auto& spec : specs) {
        if (spec.expr) {
            comps.emplace_back(grid, parse(*spec.expr), threshold);
        } else if (spec.values) {
            comps.emplace_back(grid, *spec.values, threshold);
        } else {
            throw Error("each component needs an equation or a grid of values");
        }
    }
    return assemble(kind, std::move(comps));
}

Object make_field(Kind kind, const Grid2& grid, std::initializer_list<std::string> exprs, double threshold) {
    std::vector<ComponentSpec> specs;
    for (const auto& e : exprs) specs.push_back({e, std::nullopt});
    return make_field(kind, grid, specs, threshold);
}

Object give_eqn(const Object& obj, std::span<const std::string> exprs) {
    const Kind kind = kind_of(obj);
    check_count(kind, exprs.size());
    std::vector<ScalarField> comps;
    const auto current = components(obj);
    for (std::size_t k = 0; k < exprs.size(); ++k) comps.push_back(current[k]->with_expr(parse(exprs[k])));
    return assemble(kind, std::move(comps));
}

namespace {

Object resample(const Object& obj, const Grid2& grid) {
    const Kind kind = kind_of(obj);
    if (kind == Kind::Zero) return ZeroForm{grid, std::get<ZeroForm>(obj).degree};
    if (!has_expressions(obj)) {
        throw Error("changing the density only works when the object has component equations");
    }
    std::vector<ScalarField> comps;
    for (const auto* c : components(obj)) comps.push_back(c->resampled(grid));
    return assemble(kind, std::move(comps));
}

}  // namespace

Object set_density(const Object& obj, std::size_t n) {
    const Grid2& g = grid_of(obj);
    return resample(obj, Grid2({g.x().min, g.x().max, n}, {g.y().min, g.y().max, n}));
}

Object set_density2(const Object& obj, std::size_t nx, std::size_t ny) {
    if (kind_of(obj) != Kind::Form2) throw KindError("set_density2 applies to 2-forms");
    const Grid2& g = grid_of(obj);
    return resample(obj, Grid2({g.x().min, g.x().max, nx}, {g.y().min, g.y().max, ny}));
}

namespace {

double log_factor(double magnitude) { return std::log10(1.0 + magnitude) / magnitude; }

std::pair<ScalarField, ScalarField> log_pair(const ScalarField& a, const ScalarField& b) {
    std::vector<double> u(a.values().begin(), a.values().end());
    std::vector<double> v(b.values().begin(), b.values().end());
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (a.masked(k) || b.masked(k)) continue;
        const double m = std::hypot(u[k], v[k]);
        if (m == 0.0) continue;
        const double f = log_factor(m);
        u[k] *= f;
        v[k] *= f;
    }
    return {ScalarField(a.grid(), std::move(u), a.threshold()), ScalarField(b.grid(), std::move(v), b.threshold())};
}

}  // namespace

Object log_scale(const Object& obj) {
    switch (kind_of(obj)) {
        case Kind::Form1: {
            const auto& f = std::get<Form1>(obj);
            auto [u, v] = log_pair(f.dx(), f.dy());
            return Form1(std::move(u), std::move(v));
        }
        case Kind::VectorField: {
            const auto& f = std::get<VectorField>(obj);
            auto [u, v] = log_pair(f.u(), f.v());
            return VectorField(std::move(u), std::move(v));
        }
        case Kind::Form2: {
            const auto& w = std::get<Form2>(obj).w;
            std::vector<double> out(w.values().begin(), w.values().end());
            for (std::size_t k = 0; k < out.size(); ++k) {
                if (w.masked(k) || out[k] == 0.0) continue;
                out[k] = std::copysign(std::log10(1.0 + std::fabs(out[k])), out[k]);
            }
            return Form2{ScalarField(w.grid(), std::move(out), w.threshold())};
        }
        default:
            throw KindError("log scaling applies to 1-forms, 2-forms and vector fields");
    }
}

// ---------------------------------------------------------------------------
// Metric

Metric Metric::identity() { return from_exprs(constant(1), constant(0), constant(0), constant(1)); }

Metric Metric::from_exprs(Expr xx, Expr xy, Expr yx, Expr yy) {
    Metric m;
    m.exprs_ = std::array<Expr, 4>{std::move(xx), std::move(xy), std::move(yx), std::move(yy)};
    return m;
}

Metric Metric::from_strings(const std::string& xx, const std::string& xy, const std::string& yx,
                            const std::string& yy) {
    return from_exprs(parse(xx), parse(xy), parse(yx), parse(yy));
}

Metric Metric::from_fields(ScalarField xx, ScalarField xy, ScalarField yx, ScalarField yy) {
    Metric m;
    m.fields_ = {std::move(xx), std::move(xy), std::move(yx), std::move(yy)};
    for (const auto& f : m.fields_) {
        if (!(f.grid() == m.fields_[0].grid())) throw Error("metric components must share one grid");
    }
    return m;
}

std::array<ScalarField, 4> Metric::on(const Grid2& grid, double threshold) const {
    auto sample = [&](std::size_t k) {
        if (exprs_) return ScalarField(grid, (*exprs_)[k], threshold);
        if (!(fields_[k].grid() == grid)) throw Error("metric grid does not match the object's grid");
        return fields_[k];
    };
    std::array<ScalarField, 4> g{sample(0), sample(1), sample(2), sample(3)};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double a = g[1][k];
        const double b = g[2][k];
        if (std::isfinite(a) && std::isfinite(b) && a != b) throw Error("metric is not symmetric (g_xy != g_yx)");
    }
    return g;
}

}  // namespace dform
