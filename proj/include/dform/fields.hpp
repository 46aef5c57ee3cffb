#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dform/expr.hpp"

namespace dform {

/// Values with magnitude above this are treated as infinite.
inline constexpr double kDefaultSingularThreshold = 1e15;

/// Uniform sampling of [min, max] with n points, endpoints included.
struct Axis {
    double min = -1.0;
    double max = 1.0;
    std::size_t n = 2;

    double spacing() const { return (max - min) / static_cast<double>(n - 1); }
    double at(std::size_t i) const;
    double half_extent() const { return 0.5 * (max - min); }
    double center() const { return 0.5 * (min + max); }

    friend bool operator==(const Axis&, const Axis&) = default;
};

/// Rectangular uniform mesh. Values on it are stored row-major with x as the
/// slow index: value(i, j) lives at i * ny + j.
class Grid2 {
public:
    Grid2(Axis x, Axis y);

    static Grid2 square(double min, double max, std::size_t n) { return Grid2({min, max, n}, {min, max, n}); }
    /// Accepts explicit coordinates; they must be strictly increasing and
    /// uniform to 1e-12 relative.
    static Grid2 from_coordinates(std::span<const double> xs, std::span<const double> ys);

    const Axis& x() const { return x_; }
    const Axis& y() const { return y_; }
    std::size_t nx() const { return x_.n; }
    std::size_t ny() const { return y_.n; }
    std::size_t size() const { return x_.n * y_.n; }
    std::size_t index(std::size_t i, std::size_t j) const { return i * y_.n + j; }
    double x_at(std::size_t i) const { return x_.at(i); }
    double y_at(std::size_t j) const { return y_.at(j); }

    friend bool operator==(const Grid2&, const Grid2&) = default;

private:
    Axis x_;
    Axis y_;
};

enum class PointKind : std::uint8_t { Finite, Infinite, Undefined };

PointKind classify(double value, double threshold = kDefaultSingularThreshold);
std::string_view name_of(PointKind k);

/// Per-point values on a grid, optionally backed by an expression, with the
/// singularity classification of every point.
class ScalarField {
public:
    ScalarField(Grid2 grid, std::vector<double> values, double threshold = kDefaultSingularThreshold);
    /// Values are the expression evaluated on the grid.
    ScalarField(Grid2 grid, Expr expr, double threshold = kDefaultSingularThreshold);

    const Grid2& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double at(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }
    double operator[](std::size_t k) const { return values_[k]; }
    const std::optional<Expr>& expr() const { return expr_; }
    double threshold() const { return threshold_; }

    PointKind kind(std::size_t k) const { return kinds_[k]; }
    bool masked(std::size_t k) const { return kinds_[k] != PointKind::Finite; }
    std::size_t masked_count() const;

    /// Same grid, values replaced by evaluating `e`.
    ScalarField with_expr(Expr e) const { return ScalarField(grid_, std::move(e), threshold_); }
    /// Re-evaluate the attached expression on another grid.
    ScalarField resampled(const Grid2& grid) const;
    /// Points flagged in `mask` become undefined (value NaN).
    ScalarField masked_by(const std::vector<bool>& mask) const;
    /// Drop the expression, keep the values.
    ScalarField values_only() const;

private:
    void classify_all();

    Grid2 grid_;
    std::vector<double> values_;
    std::optional<Expr> expr_;
    std::vector<PointKind> kinds_;
    double threshold_;
};

/// Scalar function phi(x, y).
struct Form0 {
    ScalarField phi;
};

/// a1 dx + a2 dy.
class Form1 {
public:
    Form1(ScalarField dx, ScalarField dy);
    const ScalarField& dx() const { return dx_; }
    const ScalarField& dy() const { return dy_; }
    const Grid2& grid() const { return dx_.grid(); }
    void set_components(ScalarField dx, ScalarField dy);

private:
    ScalarField dx_;
    ScalarField dy_;
};

/// w dx^dy. Counter-clockwise (positive w) is the positive orientation.
struct Form2 {
    ScalarField w;
};

/// u xhat + v yhat.
class VectorField {
public:
    VectorField(ScalarField u, ScalarField v);
    const ScalarField& u() const { return u_; }
    const ScalarField& v() const { return v_; }
    const Grid2& grid() const { return u_.grid(); }

private:
    ScalarField u_;
    ScalarField v_;
};

/// Result of a product whose degree exceeds 2: identically zero on ℝ².
struct ZeroForm {
    Grid2 grid;
    int degree = 3;
};

enum class Kind : std::uint8_t { Form0, Form1, Form2, VectorField, Zero };

std::string_view name_of(Kind k);
/// "form0", "form1", "form2", "vf". Throws Error otherwise.
Kind kind_from_name(std::string_view name);

using Object = std::variant<Form0, Form1, Form2, VectorField, ZeroForm>;

Kind kind_of(const Object& obj);
const Grid2& grid_of(const Object& obj);
/// Component fields in canonical order (none for ZeroForm).
std::vector<const ScalarField*> components(const Object& obj);
std::size_t component_count(Kind kind);
/// True when every component carries an expression.
bool has_expressions(const Object& obj);

/// Component input: an equation string, row-major values, or both (the
/// expression then wins and the values are recomputed from it).
struct ComponentSpec {
    std::optional<std::string> expr;
    std::optional<std::vector<double>> values;
};

Object make_field(Kind kind, const Grid2& grid, std::span<const ComponentSpec> components,
                  double threshold = kDefaultSingularThreshold);
/// Convenience: expression strings only.
Object make_field(Kind kind, const Grid2& grid, std::initializer_list<std::string> exprs,
                  double threshold = kDefaultSingularThreshold);

/// Attach expressions; values are replaced by evaluating them on the grid.
Object give_eqn(const Object& obj, std::span<const std::string> exprs);

/// Re-evaluate on an n x n grid over the same extent. Needs expressions.
Object set_density(const Object& obj, std::size_t n);
/// Form2 variant with independent x / y resolution.
Object set_density2(const Object& obj, std::size_t nx, std::size_t ny);

/// Compress dynamic range: magnitude m becomes log10(1 + m), direction and
/// sign kept. Masked points untouched. Result carries no expressions.
Object log_scale(const Object& obj);

/// Pointwise 2x2 symmetric metric g_ij, from expressions or sampled fields.
class Metric {
public:
    static Metric identity();
    static Metric from_exprs(Expr xx, Expr xy, Expr yx, Expr yy);
    static Metric from_strings(const std::string& xx, const std::string& xy, const std::string& yx,
                               const std::string& yy);
    static Metric from_fields(ScalarField xx, ScalarField xy, ScalarField yx, ScalarField yy);

    bool analytic() const { return exprs_.has_value(); }
    /// xx, xy, yx, yy.
    const std::array<Expr, 4>& exprs() const { return *exprs_; }

    /// Components sampled on `grid`. Throws Error for a grid mismatch or an
    /// asymmetric metric.
    std::array<ScalarField, 4> on(const Grid2& grid, double threshold = kDefaultSingularThreshold) const;

private:
    std::optional<std::array<Expr, 4>> exprs_;
    std::vector<ScalarField> fields_;
};

}  // namespace dform
