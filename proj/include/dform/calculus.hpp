#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dform/fields.hpp"

namespace dform {

/// Analytic: symbolic on the attached expressions, then evaluated.
/// Numeric: pointwise on grid values, finite differences for derivatives.
/// Auto: analytic when every input carries expressions.
enum class Mode { Auto, Analytic, Numeric };

std::string_view name_of(Mode m);
Mode mode_from_name(std::string_view name);

/// d: Form0 -> Form1, Form1 -> Form2. Numeric derivatives use second-order
/// central differences inside and second-order one-sided differences on the
/// boundary.
Object ext_d(const Object& form, Mode mode = Mode::Auto);

/// Contraction with a vector field: Form1 -> Form0, Form2 -> Form1. Without
/// a field, v = xhat + yhat.
Object interior_d(const Object& form, const std::optional<VectorField>& v = std::nullopt, Mode mode = Mode::Auto);
/// Field given by component equations, evaluated on the form's grid.
Object interior_d(const Object& form, const std::string& vx, const std::string& vy, Mode mode = Mode::Auto);

/// Flat Euclidean Hodge star: *phi = phi dx^dy, *(a dx + b dy) = -b dx + a dy,
/// *(w dx^dy) = w.
Object hodge(const Object& form, Mode mode = Mode::Auto);
/// keep_object: replace the components of a 1-form in place.
void hodge_in_place(Object& form, Mode mode = Mode::Auto);

/// a ^ b. Degrees above 2 give a ZeroForm.
Object wedge(const Object& a, const Object& b, Mode mode = Mode::Auto);

/// Lower an index: a_i = g_ij v^j.
Form1 covariant(const VectorField& vf, const Metric& g = Metric::identity(), Mode mode = Mode::Auto);
/// Raise an index with the pointwise inverse metric. Points where g is
/// singular become undefined.
VectorField contravariant(const Form1& form, const Metric& g = Metric::identity(), Mode mode = Mode::Auto);

/// Componentwise sum of two objects of the same kind.
Object add(const Object& a, const Object& b, Mode mode = Mode::Auto);
/// Componentwise multiple.
Object scale(double factor, const Object& a, Mode mode = Mode::Auto);

/// Partial derivative of grid values along one axis with the stencil
/// described at ext_d.
std::vector<double> partial(const ScalarField& f, Var axis);

struct ZoomSpec {
    double target_x = 0.0;
    double target_y = 0.0;
    double mag = 2.0;
    std::size_t dpd = 9;
    bool inset = true;
    double insize = 0.3;

    /// Throws Error on out-of-range parameters.
    void validate() const;
};

/// Where a zoomed child sits in its parent figure.
struct InsetViewport {
    double anchor_x = 0.0;  ///< target, plot units
    double anchor_y = 0.0;
    double frac_x = 0.5;  ///< target in parent axes fraction [0, 1]
    double frac_y = 0.5;
    double size = 0.3;  ///< inset side as a fraction of the parent side
    Axis window_x;
    Axis window_y;
};

struct Zoomed {
    Object object;
    InsetViewport viewport;
    std::vector<std::string> warnings;
};

/// Re-evaluate the object's expressions on a dpd x dpd window centred on the
/// target with half-width insize * (parent half-extent) / mag, so the inset
/// shows its window at magnification mag.
Zoomed zoom(const Object& obj, const ZoomSpec& spec);

/// Local derivative field over the zoom window: D(p) = F(p) - F(target).
Zoomed deriv(const VectorField& vf, const ZoomSpec& spec);
/// Projection of D onto the radial direction from the target.
Zoomed div(const VectorField& vf, const ZoomSpec& spec);
/// Projection of D onto the tangential direction around the target.
Zoomed curl(const VectorField& vf, const ZoomSpec& spec);

}  // namespace dform
