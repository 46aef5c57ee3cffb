#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "dform/fields.hpp"

using namespace dform;

namespace {

const Grid2 kWindow = Grid2::square(-5, 5, 31);

// Coordinates from the linspace definition, independent of Axis::at.
double linspace(double a, double b, std::size_t n, std::size_t i) {
    return a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

TEST_CASE("grid coordinates and layout") {
    const Grid2 g({-1, 3, 5}, {0, 1, 3});
    CHECK(g.size() == 15);
    CHECK(g.x_at(0) == -1);
    CHECK(g.x_at(4) == 3);
    CHECK(g.x_at(2) == 1);
    CHECK(g.y_at(1) == 0.5);
    CHECK(g.index(2, 1) == 7);
    for (std::size_t i = 0; i < 31; ++i) {
        CHECK(kWindow.x_at(i) == doctest::Approx(linspace(-5, 5, 31, i)).epsilon(1e-15));
        // Symmetric about zero to the bit.
        CHECK(kWindow.x_at(i) == -kWindow.x_at(30 - i));
    }
    CHECK(kWindow.x_at(15) == 0.0);

    CHECK_THROWS_AS(Grid2({0, 1, 1}, {0, 1, 2}), Error);
    CHECK_THROWS_AS(Grid2({1, 0, 3}, {0, 1, 2}), Error);
    CHECK_THROWS_AS(Grid2({0, INFINITY, 3}, {0, 1, 2}), Error);

    const std::vector<double> xs{0, 0.25, 0.5, 0.75, 1};
    const std::vector<double> ys{-2, 0, 2};
    const Grid2 c = Grid2::from_coordinates(xs, ys);
    CHECK(c.x() == Axis{0, 1, 5});
    CHECK(c.y() == Axis{-2, 2, 3});
    const std::vector<double> bad{0, 0.3, 1};
    CHECK_THROWS_AS(Grid2::from_coordinates(bad, ys), Error);
}

TEST_CASE("point classification") {
    CHECK(classify(0.0) == PointKind::Finite);
    CHECK(classify(1e15) == PointKind::Finite);
    CHECK(classify(-1.0000001e15) == PointKind::Infinite);
    CHECK(classify(INFINITY) == PointKind::Infinite);
    CHECK(classify(-INFINITY) == PointKind::Infinite);
    CHECK(classify(std::nan("")) == PointKind::Undefined);
    CHECK(classify(50.0, 10.0) == PointKind::Infinite);
    CHECK(name_of(PointKind::Undefined) == "undefined");
}

TEST_CASE("make_field: the double-spiral 1-form") {
    const Object obj = make_field(Kind::Form1, kWindow, {"y*sin(x)", "-x*cos(y)"});
    REQUIRE(kind_of(obj) == Kind::Form1);
    const auto& a = std::get<Form1>(obj);
    CHECK(a.grid() == kWindow);
    CHECK(a.dx().masked_count() == 0);
    for (std::size_t i = 0; i < 31; ++i) {
        for (std::size_t j = 0; j < 31; ++j) {
            const double x = kWindow.x_at(i);
            const double y = kWindow.y_at(j);
            CHECK(a.dx().at(i, j) == doctest::Approx(y * std::sin(x)).epsilon(1e-14));
            CHECK(a.dy().at(i, j) == doctest::Approx(-x * std::cos(y)).epsilon(1e-14));
        }
    }
}

TEST_CASE("make_field: zero and singular 0-forms") {
    const auto zero = std::get<Form0>(make_field(Kind::Form0, kWindow, {"0"}));
    CHECK(zero.phi.masked_count() == 0);
    for (double v : zero.phi.values()) CHECK(v == 0.0);

    // 27 points on a symmetric range put exactly one node at the origin,
    // where exp(-r)/r = 1/0.
    const Grid2 g = Grid2::square(-4, 4, 27);
    const auto phi = std::get<Form0>(make_field(Kind::Form0, g, {"exp(-sqrt(x^2+y^2))/sqrt(x^2+y^2)"}));
    CHECK(phi.phi.masked_count() == 1);
    CHECK(phi.phi.masked(g.index(13, 13)));
    CHECK(phi.phi.kind(g.index(13, 13)) == PointKind::Infinite);

    const auto und = std::get<Form0>(make_field(Kind::Form0, g, {"x/sqrt(x^2+y^2)*0 + (x*y)/(x*y)"}));
    // (x*y)/(x*y) is 0/0 on both axes: 27 + 27 - 1 points.
    CHECK(und.phi.masked_count() == 53);
    CHECK(und.phi.kind(g.index(13, 0)) == PointKind::Undefined);
}

TEST_CASE("make_field: values and errors") {
    const Grid2 g({0, 1, 2}, {0, 1, 3});
    std::vector<ComponentSpec> specs{{std::nullopt, std::vector<double>{1, 2, 3, 4, 5, 6}}};
    const auto w = std::get<Form2>(make_field(Kind::Form2, g, specs));
    CHECK(w.w.at(1, 2) == 6);
    CHECK_FALSE(w.w.expr().has_value());

    std::vector<ComponentSpec> both{{std::string("x"), std::vector<double>{9, 9, 9, 9, 9, 9}}};
    CHECK(std::get<Form2>(make_field(Kind::Form2, g, both)).w.at(1, 0) == 1.0);

    std::vector<ComponentSpec> short_values{{std::nullopt, std::vector<double>{1, 2}}};
    CHECK_THROWS_AS(make_field(Kind::Form2, g, short_values), Error);
    std::vector<ComponentSpec> empty{{}};
    CHECK_THROWS_AS(make_field(Kind::Form2, g, empty), Error);
    CHECK_THROWS_AS(make_field(Kind::Form1, g, {"x"}), Error);
    CHECK_THROWS_AS(make_field(Kind::Form0, g, {"x +"}), ParseError);
    CHECK_THROWS_AS(kind_from_name("form3"), Error);
    CHECK(kind_from_name("vf") == Kind::VectorField);
}

TEST_CASE("give_eqn replaces values") {
    const Grid2 g = Grid2::square(-2, 2, 5);
    std::vector<ComponentSpec> arbitrary{{std::nullopt, std::vector<double>(25, 7.0)},
                                         {std::nullopt, std::vector<double>(25, -3.0)}};
    const Object vf = make_field(Kind::VectorField, g, arbitrary);
    CHECK_FALSE(has_expressions(vf));
    const std::vector<std::string> eqs{"x", "y"};
    const auto out = std::get<VectorField>(give_eqn(vf, eqs));
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(out.u().at(i, j) == g.x_at(i));
            CHECK(out.v().at(i, j) == g.y_at(j));
        }
    }

    std::vector<ComponentSpec> one{{std::nullopt, std::vector<double>(25, 0.0)}};
    const std::vector<std::string> unit{"1"};
    const auto w = std::get<Form2>(give_eqn(make_field(Kind::Form2, g, one), unit));
    for (double v : w.w.values()) CHECK(v == 1.0);

    const std::vector<std::string> too_many{"1", "2"};
    CHECK_THROWS_AS(give_eqn(make_field(Kind::Form2, g, one), too_many), Error);
}

TEST_CASE("set_density") {
    const Object obj = make_field(Kind::Form1, kWindow, {"y*sin(x)", "-x*cos(y)"});
    const Object small = set_density(obj, 7);
    CHECK(grid_of(small) == Grid2::square(-5, 5, 7));

    const Object same = set_density(obj, 31);
    const auto& a = std::get<Form1>(obj);
    const auto& b = std::get<Form1>(same);
    const auto& c = std::get<Form1>(set_density(small, 31));
    for (std::size_t k = 0; k < kWindow.size(); ++k) {
        CHECK(a.dx()[k] == b.dx()[k]);
        CHECK(a.dy()[k] == c.dy()[k]);
    }

    const auto u = std::get<VectorField>(set_density(make_field(Kind::VectorField, kWindow, {"x", "0"}), 9));
    for (std::size_t i = 0; i < 9; ++i) {
        for (std::size_t j = 0; j < 9; ++j) CHECK(u.u().at(i, j) == doctest::Approx(linspace(-5, 5, 9, i)));
    }

    const auto w = std::get<Form2>(set_density2(make_field(Kind::Form2, kWindow, {"x*y"}), 4, 6));
    CHECK(w.w.grid().nx() == 4);
    CHECK(w.w.grid().ny() == 6);
    CHECK_THROWS_AS(set_density2(obj, 4, 6), KindError);

    std::vector<ComponentSpec> values{{std::nullopt, std::vector<double>(kWindow.size(), 1.0)}};
    CHECK_THROWS_AS(set_density(make_field(Kind::Form0, kWindow, values), 5), Error);
}

TEST_CASE("log_scale") {
    const Grid2 g({0, 1, 2}, {0, 1, 2});
    std::vector<ComponentSpec> specs{{std::nullopt, std::vector<double>{10, 0, 3, -1e-3}},
                                     {std::nullopt, std::vector<double>{0, 0, -4, 2e-3}}};
    const auto out = std::get<Form1>(log_scale(make_field(Kind::Form1, g, specs)));
    CHECK(out.dx()[0] == doctest::Approx(std::log10(11.0)).epsilon(1e-15));
    CHECK(out.dy()[0] == 0.0);
    CHECK(out.dx()[1] == 0.0);
    CHECK(out.dy()[1] == 0.0);
    // |(3, -4)| = 5
    CHECK(std::hypot(out.dx()[2], out.dy()[2]) == doctest::Approx(std::log10(6.0)).epsilon(1e-15));
    const double in_angles[] = {std::atan2(-4.0, 3.0), std::atan2(2e-3, -1e-3)};
    CHECK(std::atan2(out.dy()[2], out.dx()[2]) == doctest::Approx(in_angles[0]).epsilon(1e-15));
    CHECK(std::atan2(out.dy()[3], out.dx()[3]) == doctest::Approx(in_angles[1]).epsilon(1e-15));
    CHECK_FALSE(out.dx().expr().has_value());

    std::vector<ComponentSpec> w{{std::nullopt, std::vector<double>{-100, 0, 5, INFINITY}}};
    const auto lw = std::get<Form2>(log_scale(make_field(Kind::Form2, g, w))).w;
    CHECK(lw[0] == doctest::Approx(-std::log10(101.0)));
    CHECK(lw[1] == 0.0);
    CHECK(lw[2] == doctest::Approx(std::log10(6.0)));
    CHECK(lw.kind(3) == PointKind::Infinite);

    CHECK_THROWS_AS(log_scale(make_field(Kind::Form0, g, {"x"})), KindError);
}

TEST_CASE("log_scale is monotone in magnitude and keeps direction") {
    const Object vf = make_field(Kind::VectorField, kWindow, {"x^3*y", "exp(x)-y"});
    const auto& in = std::get<VectorField>(vf);
    const auto out = std::get<VectorField>(log_scale(vf));
    for (std::size_t a = 0; a < kWindow.size(); a += 7) {
        for (std::size_t b = 0; b < kWindow.size(); b += 11) {
            const double ma = std::hypot(in.u()[a], in.v()[a]);
            const double mb = std::hypot(in.u()[b], in.v()[b]);
            const double la = std::hypot(out.u()[a], out.v()[a]);
            const double lb = std::hypot(out.u()[b], out.v()[b]);
            if (ma < mb) CHECK(la <= lb);
        }
        if (in.u()[a] != 0 || in.v()[a] != 0) {
            CHECK(std::atan2(out.v()[a], out.u()[a]) ==
                  doctest::Approx(std::atan2(in.v()[a], in.u()[a])).epsilon(1e-14));
        }
    }
}

TEST_CASE("metric sampling") {
    const Grid2 g = Grid2::square(-1, 1, 5);
    const auto id = Metric::identity().on(g);
    CHECK(id[0][3] == 1.0);
    CHECK(id[1][3] == 0.0);
    CHECK_THROWS_AS(Metric::from_strings("1", "x", "y", "1").on(g), Error);
    const auto m = Metric::from_strings("1+x^2", "0", "0", "2").on(g);
    CHECK(m[0].at(0, 2) == 2.0);

    const Grid2 other = Grid2::square(-1, 1, 4);
    const ScalarField one(other, constant(1));
    const ScalarField zero(other, constant(0));
    CHECK_THROWS_AS(Metric::from_fields(one, zero, zero, one).on(g), Error);
    CHECK(Metric::from_fields(one, zero, zero, one).on(other)[3][0] == 1.0);
}
