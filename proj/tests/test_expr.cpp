#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "dform/expr.hpp"
#include "support/corpus.hpp"
#include "support/random_expr.hpp"

using namespace dform;
using dform::testing::close;
using dform::testing::RandomExpr;

namespace {

const Expr x = var_x();
const Expr y = var_y();

const std::vector<std::string>& kCorpus = dform::testing::kDerivativeCorpus;

double central_difference(const Expr& f, Var v, double px, double py, double h) {
    if (v == Var::X) return (f.evaluate(px + h, py) - f.evaluate(px - h, py)) / (2 * h);
    return (f.evaluate(px, py + h) - f.evaluate(px, py - h)) / (2 * h);
}

ParseError parse_error(const std::string& src) {
    try {
        parse(src);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a parse error for '" << src << "'");
    return ParseError("", 0, "");
}

}  // namespace

TEST_CASE("parse builds the expected trees") {
    CHECK(parse("y*sin(x)") == y * apply(Func::Sin, x));
    CHECK(parse("0") == constant(0));
    CHECK(parse("x^2*y - e^(-x)") ==
          pow(x, constant(2)) * y - pow(Expr::named("e"), -x));
    CHECK(parse("x^2*y - e^(-x)").evaluate(1, 1) == doctest::Approx(1.0 - std::exp(-1.0)));
    CHECK(parse("  x **  2 ") == pow(x, constant(2)));
    CHECK(parse("2^3^2").evaluate(0, 0) == 512.0);  // right-associative
    CHECK(parse("8/4/2").evaluate(0, 0) == 1.0);
    CHECK(parse("1.5e2 + .5").evaluate(0, 0) == 150.5);
    CHECK(parse("pi").value() == std::numbers::pi);
    // Negation binds to the immediately following base.
    CHECK(parse("-x^2") == pow(-x, constant(2)));
    CHECK(parse("x*-y") == x * -y);
}

TEST_CASE("parse reports errors with offsets") {
    auto e = parse_error("y*sin(x");
    CHECK(e.offset() == 5);
    CHECK(e.message().find("parenthesis") != std::string::npos);

    e = parse_error("");
    CHECK(e.offset() == 0);
    CHECK(e.message().find("empty") != std::string::npos);

    e = parse_error("x + foo(y)");
    CHECK(e.offset() == 4);
    CHECK(e.token() == "foo");

    e = parse_error("y sin(x)");
    CHECK(e.offset() == 2);
    CHECK(e.message().find("implicit multiplication") != std::string::npos);

    e = parse_error("2x");
    CHECK(e.offset() == 1);

    e = parse_error("x)");
    CHECK(e.offset() == 1);

    e = parse_error("log(x)");
    CHECK(e.message().find("ln") != std::string::npos);

    e = parse_error("x+");
    CHECK(e.offset() == 1);

    e = parse_error("t*x");
    CHECK(e.token() == "t");

    e = parse_error("x # y");
    CHECK(e.offset() == 2);

    e = parse_error("sin x");
    CHECK(e.offset() == 0);
}

TEST_CASE("evaluate follows IEEE semantics") {
    CHECK(parse("y*sin(x)").evaluate(std::numbers::pi / 2, 2) == 2.0);
    // e^0 / 0 is a division by zero: +inf. Its derivative is inf * 0: NaN.
    const Expr yukawa = parse("exp(-sqrt(x^2+y^2))/sqrt(x^2+y^2)");
    CHECK(std::isinf(yukawa.evaluate(0, 0)));
    CHECK(std::isnan(differentiate(yukawa, Var::X).evaluate(0, 0)));
    CHECK(std::isnan(parse("sqrt(x^2+y^2)/sqrt(x^2+y^2)").evaluate(0, 0)));
    CHECK(std::isnan(parse("ln(x)").evaluate(-1, 0)));
    CHECK(std::isinf(parse("1/x").evaluate(0, 0)));
    CHECK(parse("5").evaluate(17, -3) == 5.0);
}

TEST_CASE("differentiate known derivatives") {
    CHECK(differentiate(parse("x^2*y"), Var::X) == simplify(parse("2*x*y")));
    CHECK(differentiate(parse("y*sin(x)"), Var::Y) == simplify(parse("sin(x)")));
    CHECK(differentiate(parse("x"), Var::Y) == constant(0));
    CHECK(differentiate(parse("pi*y"), Var::Y) == Expr::named("pi"));

    const Expr yukawa = parse("exp(-sqrt(x^2+y^2))/sqrt(x^2+y^2)");
    const double fd = central_difference(yukawa, Var::X, 1, 0, 1e-5);
    const double exact = differentiate(yukawa, Var::X).evaluate(1, 0);
    CHECK(std::fabs(exact - fd) <= 1e-6 * std::fabs(fd));
    // -(e^-r / r)(1 + 1/r) x / r at r = 1
    CHECK(exact == doctest::Approx(-2.0 * std::exp(-1.0)).epsilon(1e-14));

    // abs' is f/|f|: undefined at the kink.
    CHECK(std::isnan(differentiate(parse("abs(x)"), Var::X).evaluate(0, 0)));
    CHECK(differentiate(parse("abs(x)"), Var::X).evaluate(-2, 0) == -1.0);
}

TEST_CASE("differentiate agrees with central differences on the corpus") {
    RandomExpr rng(7);
    for (const auto& src : kCorpus) {
        const Expr f = parse(src);
        const Expr fx = differentiate(f, Var::X);
        const Expr fy = differentiate(f, Var::Y);
        int checked = 0;
        while (checked < 100) {
            const double px = rng.uniform(0.3, 2.5);
            const double py = rng.uniform(0.3, 2.5);
            if (std::fabs(px - py) < 1e-2) continue;
            for (auto [v, df] : {std::pair{Var::X, fx}, std::pair{Var::Y, fy}}) {
                const double fd = central_difference(f, v, px, py, 1e-5);
                const double exact = df.evaluate(px, py);
                INFO(src << " d/d" << name_of(v) << " at (" << px << ", " << py << ") = " << to_string(df));
                CHECK(close(exact, fd, 1e-5));
            }
            ++checked;
        }
    }
}

TEST_CASE("differentiate is linear") {
    RandomExpr rng(11);
    for (int i = 0; i < 30; ++i) {
        const Expr f = rng(3);
        const Expr g = rng(3);
        const double a = rng.pick(-4, 4) / 2.0;
        const double b = rng.pick(-4, 4) / 2.0;
        for (Var v : {Var::X, Var::Y}) {
            const Expr lhs = differentiate(constant(a) * f + constant(b) * g, v);
            const Expr df = differentiate(f, v);
            const Expr dg = differentiate(g, v);
            for (int k = 0; k < 10; ++k) {
                const double px = rng.uniform(-2, 2);
                const double py = rng.uniform(-2, 2);
                const double expected = a * df.evaluate(px, py) + b * dg.evaluate(px, py);
                const double got = lhs.evaluate(px, py);
                if (!std::isfinite(expected)) continue;
                CHECK(close(got, expected, 1e-9));
            }
        }
    }
}

TEST_CASE("mixed partials coincide exactly") {
    RandomExpr rng(3);
    std::vector<Expr> phis;
    for (const char* src : {"x^2*y + sin(x*y)", "exp(x)*cos(y)", "ln(1+x^2+y^2)",
                            "sqrt(1+x^2*y^2)", "tan(x+y)*x", "(x+y)^3", "x/(2+cos(y))"}) {
        phis.push_back(parse(src));
    }
    for (int i = 0; i < 20; ++i) phis.push_back(rng(3));
    for (const auto& phi : phis) {
        const Expr mixed = simplify(differentiate(differentiate(phi, Var::X), Var::Y) -
                                    differentiate(differentiate(phi, Var::Y), Var::X));
        INFO(to_string(phi));
        CHECK(mixed == constant(0));
    }
}

TEST_CASE("simplify folds constants and removes identities") {
    CHECK(simplify(constant(0) * apply(Func::Sin, x)) == constant(0));
    CHECK(simplify(constant(2) + constant(3)) == constant(5));
    CHECK(simplify(x + constant(0)) == x);
    CHECK(simplify(x * constant(1)) == x);
    CHECK(simplify(pow(x, constant(1))) == x);
    CHECK(simplify(pow(x, constant(0))) == constant(1));
    CHECK(simplify(x - x) == constant(0));
    CHECK(simplify(x * x) == pow(x, constant(2)));
    CHECK(simplify(constant(1) / constant(0)) != constant(INFINITY));  // never folds to inf
}

TEST_CASE("simplify preserves values on random trees") {
    RandomExpr rng(5);
    int compared = 0;
    for (int i = 0; i < 50; ++i) {
        const Expr t = rng.wild(4);
        const Expr s = simplify(t);
        for (int k = 0; k < 20; ++k) {
            const double px = rng.uniform(-3, 3);
            const double py = rng.uniform(-3, 3);
            const double a = t.evaluate(px, py);
            const double b = s.evaluate(px, py);
            if (!std::isfinite(a) || !std::isfinite(b)) continue;
            INFO(to_string(t) << "  ->  " << to_string(s));
            CHECK(close(a, b, 1e-9));
            ++compared;
        }
    }
    CHECK(compared > 500);
}

TEST_CASE("simplify is idempotent and printing round-trips") {
    RandomExpr rng(9);
    for (int i = 0; i < 200; ++i) {
        const Expr t = i % 2 ? rng.wild(4) : rng(4);
        const Expr s = simplify(t);
        INFO(to_string(t));
        CHECK(simplify(s) == s);
        CHECK(simplify(parse(to_string(t))) == s);
        CHECK(simplify(parse(to_string(s))) == s);
    }
    for (const auto& src : kCorpus) {
        const Expr s = simplify(parse(src));
        CHECK(simplify(parse(to_string(s))) == s);
    }
}
