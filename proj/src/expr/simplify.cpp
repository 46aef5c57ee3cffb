// Normal form used by simplify().
//
// An expression is lowered to a polynomial: a map from monomials to
// coefficients, where a monomial maps canonical base expressions to constant
// exponents. Products distribute over sums; sums of equal monomials collect.
// Bases that cannot be decomposed further (function applications, powers
// with non-constant or non-integer exponents, named constants, reciprocals
// of sums) are atoms. Raising back to a tree emits terms and factors in the
// structural order, which makes the result canonical and idempotent.

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "dform/expr.hpp"

namespace dform {
namespace {

using Monomial = std::map<Expr, double, ExprLess>;

struct MonomialLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        auto ia = a.begin();
        auto ib = b.begin();
        for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
            if (int c = compare(ia->first, ib->first)) return c < 0;
            if (ia->second != ib->second) return ia->second < ib->second;
        }
        return ia == a.end() && ib != b.end();
    }
};

using Poly = std::map<Monomial, double, MonomialLess>;

Poly constant_poly(double c) {
    Poly p;
    if (c != 0.0) p[Monomial{}] = c;
    return p;
}

Poly atom_poly(const Expr& base, double exponent = 1.0) {
    Poly p;
    p[Monomial{{base, exponent}}] = 1.0;
    return p;
}

bool is_constant_poly(const Poly& p) {
    return p.empty() || (p.size() == 1 && p.begin()->first.empty());
}

double constant_of(const Poly& p) { return p.empty() ? 0.0 : p.begin()->second; }

void add_term(Poly& p, const Monomial& m, double c) {
    auto [it, inserted] = p.try_emplace(m, c);
    if (!inserted) it->second += c;
    if (it->second == 0.0) p.erase(it);
}

Poly add(Poly a, const Poly& b) {
    for (const auto& [m, c] : b) add_term(a, m, c);
    return a;
}

Poly scale(Poly p, double s) {
    if (s == 0.0) return {};
    for (auto it = p.begin(); it != p.end();) {
        it->second *= s;
        it = it->second == 0.0 ? p.erase(it) : std::next(it);
    }
    return p;
}

Monomial multiply(Monomial a, const Monomial& b) {
    for (const auto& [base, e] : b) {
        auto [it, inserted] = a.try_emplace(base, e);
        if (!inserted) {
            it->second += e;
            if (it->second == 0.0) a.erase(it);
        }
    }
    return a;
}

Poly lower(const Expr& e);
Expr raise(const Poly& p);
Poly expand_sum_factors(const Poly& p);

bool has_unit_sum_factor(const Poly& p);

bool mentions_base(const Poly& p, const Expr& base) {
    for (const auto& [m, c] : p) {
        if (m.contains(base)) return true;
    }
    return false;
}

Poly multiply_terms(const Poly& a, const Poly& b);

// A sum meeting a power of itself merges exponents instead of distributing,
// so g * g^-2 becomes g^-1.
Poly multiply(const Poly& a, const Poly& b) {
    if (a.size() > 1) {
        const Expr sum = raise(a);
        if (mentions_base(b, sum)) return multiply_terms(atom_poly(sum), b);
    }
    if (b.size() > 1) {
        const Expr sum = raise(b);
        if (mentions_base(a, sum)) return multiply_terms(a, atom_poly(sum));
    }
    return multiply_terms(a, b);
}

Poly multiply_terms(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a) {
        for (const auto& [mb, cb] : b) add_term(out, multiply(ma, mb), ca * cb);
    }
    return has_unit_sum_factor(out) ? expand_sum_factors(out) : out;
}

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

bool is_sum(const Expr& e) {
    return e.kind() == Expr::Kind::Binary && (e.op() == BinOp::Add || e.op() == BinOp::Sub);
}

bool has_unit_sum_factor(const Poly& p) {
    for (const auto& [m, c] : p) {
        for (const auto& [base, e] : m) {
            if (e == 1.0 && is_sum(base)) return true;
        }
    }
    return false;
}

// A sum raised to exactly 1 is distributed, so a sum never survives as a
// plain factor.
Poly expand_sum_factors(const Poly& p) {
    Poly out;
    for (const auto& [m, c] : p) {
        Monomial rest;
        std::vector<Expr> sums;
        for (const auto& [base, e] : m) {
            if (is_sum(base) && e == 1.0) {
                sums.push_back(base);
            } else {
                rest.emplace(base, e);
            }
        }
        Poly term;
        term[rest] = c;
        for (const auto& s : sums) term = multiply(term, lower(s));
        out = add(std::move(out), term);
    }
    return out;
}

// Monomial m / d when every factor of d divides m without changing sign.
std::optional<Monomial> divide(const Monomial& m, const Monomial& d) {
    Monomial out = m;
    for (const auto& [base, e] : d) {
        auto it = out.find(base);
        if (e <= 0.0 || it == out.end() || it->second < e) return std::nullopt;
        it->second -= e;
        if (it->second == 0.0) out.erase(it);
    }
    return out;
}

// Fold c*M*B^k*expand(B), present term by term, back into c*M*B^(k+1) for a
// sum B with k <= -1. Distribution can separate a sum from its own
// reciprocal powers; this recovers cancellations such as g*g^-4 == g^-3.
bool refold_once(Poly& p) {
    for (const auto& [m, coef] : p) {
        for (const auto& [base, k] : m) {
            if (!is_sum(base) || k > -1.0) continue;
            const Poly expansion = lower(base);
            for (const auto& [um, uc] : expansion) {
                const auto rest = divide(m, um);
                if (!rest) continue;
                const double c = coef / uc;
                bool present = true;
                for (const auto& [vm, vc] : expansion) {
                    auto it = p.find(multiply(*rest, vm));
                    if (it == p.end() || it->second != c * vc) {
                        present = false;
                        break;
                    }
                }
                if (!present) continue;
                Monomial folded = *rest;
                for (const auto& [vm, vc] : expansion) p.erase(multiply(*rest, vm));
                folded = multiply(folded, Monomial{{base, 1.0}});
                add_term(p, folded, c);
                return true;
            }
        }
    }
    return false;
}

Poly refold(Poly p) {
    while (refold_once(p)) {
    }
    return p;
}

Poly reciprocal(const Poly& p) {
    if (is_constant_poly(p)) {
        const double c = constant_of(p);
        const double r = 1.0 / c;
        if (std::isfinite(r)) return constant_poly(r);
        return atom_poly(Expr::constant(c), -1.0);
    }
    if (p.size() == 1) {
        const auto& [m, c] = *p.begin();
        Monomial inv;
        for (const auto& [base, e] : m) inv.emplace(base, -e);
        Poly out;
        out[inv] = 1.0 / c;
        return expand_sum_factors(out);
    }
    return atom_poly(raise(p), -1.0);
}

double fold(Func f, double a) {
    return Expr::unary(f, Expr::constant(a)).evaluate(0.0, 0.0);
}

Poly lower_unary(const Expr& e) {
    Poly a = lower(e.arg());
    if (e.func() == Func::Neg) return scale(std::move(a), -1.0);
    // Only exact results fold (sin(0), sqrt(4), ...); an inexact value such
    // as cos(0.75) stays symbolic so coefficient arithmetic does not round
    // differently along different derivation paths.
    if (is_constant_poly(a)) {
        const double v = fold(e.func(), constant_of(a));
        if (is_integer(v)) return constant_poly(v);
    }
    return atom_poly(Expr::unary(e.func(), raise(a)));
}

Poly lower_pow(const Expr& e) {
    Poly base = lower(e.lhs());
    Poly exponent = lower(e.rhs());
    if (is_constant_poly(exponent)) {
        const double k = constant_of(exponent);
        if (k == 0.0) return constant_poly(1.0);
        if (k == 1.0) return base;
        if (is_constant_poly(base)) {
            const double v = std::pow(constant_of(base), k);
            if (std::isfinite(v)) return constant_poly(v);
            return atom_poly(Expr::binary(BinOp::Pow, raise(base), Expr::constant(k)));
        }
        if (base.size() == 1 && is_integer(k)) {
            const auto& [m, c] = *base.begin();
            const double coef = std::pow(c, k);
            if (std::isfinite(coef) && coef != 0.0) {
                Monomial powered;
                for (const auto& [b, e2] : m) powered.emplace(b, e2 * k);
                Poly out;
                out[powered] = coef;
                return expand_sum_factors(out);
            }
        }
        return atom_poly(raise(base), k);
    }
    return atom_poly(Expr::binary(BinOp::Pow, raise(base), raise(exponent)));
}

Poly lower(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Constant:
            if (e.is_named()) return atom_poly(e);
            return constant_poly(e.value());
        case Expr::Kind::Variable:
            return atom_poly(e);
        case Expr::Kind::Unary:
            return lower_unary(e);
        case Expr::Kind::Binary:
            switch (e.op()) {
                case BinOp::Add: return refold(add(lower(e.lhs()), lower(e.rhs())));
                case BinOp::Sub: return refold(add(lower(e.lhs()), scale(lower(e.rhs()), -1.0)));
                case BinOp::Mul: return multiply(lower(e.lhs()), lower(e.rhs()));
                case BinOp::Div: return multiply(lower(e.lhs()), reciprocal(lower(e.rhs())));
                case BinOp::Pow: return lower_pow(e);
            }
    }
    return {};
}

Expr power_of(const Expr& base, double exponent) {
    if (exponent == 1.0) return base;
    return Expr::binary(BinOp::Pow, base, Expr::constant(exponent));
}

Expr product_of(const std::vector<Expr>& factors) {
    Expr out = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) out = Expr::binary(BinOp::Mul, out, factors[i]);
    return out;
}

// |coef| * monomial, sign handled by the caller.
Expr raise_monomial(const Monomial& m, double magnitude) {
    std::vector<Expr> num;
    std::vector<Expr> den;
    if (magnitude != 1.0 || m.empty()) num.push_back(Expr::constant(magnitude));
    for (const auto& [base, e] : m) {
        if (e > 0) {
            num.push_back(power_of(base, e));
        } else {
            den.push_back(power_of(base, -e));
        }
    }
    // Divide factor by factor: a product of sums in one denominator would be
    // distributed again when lowered.
    Expr out = num.empty() ? Expr::constant(1.0) : product_of(num);
    for (const auto& d : den) out = Expr::binary(BinOp::Div, out, d);
    return out;
}

Expr raise(const Poly& p) {
    if (p.empty()) return Expr::constant(0.0);
    if (is_constant_poly(p)) return Expr::constant(constant_of(p));

    // Constant term goes last.
    std::vector<std::pair<const Monomial*, double>> terms;
    for (const auto& [m, c] : p) {
        if (!m.empty()) terms.emplace_back(&m, c);
    }
    if (auto it = p.find(Monomial{}); it != p.end()) terms.emplace_back(&it->first, it->second);

    Expr out;
    bool first = true;
    for (const auto& [m, c] : terms) {
        const bool negative = std::signbit(c);
        Expr term = raise_monomial(*m, std::fabs(c));
        if (first) {
            out = negative ? Expr::unary(Func::Neg, term) : term;
            first = false;
        } else {
            out = Expr::binary(negative ? BinOp::Sub : BinOp::Add, out, term);
        }
    }
    return out;
}

}  // namespace

Expr simplify(const Expr& e) { return raise(lower(e)); }

}  // namespace dform
