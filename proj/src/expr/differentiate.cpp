#include <cmath>

#include "dform/expr.hpp"

namespace dform {
namespace {

Expr c(double v) { return Expr::constant(v); }

Expr d(const Expr& e, Var v);

Expr d_unary(const Expr& e, Var v) {
    const Expr& f = e.arg();
    const Expr df = d(f, v);
    switch (e.func()) {
        case Func::Neg: return -df;
        case Func::Sin: return apply(Func::Cos, f) * df;
        case Func::Cos: return -(apply(Func::Sin, f) * df);
        case Func::Tan: return df / pow(apply(Func::Cos, f), c(2));
        case Func::Sinh: return apply(Func::Cosh, f) * df;
        case Func::Cosh: return apply(Func::Sinh, f) * df;
        case Func::Tanh: return df / pow(apply(Func::Cosh, f), c(2));
        case Func::Exp: return e * df;
        case Func::Ln: return df / f;
        case Func::Log10: return df / (f * c(std::log(10.0)));
        case Func::Sqrt: return df / (c(2) * e);
        // sign(f) as f/|f|: undefined (0/0) at f == 0.
        case Func::Abs: return f / e * df;
    }
    return c(0);
}

Expr d_pow(const Expr& e, Var v) {
    const Expr& base = e.lhs();
    const Expr& exponent = e.rhs();
    if (exponent.is_constant()) {
        return exponent * pow(base, simplify(exponent - c(1))) * d(base, v);
    }
    if (base.is_constant()) {
        const Expr log_base = base.constant_name() == "e" ? c(1) : apply(Func::Ln, base);
        return e * log_base * d(exponent, v);
    }
    // f^g = exp(g ln f)
    return e * (d(exponent, v) * apply(Func::Ln, base) + exponent * d(base, v) / base);
}

Expr d(const Expr& e, Var v) {
    switch (e.kind()) {
        case Expr::Kind::Constant:
            return c(0);
        case Expr::Kind::Variable:
            return c(e.var() == v ? 1.0 : 0.0);
        case Expr::Kind::Unary:
            return d_unary(e, v);
        case Expr::Kind::Binary: {
            const Expr& f = e.lhs();
            const Expr& g = e.rhs();
            switch (e.op()) {
                case BinOp::Add: return d(f, v) + d(g, v);
                case BinOp::Sub: return d(f, v) - d(g, v);
                case BinOp::Mul: return d(f, v) * g + f * d(g, v);
                // f g^-1 by the product and power rules, matching how
                // simplify() represents quotients.
                case BinOp::Div: return d(f, v) / g - f * d(g, v) / pow(g, c(2));
                case BinOp::Pow: return d_pow(e, v);
            }
        }
    }
    return c(0);
}

}  // namespace

Expr differentiate(const Expr& e, Var v) { return simplify(d(simplify(e), v)); }

}  // namespace dform
