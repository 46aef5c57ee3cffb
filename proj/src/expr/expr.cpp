#include "dform/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>

namespace dform {

struct Expr::Node {
    Kind kind;
    double value = 0.0;
    std::string_view name;  // named constants only; points at a literal
    Var var = Var::X;
    Func func = Func::Neg;
    BinOp op = BinOp::Add;
    Expr a;
    Expr b;
    std::size_t size = 1;
};

namespace {

const std::shared_ptr<const Expr::Node>& zero_node() {
    static const auto node = [] {
        auto n = std::make_shared<Expr::Node>();
        n->kind = Expr::Kind::Constant;
        return std::shared_ptr<const Expr::Node>(n);
    }();
    return node;
}

constexpr std::array<std::string_view, 12> kFuncNames = {
    "neg", "sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "ln", "log10", "sqrt", "abs",
};

}  // namespace

std::string_view name_of(Func f) { return kFuncNames[static_cast<std::size_t>(f)]; }
std::string_view name_of(Var v) { return v == Var::X ? "x" : "y"; }

// Null node_ stands for the constant 0; Node's own children default to it.
Expr::Expr() : node_(nullptr) {}

Expr Expr::constant(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::named(std::string_view name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    if (name == "pi") {
        n->name = "pi";
        n->value = std::numbers::pi;
    } else if (name == "e") {
        n->name = "e";
        n->value = std::numbers::e;
    } else {
        throw Error("unknown named constant '" + std::string(name) + "'");
    }
    return Expr(std::move(n));
}

Expr Expr::variable(Var v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->var = v;
    return Expr(std::move(n));
}

Expr Expr::unary(Func f, Expr arg) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Unary;
    n->func = f;
    n->size = 1 + arg.size();
    n->a = std::move(arg);
    return Expr(std::move(n));
}

Expr Expr::binary(BinOp op, Expr lhs, Expr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Binary;
    n->op = op;
    n->size = 1 + lhs.size() + rhs.size();
    n->a = std::move(lhs);
    n->b = std::move(rhs);
    return Expr(std::move(n));
}

#define DFORM_NODE (node_ ? *node_ : *zero_node())

Expr::Kind Expr::kind() const { return DFORM_NODE.kind; }
bool Expr::is_named() const { return kind() == Kind::Constant && !DFORM_NODE.name.empty(); }
double Expr::value() const { return DFORM_NODE.value; }
std::string_view Expr::constant_name() const { return DFORM_NODE.name; }
Var Expr::var() const { return DFORM_NODE.var; }
Func Expr::func() const { return DFORM_NODE.func; }
BinOp Expr::op() const { return DFORM_NODE.op; }
const Expr& Expr::arg() const { return DFORM_NODE.a; }
const Expr& Expr::lhs() const { return DFORM_NODE.a; }
const Expr& Expr::rhs() const { return DFORM_NODE.b; }
std::size_t Expr::size() const { return DFORM_NODE.size; }

#undef DFORM_NODE

double Expr::evaluate(double x, double y) const {
    if (!node_) return 0.0;
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Constant:
            return n.value;
        case Kind::Variable:
            return n.var == Var::X ? x : y;
        case Kind::Unary: {
            const double a = n.a.evaluate(x, y);
            switch (n.func) {
                case Func::Neg: return -a;
                case Func::Sin: return std::sin(a);
                case Func::Cos: return std::cos(a);
                case Func::Tan: return std::tan(a);
                case Func::Sinh: return std::sinh(a);
                case Func::Cosh: return std::cosh(a);
                case Func::Tanh: return std::tanh(a);
                case Func::Exp: return std::exp(a);
                case Func::Ln: return std::log(a);
                case Func::Log10: return std::log10(a);
                case Func::Sqrt: return std::sqrt(a);
                case Func::Abs: return std::fabs(a);
            }
            break;
        }
        case Kind::Binary: {
            const double a = n.a.evaluate(x, y);
            const double b = n.b.evaluate(x, y);
            switch (n.op) {
                case BinOp::Add: return a + b;
                case BinOp::Sub: return a - b;
                case BinOp::Mul: return a * b;
                case BinOp::Div: return a / b;
                case BinOp::Pow: return std::pow(a, b);
            }
            break;
        }
    }
    return std::nan("");
}

namespace {

int compare_values(double a, double b) {
    const bool an = std::isnan(a);
    const bool bn = std::isnan(b);
    if (an || bn) return an == bn ? 0 : (an ? 1 : -1);
    if (a < b) return -1;
    if (a > b) return 1;
    // Distinguish -0.0 from 0.0 so the order stays consistent with evaluation.
    const bool as = std::signbit(a);
    const bool bs = std::signbit(b);
    return as == bs ? 0 : (as ? -1 : 1);
}

template <typename T>
int compare_enum(T a, T b) {
    return a < b ? -1 : (a > b ? 1 : 0);
}

}  // namespace

int compare(const Expr& a, const Expr& b) {
    if (int c = compare_enum(a.kind(), b.kind())) return c;
    switch (a.kind()) {
        case Expr::Kind::Constant: {
            if (int c = compare_values(a.value(), b.value())) return c;
            return a.constant_name().compare(b.constant_name()) < 0
                       ? -1
                       : (a.constant_name() == b.constant_name() ? 0 : 1);
        }
        case Expr::Kind::Variable:
            return compare_enum(a.var(), b.var());
        case Expr::Kind::Unary:
            if (int c = compare_enum(a.func(), b.func())) return c;
            return compare(a.arg(), b.arg());
        case Expr::Kind::Binary:
            if (int c = compare_enum(a.op(), b.op())) return c;
            if (int c = compare(a.lhs(), b.lhs())) return c;
            return compare(a.rhs(), b.rhs());
    }
    return 0;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(BinOp::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(BinOp::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(BinOp::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(BinOp::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(Func::Neg, a); }
Expr pow(const Expr& base, const Expr& exponent) { return Expr::binary(BinOp::Pow, base, exponent); }
Expr apply(Func f, const Expr& arg) { return Expr::unary(f, arg); }

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding strength of the printed form. Atoms bind tightest.
constexpr int kSum = 1;
constexpr int kProduct = 2;
constexpr int kPower = 3;
constexpr int kNegation = 4;
constexpr int kAtom = 5;

bool is_negative_constant(const Expr& e) {
    return e.is_constant() && !e.is_named() && std::signbit(e.value()) && !std::isnan(e.value());
}

int strength(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Constant:
            return is_negative_constant(e) ? kNegation : kAtom;
        case Expr::Kind::Variable:
            return kAtom;
        case Expr::Kind::Unary:
            return e.func() == Func::Neg ? kNegation : kAtom;
        case Expr::Kind::Binary:
            switch (e.op()) {
                case BinOp::Add:
                case BinOp::Sub: return kSum;
                case BinOp::Mul:
                case BinOp::Div: return kProduct;
                case BinOp::Pow: return kPower;
            }
    }
    return kAtom;
}

void format_number(double v, std::string& out) {
    if (std::isnan(v)) {
        out += "(0/0)";
        return;
    }
    if (std::isinf(v)) {
        out += v > 0 ? "1e999" : "-1e999";
        return;
    }
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), end);
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
    if (wrap) out += '(';
    print(e, out);
    if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
    switch (e.kind()) {
        case Expr::Kind::Constant:
            if (e.is_named()) {
                out += e.constant_name();
            } else {
                format_number(e.value(), out);
            }
            return;
        case Expr::Kind::Variable:
            out += name_of(e.var());
            return;
        case Expr::Kind::Unary:
            if (e.func() == Func::Neg) {
                out += '-';
                print_wrapped(e.arg(), strength(e.arg()) != kAtom, out);
            } else {
                out += name_of(e.func());
                out += '(';
                print(e.arg(), out);
                out += ')';
            }
            return;
        case Expr::Kind::Binary: {
            const int ls = strength(e.lhs());
            const int rs = strength(e.rhs());
            switch (e.op()) {
                case BinOp::Add:
                case BinOp::Sub:
                    print_wrapped(e.lhs(), ls < kSum, out);
                    out += e.op() == BinOp::Add ? '+' : '-';
                    print_wrapped(e.rhs(), rs <= kSum || rs == kNegation, out);
                    return;
                case BinOp::Mul:
                case BinOp::Div:
                    print_wrapped(e.lhs(), ls < kProduct, out);
                    out += e.op() == BinOp::Mul ? '*' : '/';
                    print_wrapped(e.rhs(), rs <= kProduct || rs == kNegation, out);
                    return;
                case BinOp::Pow:
                    print_wrapped(e.lhs(), ls < kAtom, out);
                    out += '^';
                    print_wrapped(e.rhs(), rs < kPower || rs == kNegation, out);
                    return;
            }
        }
    }
}

}  // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

}  // namespace dform
