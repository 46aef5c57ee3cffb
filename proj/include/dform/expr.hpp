#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "dform/error.hpp"

namespace dform {

enum class Var : std::uint8_t { X, Y };

enum class Func : std::uint8_t {
    Neg,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Log10,
    Sqrt,
    Abs,
};

enum class BinOp : std::uint8_t { Add, Sub, Mul, Div, Pow };

std::string_view name_of(Func f);
std::string_view name_of(Var v);

/// Immutable expression tree over the variables x and y.
///
/// Nodes are shared between trees; copying an Expr is a reference-count
/// bump. Every Expr is well-formed by construction.
class Expr {
public:
    enum class Kind : std::uint8_t { Constant, Variable, Unary, Binary };

    /// The constant 0.
    Expr();

    static Expr constant(double value);
    /// `pi` or `e`; behaves as a constant but prints and differentiates by name.
    static Expr named(std::string_view name);
    static Expr variable(Var v);
    static Expr unary(Func f, Expr arg);
    static Expr binary(BinOp op, Expr lhs, Expr rhs);

    Kind kind() const;
    bool is_constant() const { return kind() == Kind::Constant; }
    bool is_named() const;
    /// Numeric constant value (requires is_constant()).
    double value() const;
    /// Name of a named constant; empty otherwise.
    std::string_view constant_name() const;
    Var var() const;
    Func func() const;
    BinOp op() const;
    const Expr& arg() const;
    const Expr& lhs() const;
    const Expr& rhs() const;

    /// IEEE semantics; non-finite results are data.
    double evaluate(double x, double y) const;

    /// Number of nodes in the tree.
    std::size_t size() const;

    struct Node;  // opaque

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// Total structural order. Constants order by value (NaN last), named
/// constants after plain ones of equal value.
int compare(const Expr& a, const Expr& b);

inline bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }
inline bool operator!=(const Expr& a, const Expr& b) { return compare(a, b) != 0; }

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

/// Parse an equation string. Throws ParseError.
///
/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base (('^'|'**') factor)?
///   base   := NUMBER | 'pi' | 'e' | 'x' | 'y' | FUNC '(' expr ')'
///           | '(' expr ')' | '-' base
Expr parse(std::string_view source);

/// Text that parse() reads back to a tree equal to this one up to simplify().
std::string to_string(const Expr& e);

/// Canonical normal form: constant folding, identity elimination, like-term
/// collection, flattening of sums and products. Idempotent.
Expr simplify(const Expr& e);

/// Exact symbolic partial derivative, simplified.
Expr differentiate(const Expr& e, Var v);

// Raw tree builders (no simplification).
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr apply(Func f, const Expr& arg);

inline Expr constant(double v) { return Expr::constant(v); }
inline Expr var_x() { return Expr::variable(Var::X); }
inline Expr var_y() { return Expr::variable(Var::Y); }

}  // namespace dform
