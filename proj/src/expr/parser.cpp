#include <cctype>
#include <charconv>
#include <optional>
#include <string>
#include <vector>

#include "dform/expr.hpp"

namespace dform {
namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string_view text;
    double number = 0.0;
};

std::optional<Func> function_named(std::string_view name) {
    for (auto f : {Func::Sin, Func::Cos, Func::Tan, Func::Sinh, Func::Cosh, Func::Tanh, Func::Exp,
                   Func::Ln, Func::Log10, Func::Sqrt, Func::Abs}) {
        if (name_of(f) == name) return f;
    }
    return std::nullopt;
}

bool starts_operand(Tok t) { return t == Tok::Number || t == Tok::Ident || t == Tok::LParen; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, pos_, {}});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    Token next() {
        const std::size_t start = pos_;
        const char c = src_[pos_];
        auto single = [&](Tok kind) {
            ++pos_;
            return Token{kind, start, src_.substr(start, 1)};
        };
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            return {Tok::Ident, start, src_.substr(start, pos_ - start)};
        }
        switch (c) {
            case '+': return single(Tok::Plus);
            case '-': return single(Tok::Minus);
            case '/': return single(Tok::Slash);
            case '^': return single(Tok::Caret);
            case '(': return single(Tok::LParen);
            case ')': return single(Tok::RParen);
            case '*':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                    pos_ += 2;
                    return {Tok::Caret, start, src_.substr(start, 2)};
                }
                return single(Tok::Star);
            default:
                break;
        }
        // One UTF-8 code point as the offending token.
        std::size_t len = 1;
        while (start + len < src_.size() &&
               (static_cast<unsigned char>(src_[start + len]) & 0xC0) == 0x80) {
            ++len;
        }
        throw ParseError("unexpected character", start, std::string(src_.substr(start, len)));
    }

    Token number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) {
            throw ParseError("malformed number", start, std::string(src_.substr(start, pos_ - start)));
        }
        // Exponent only when followed by digits, so "2e" is a number then an identifier.
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t probe = pos_ + 1;
            if (probe < src_.size() && (src_[probe] == '+' || src_[probe] == '-')) ++probe;
            if (probe < src_.size() && std::isdigit(static_cast<unsigned char>(src_[probe]))) {
                pos_ = probe;
                digits();
            }
        }
        const std::string_view text = src_.substr(start, pos_ - start);
        double value = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec == std::errc::result_out_of_range) {
            value = std::strtod(std::string(text).c_str(), nullptr);  // inf or subnormal/zero
        } else if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
            throw ParseError("malformed number", start, std::string(text));
        }
        return {Tok::Number, start, text, value};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    Parser(std::string_view src, std::vector<Token> tokens) : src_(src), toks_(std::move(tokens)) {}

    Expr run() {
        if (peek().kind == Tok::End) throw ParseError("empty expression", 0, "");
        Expr e = expr();
        if (peek().kind != Tok::End) trailing();
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& take() { return toks_[pos_++]; }

    // Offsets always point into the source; end-of-input errors point at the
    // last character.
    std::size_t clamp(std::size_t offset) const {
        return src_.empty() ? 0 : std::min(offset, src_.size() - 1);
    }

    [[noreturn]] void fail(const std::string& message, const Token& at) const {
        throw ParseError(message, clamp(at.offset), std::string(at.text));
    }

    [[noreturn]] void trailing() const {
        const Token& t = peek();
        if (t.kind == Tok::RParen) fail("unbalanced parenthesis: unexpected ')'", t);
        const Token& prev = toks_[pos_ - 1];
        const bool prev_ends_operand =
            prev.kind == Tok::Number || prev.kind == Tok::Ident || prev.kind == Tok::RParen;
        if (prev_ends_operand && starts_operand(t.kind)) {
            fail("implicit multiplication is not supported; insert '*' before '" +
                     std::string(t.text) + "'",
                 t);
        }
        fail("unexpected token '" + std::string(t.text) + "'", t);
    }

    Expr expr() {
        Expr lhs = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const bool add = take().kind == Tok::Plus;
            Expr rhs = term();
            lhs = Expr::binary(add ? BinOp::Add : BinOp::Sub, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Expr term() {
        Expr lhs = factor();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const bool mul = take().kind == Tok::Star;
            Expr rhs = factor();
            lhs = Expr::binary(mul ? BinOp::Mul : BinOp::Div, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Expr factor() {
        Expr b = base();
        if (peek().kind == Tok::Caret) {
            take();
            return Expr::binary(BinOp::Pow, std::move(b), factor());
        }
        return b;
    }

    Expr parenthesized(const Token& open) {
        Expr inner = expr();
        if (peek().kind != Tok::RParen) {
            if (peek().kind == Tok::End) fail("unbalanced parenthesis: '(' is never closed", open);
            trailing();
        }
        take();
        return inner;
    }

    Expr base() {
        const Token& t = take();
        switch (t.kind) {
            case Tok::Number:
                return Expr::constant(t.number);
            case Tok::Minus:
                return Expr::unary(Func::Neg, base());
            case Tok::LParen:
                return parenthesized(t);
            case Tok::Ident:
                return identifier(t);
            case Tok::End:
                --pos_;
                fail("expected an operand at end of input", toks_[pos_ - 1]);
            case Tok::RParen:
                fail("unbalanced parenthesis: unexpected ')'", t);
            default:
                fail("expected an operand before '" + std::string(t.text) + "'", t);
        }
    }

    Expr identifier(const Token& t) {
        const std::string_view name = t.text;
        if (name == "x") return Expr::variable(Var::X);
        if (name == "y") return Expr::variable(Var::Y);
        if (name == "pi" || name == "e") return Expr::named(name);
        if (auto f = function_named(name)) {
            const Token& open = peek();
            if (open.kind != Tok::LParen) fail("function '" + std::string(name) + "' needs '('", t);
            take();
            return Expr::unary(*f, parenthesized(open));
        }
        if (name == "log") fail("ambiguous function 'log'; use 'ln' or 'log10'", t);
        fail("unknown identifier '" + std::string(name) + "'", t);
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view source) {
    return Parser(source, Lexer(source).run()).run();
}

}  // namespace dform
