#include "cadmin/expr.hpp"

#include <cctype>

namespace cadmin {

namespace {

struct SNode {
    std::string atom;  // empty for lists
    std::vector<SNode> items;
    std::size_t offset = 0;
    bool is_list() const { return atom.empty(); }
};

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    SNode read_all() {
        SNode n = read();
        skip_space();
        if (pos_ != text_.size())
            throw ParseError("trailing input", pos_);
        return n;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    SNode read() {
        skip_space();
        if (pos_ >= text_.size())
            throw ParseError("unexpected end of input", pos_);
        SNode n;
        n.offset = pos_;
        if (text_[pos_] == '(') {
            ++pos_;
            for (;;) {
                skip_space();
                if (pos_ >= text_.size())
                    throw ParseError("unclosed parenthesis", n.offset);
                if (text_[pos_] == ')') {
                    ++pos_;
                    return n;
                }
                n.items.push_back(read());
            }
        }
        if (text_[pos_] == ')')
            throw ParseError("unexpected ')'", pos_);
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
               !std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        n.atom = std::string(text_.substr(start, pos_ - start));
        return n;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

Rational to_rational(const SNode& n) {
    if (n.is_list())
        throw ParseError("expected a number", n.offset);
    try {
        return parse_rational(n.atom);
    } catch (const std::invalid_argument&) {
        throw ParseError("bad number '" + n.atom + "'", n.offset);
    }
}

Formula to_formula(const SNode& n);

Expr to_expr(const SNode& n) {
    if (!n.is_list()) {
        const std::string& a = n.atom;
        if (a.size() > 1 && a[0] == 'x') {
            int k = 0;
            for (std::size_t i = 1; i < a.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(a[i])))
                    throw ParseError("bad variable '" + a + "'", n.offset);
                k = k * 10 + (a[i] - '0');
                if (k > 1000000)
                    throw ParseError("variable index too large", n.offset);
            }
            if (k < 1)
                throw ParseError("variable index must be positive", n.offset);
            return Expr::var(k);
        }
        return Expr::constant(to_rational(n));
    }
    if (n.items.empty() || n.items[0].is_list())
        throw ParseError("expected an operator", n.offset);
    const std::string& op = n.items[0].atom;
    std::size_t argc = n.items.size() - 1;
    auto arity = [&](std::size_t k) {
        if (argc != k)
            throw ParseError("'" + op + "' takes " + std::to_string(k) + " arguments", n.offset);
    };
    auto arg = [&](std::size_t i) { return to_expr(n.items[i + 1]); };

    if (op == "neg") {
        arity(1);
        return Expr::neg(arg(0));
    }
    if (op == "add" || op == "mul") {
        if (argc < 2)
            throw ParseError("'" + op + "' takes at least 2 arguments", n.offset);
        Expr acc = arg(0);
        for (std::size_t i = 1; i < argc; ++i)
            acc = op == "add" ? Expr::add(acc, arg(i)) : Expr::mul(acc, arg(i));
        return acc;
    }
    if (op == "sub") {
        arity(2);
        return Expr::sub(arg(0), arg(1));
    }
    if (op == "div") {
        arity(2);
        return Expr::div(arg(0), arg(1));
    }
    if (op == "pow") {
        arity(2);
        Rational e = to_rational(n.items[2]);
        if (e.get_den() != 1 || e < 0 || e > 10000)
            throw ParseError("exponent must be a small nonnegative integer", n.items[2].offset);
        return Expr::pow(arg(0), static_cast<unsigned>(e.get_num().get_ui()));
    }
    if (op == "sqrt") {
        arity(1);
        return Expr::sqrt(arg(0));
    }
    if (op == "piecewise") {
        std::vector<std::pair<Formula, Expr>> pieces;
        std::optional<Expr> otherwise;
        for (std::size_t i = 1; i < n.items.size(); ++i) {
            const SNode& piece = n.items[i];
            if (!piece.is_list() || piece.items.size() != 2)
                throw ParseError("piece must be (guard value)", piece.offset);
            if (otherwise)
                throw ParseError("'else' must be the last piece", piece.offset);
            if (!piece.items[0].is_list() && piece.items[0].atom == "else")
                otherwise = to_expr(piece.items[1]);
            else
                pieces.emplace_back(to_formula(piece.items[0]), to_expr(piece.items[1]));
        }
        if (pieces.empty() && !otherwise)
            throw ParseError("empty piecewise", n.offset);
        return Expr::piecewise(std::move(pieces), std::move(otherwise));
    }
    if (op == "root") {
        arity(3);
        const SNode& poly = n.items[1];
        if (!poly.is_list() || poly.items.empty() || poly.items[0].atom != "poly")
            throw ParseError("expected (poly c0 c1 ...)", poly.offset);
        std::vector<Rational> coeffs;
        for (std::size_t i = 1; i < poly.items.size(); ++i)
            coeffs.push_back(to_rational(poly.items[i]));
        try {
            return Expr::root(AlgebraicNumber(UniPoly(std::move(coeffs)), to_rational(n.items[2]),
                                              to_rational(n.items[3])));
        } catch (const ParseError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ParseError(std::string("bad root: ") + e.what(), n.offset);
        }
    }
    throw ParseError("unknown operator '" + op + "'", n.offset);
}

Formula to_formula(const SNode& n) {
    if (!n.is_list()) {
        if (n.atom == "true")
            return Formula::truth(true);
        if (n.atom == "false")
            return Formula::truth(false);
        throw ParseError("expected a formula", n.offset);
    }
    if (n.items.empty() || n.items[0].is_list())
        throw ParseError("expected a connective or relation", n.offset);
    const std::string& op = n.items[0].atom;
    static const std::pair<const char*, Rel> rels[] = {
        {"lt", Rel::Lt}, {"le", Rel::Le}, {"eq", Rel::Eq}, {"ge", Rel::Ge}, {"gt", Rel::Gt}};
    for (const auto& [name, rel] : rels) {
        if (op == name) {
            if (n.items.size() != 3)
                throw ParseError("'" + op + "' takes 2 arguments", n.offset);
            return Formula::atom(rel, to_expr(n.items[1]), to_expr(n.items[2]));
        }
    }
    if (op == "not") {
        if (n.items.size() != 2)
            throw ParseError("'not' takes 1 argument", n.offset);
        return Formula::negation(to_formula(n.items[1]));
    }
    if (op == "and" || op == "or") {
        std::vector<Formula> parts;
        for (std::size_t i = 1; i < n.items.size(); ++i)
            parts.push_back(to_formula(n.items[i]));
        return op == "and" ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
    throw ParseError("unknown connective '" + op + "'", n.offset);
}

}  // namespace

Expr parse_expr(std::string_view text) { return to_expr(Reader(text).read_all()); }

Formula parse_formula(std::string_view text) { return to_formula(Reader(text).read_all()); }

}  // namespace cadmin
