#include "qls/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <vector>

#include "qls/errors.hpp"

namespace qls {
namespace {

struct Node {
    virtual ~Node() = default;
    virtual double eval(double s) const = 0;
};
using NodePtr = std::unique_ptr<Node>;

struct Const : Node {
    double v;
    explicit Const(double x) : v(x) {}
    double eval(double) const override { return v; }
};
struct Var : Node {
    double eval(double s) const override { return s; }
};
struct Unary : Node {
    double (*fn)(double);
    NodePtr arg;
    Unary(double (*f)(double), NodePtr a) : fn(f), arg(std::move(a)) {}
    double eval(double s) const override { return fn(arg->eval(s)); }
};
struct Binary : Node {
    char op;
    NodePtr lhs, rhs;
    Binary(char o, NodePtr l, NodePtr r) : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
    double eval(double s) const override {
        double a = lhs->eval(s), b = rhs->eval(s);
        switch (op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/': return a / b;
            default: return std::pow(a, b);
        }
    }
};

struct Parser {
    const std::string& text;
    size_t pos = 0;

    explicit Parser(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool peek(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }
    bool accept(char c) {
        if (peek(c)) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c))
            throw validation_error(std::string("expression: expected '") + c +
                                   "' at position " + std::to_string(pos));
    }

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos != text.size())
            throw validation_error("expression: trailing input at position " +
                                   std::to_string(pos));
        return e;
    }

    NodePtr expr() { // + -
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = std::make_unique<Binary>('+', std::move(lhs), term());
            else if (accept('-')) lhs = std::make_unique<Binary>('-', std::move(lhs), term());
            else return lhs;
        }
    }
    NodePtr term() { // * /
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = std::make_unique<Binary>('*', std::move(lhs), unary());
            else if (accept('/')) lhs = std::make_unique<Binary>('/', std::move(lhs), unary());
            else return lhs;
        }
    }
    NodePtr unary() {
        if (accept('-'))
            return std::make_unique<Binary>('-', std::make_unique<Const>(0.0), unary());
        accept('+');
        return power();
    }
    NodePtr power() { // right-associative ^
        NodePtr base = atom();
        if (accept('^'))
            return std::make_unique<Binary>('^', std::move(base), unary());
        return base;
    }
    NodePtr atom() {
        skip_ws();
        if (pos >= text.size()) throw validation_error("expression: unexpected end");
        char c = text[pos];
        if (c == '(') {
            ++pos;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            double v = std::strtod(text.c_str() + pos, &end);
            pos = static_cast<size_t>(end - text.c_str());
            return std::make_unique<Const>(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos;
            while (pos < text.size() &&
                   std::isalnum(static_cast<unsigned char>(text[pos])))
                ++pos;
            std::string name = text.substr(start, pos - start);
            if (name == "s") return std::make_unique<Var>();
            if (name == "pi") return std::make_unique<Const>(M_PI);
            double (*fn)(double) = nullptr;
            if (name == "sqrt") fn = std::sqrt;
            else if (name == "atan") fn = std::atan;
            else if (name == "sin") fn = std::sin;
            else if (name == "cos") fn = std::cos;
            else if (name == "exp") fn = std::exp;
            else throw validation_error("expression: unknown identifier '" + name + "'");
            expect('(');
            NodePtr a = expr();
            expect(')');
            return std::make_unique<Unary>(fn, std::move(a));
        }
        throw validation_error(std::string("expression: unexpected character '") + c + "'");
    }
};

} // namespace

std::function<double(double)> compile_expression(const std::string& text) {
    Parser p(text);
    std::shared_ptr<Node> root(p.parse().release());
    return [root](double s) { return root->eval(s); };
}

} // namespace qls
