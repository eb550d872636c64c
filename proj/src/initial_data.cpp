#include "kp/initial_data.hpp"

#include "kp/gkp.hpp"

#include <cmath>
#include <cstring>

namespace kp {

double u0_sym(double x, double y) {
    double r = x * x + y * y;
    double s = 1.0 / std::cosh(r);
    return 24.0 * x * s * s * std::tanh(r);
}

double u0_asym(double x, double y) {
    return 6.0 * (-2.0 * x - 3.0 * y) * std::exp(-x * x - 5.0 * y * y - 3.0 * x * y);
}

// ---- tiny recursive-descent expression parser ------------------------------

struct Expression::Node {
    enum class Kind { Num, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Fn } kind;
    double num = 0.0;
    int fn = 0; // 0 exp, 1 sech, 2 tanh, 3 sin, 4 cos
    std::unique_ptr<Node> a, b;

    double eval(double x, double y) const {
        switch (kind) {
            case Kind::Num: return num;
            case Kind::VarX: return x;
            case Kind::VarY: return y;
            case Kind::Add: return a->eval(x, y) + b->eval(x, y);
            case Kind::Sub: return a->eval(x, y) - b->eval(x, y);
            case Kind::Mul: return a->eval(x, y) * b->eval(x, y);
            case Kind::Div: return a->eval(x, y) / b->eval(x, y);
            case Kind::Pow: return std::pow(a->eval(x, y), b->eval(x, y));
            case Kind::Neg: return -a->eval(x, y);
            case Kind::Fn: {
                double v = a->eval(x, y);
                switch (fn) {
                    case 0: return std::exp(v);
                    case 1: return 1.0 / std::cosh(v);
                    case 2: return std::tanh(v);
                    case 3: return std::sin(v);
                    default: return std::cos(v);
                }
            }
        }
        return 0.0;
    }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::unique_ptr<Node>;

struct Parser {
    const std::string& s;
    std::size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    [[noreturn]] void fail(const std::string& what) {
        throw bad_input("expression parse failure at position " + std::to_string(pos) + ": " + what);
    }
    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool accept(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    NodePtr make(Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
        auto n = std::make_unique<Node>();
        n->kind = k;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    NodePtr expr() {
        NodePtr n = term();
        for (;;) {
            if (accept('+')) n = make(Node::Kind::Add, std::move(n), term());
            else if (accept('-')) n = make(Node::Kind::Sub, std::move(n), term());
            else return n;
        }
    }
    NodePtr term() {
        NodePtr n = factor();
        for (;;) {
            if (accept('*')) n = make(Node::Kind::Mul, std::move(n), factor());
            else if (accept('/')) n = make(Node::Kind::Div, std::move(n), factor());
            else return n;
        }
    }
    NodePtr factor() {
        NodePtr n = unary();
        if (accept('^')) n = make(Node::Kind::Pow, std::move(n), factor()); // right assoc
        return n;
    }
    NodePtr unary() {
        if (accept('-')) return make(Node::Kind::Neg, unary());
        return primary();
    }
    NodePtr primary() {
        skip();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v = std::stod(s.substr(pos), &used);
            pos += used;
            auto n = make(Node::Kind::Num);
            n->num = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos;
            while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
            std::string id = s.substr(start, pos - start);
            if (id == "x") return make(Node::Kind::VarX);
            if (id == "y") return make(Node::Kind::VarY);
            if (id == "pi") {
                auto n = make(Node::Kind::Num);
                n->num = pi;
                return n;
            }
            int fn = -1;
            if (id == "exp") fn = 0;
            else if (id == "sech") fn = 1;
            else if (id == "tanh") fn = 2;
            else if (id == "sin") fn = 3;
            else if (id == "cos") fn = 4;
            if (fn < 0) fail("unknown identifier '" + id + "'");
            if (!accept('(')) fail("expected '(' after function name");
            NodePtr arg = expr();
            if (!accept(')')) fail("expected ')'");
            auto n = make(Node::Kind::Fn, std::move(arg));
            n->fn = fn;
            return n;
        }
        if (accept('(')) {
            NodePtr n = expr();
            if (!accept(')')) fail("expected ')'");
            return n;
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

} // namespace

Expression::Expression(const std::string& text) {
    Parser p(text);
    root_ = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
}

Expression::~Expression() = default;
Expression::Expression(Expression&&) noexcept = default;

double Expression::eval(double x, double y) const { return root_->eval(x, y); }

SpectralField build_initial_data(const InitialDataSpec& spec, const GridSpec& grid,
                                 double* projection_magnitude) {
    std::vector<double> v(grid.size());
    if (spec.name == "sym" || spec.name == "asym") {
        auto f = spec.name == "sym" ? u0_sym : u0_asym;
        for (int iy = 0; iy < grid.ny; ++iy)
            for (int ix = 0; ix < grid.nx; ++ix) v[grid.idx(ix, iy)] = f(grid.x(ix), grid.y(iy));
    } else if (spec.name == "custom") {
        Expression e(spec.expression);
        for (int iy = 0; iy < grid.ny; ++iy)
            for (int ix = 0; ix < grid.nx; ++ix) v[grid.idx(ix, iy)] = e.eval(grid.x(ix), grid.y(iy));
    } else {
        throw bad_input("initial data name not resolvable: " + spec.name);
    }
    SpectralField f = SpectralField::from_values(grid, std::move(v));
    cvec c = f.coeffs();
    double removed = project_out_x_mean(grid, c);
    if (projection_magnitude) *projection_magnitude = removed;
    return SpectralField::from_coeffs(grid, std::move(c));
}

} // namespace kp
