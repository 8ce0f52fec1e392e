#include "warpcheck/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <utility>
#include <vector>

namespace warpcheck {

namespace {

enum class Kind { number, constant, variable, negate, add, sub, mul, div, pw, call };

}  // namespace

struct Expr::Node {
    Kind kind;
    double value = 0.0;        // number, constant
    std::string name;          // constant
    int index = 0;             // variable
    Func func = Func::sin;     // call
    std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;
using Func = Expr::Func;

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

const std::array<std::pair<std::string_view, Func>, 11> kFuncs = {{
    {"sin", Func::sin},
    {"cos", Func::cos},
    {"tan", Func::tan},
    {"sinh", Func::sinh},
    {"cosh", Func::cosh},
    {"tanh", Func::tanh},
    {"coth", Func::coth},
    {"exp", Func::exp},
    {"ln", Func::ln},
    {"sqrt", Func::sqrt},
    {"abs", Func::abs},
}};

std::string_view func_name(Func f) {
    for (const auto& [name, fn] : kFuncs)
        if (fn == f) return name;
    return "?";
}

// ---------------------------------------------------------------------------
// Parser: recursive descent with byte offsets for error reporting.
//
//   expr    := term   (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := '-' factor | power
//   power   := primary ('^' factor)?          right-associative
//   primary := number | ident | ident '(' expr ')' | '(' expr ')'
// ---------------------------------------------------------------------------

class Parser {
public:
    Parser(std::string_view text, std::span<const std::string> vars,
           const std::map<std::string, double>& consts)
        : text_(text), vars_(vars), consts_(consts) {}

    NodePtr run() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("empty expression", 0);
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ < text_.size())
            throw ParseError("unexpected trailing input '" + std::string(text_.substr(pos_)) + "'", pos_);
        return e;
    }

private:
    std::string_view text_;
    std::span<const std::string> vars_;
    const std::map<std::string, double>& consts_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr parse_expr() {
        NodePtr left = parse_term();
        for (;;) {
            if (accept('+'))
                left = make_node({.kind = Kind::add, .a = left, .b = parse_term()});
            else if (accept('-'))
                left = make_node({.kind = Kind::sub, .a = left, .b = parse_term()});
            else
                return left;
        }
    }

    NodePtr parse_term() {
        NodePtr left = parse_factor();
        for (;;) {
            if (accept('*'))
                left = make_node({.kind = Kind::mul, .a = left, .b = parse_factor()});
            else if (accept('/'))
                left = make_node({.kind = Kind::div, .a = left, .b = parse_factor()});
            else
                return left;
        }
    }

    NodePtr parse_factor() {
        if (accept('-')) return make_node({.kind = Kind::negate, .a = parse_factor()});
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^')) return make_node({.kind = Kind::pw, .a = base, .b = parse_factor()});
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
        char c = text_[pos_];

        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr parse_number() {
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc{}) throw ParseError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(ptr - begin);
        return make_node({.kind = Kind::number, .value = v});
    }

    NodePtr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name(text_.substr(start, pos_ - start));

        if (peek() == '(') {
            for (const auto& [fname, fn] : kFuncs) {
                if (fname == name) {
                    accept('(');
                    NodePtr arg = parse_expr();
                    if (peek() == ',')
                        throw ParseError("function '" + name + "' takes exactly one argument", pos_);
                    if (!accept(')')) throw ParseError("expected ')'", pos_);
                    return make_node({.kind = Kind::call, .func = fn, .a = arg});
                }
            }
            throw ParseError("unknown function '" + name + "'", start);
        }
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name)
                return make_node({.kind = Kind::variable, .index = static_cast<int>(i)});
        if (auto it = consts_.find(name); it != consts_.end())
            return make_node({.kind = Kind::constant, .value = it->second, .name = name});
        throw ParseError("unknown identifier '" + name + "'", start);
    }
};

// ---------------------------------------------------------------------------
// Value evaluation
// ---------------------------------------------------------------------------

double apply_func(Func f, double x) {
    switch (f) {
        case Func::sin: return std::sin(x);
        case Func::cos: return std::cos(x);
        case Func::tan: {
            if (std::cos(x) == 0.0) throw EvalError("tan at a pole");
            return std::tan(x);
        }
        case Func::sinh: return std::sinh(x);
        case Func::cosh: return std::cosh(x);
        case Func::tanh: return std::tanh(x);
        case Func::coth: {
            double s = std::sinh(x);
            if (s == 0.0) throw EvalError("coth at zero");
            return std::cosh(x) / s;
        }
        case Func::exp: return std::exp(x);
        case Func::ln: {
            if (x <= 0.0) throw EvalError("ln of non-positive value");
            return std::log(x);
        }
        case Func::sqrt: {
            if (x < 0.0) throw EvalError("sqrt of negative value");
            return std::sqrt(x);
        }
        case Func::abs: return std::abs(x);
    }
    throw EvalError("unreachable function");
}

// Integer-literal exponents are expanded by repeated multiplication, so
// negative bases stay legal; everything else goes through exp(y ln x).
bool as_integer_exponent(const Node& exponent, long long& out) {
    // Variable-free subtrees are folded to a value first.
    std::function<bool(const Node&, double&)> fold = [&](const Node& n, double& v) -> bool {
        switch (n.kind) {
            case Kind::number:
            case Kind::constant: v = n.value; return true;
            case Kind::variable: return false;
            case Kind::negate: {
                double a;
                if (!fold(*n.a, a)) return false;
                v = -a;
                return true;
            }
            case Kind::add:
            case Kind::sub:
            case Kind::mul:
            case Kind::div:
            case Kind::pw: {
                double a, b;
                if (!fold(*n.a, a) || !fold(*n.b, b)) return false;
                switch (n.kind) {
                    case Kind::add: v = a + b; break;
                    case Kind::sub: v = a - b; break;
                    case Kind::mul: v = a * b; break;
                    case Kind::div:
                        if (b == 0.0) return false;
                        v = a / b;
                        break;
                    default: v = std::pow(a, b); break;
                }
                return true;
            }
            case Kind::call: {
                double a;
                if (!fold(*n.a, a)) return false;
                v = apply_func(n.func, a);
                return true;
            }
        }
        return false;
    };
    double v;
    if (!fold(exponent, v)) return false;
    if (!std::isfinite(v) || std::abs(v) > 1e9) return false;
    double r = std::nearbyint(v);
    if (std::abs(v - r) > 1e-12) return false;
    out = static_cast<long long>(r);
    return true;
}

double eval_node(const Node& n, std::span<const double> p) {
    switch (n.kind) {
        case Kind::number:
        case Kind::constant: return n.value;
        case Kind::variable:
            if (n.index >= static_cast<int>(p.size())) throw EvalError("point dimension too small");
            return p[static_cast<std::size_t>(n.index)];
        case Kind::negate: return -eval_node(*n.a, p);
        case Kind::add: return eval_node(*n.a, p) + eval_node(*n.b, p);
        case Kind::sub: return eval_node(*n.a, p) - eval_node(*n.b, p);
        case Kind::mul: return eval_node(*n.a, p) * eval_node(*n.b, p);
        case Kind::div: {
            double d = eval_node(*n.b, p);
            if (d == 0.0) throw EvalError("division by zero");
            return eval_node(*n.a, p) / d;
        }
        case Kind::pw: {
            double base = eval_node(*n.a, p);
            long long k;
            if (as_integer_exponent(*n.b, k)) {
                if (k < 0 && base == 0.0) throw EvalError("zero base with negative exponent");
                return std::pow(base, static_cast<double>(k));
            }
            double y = eval_node(*n.b, p);
            if (base <= 0.0) throw EvalError("non-integer power of a non-positive base");
            return std::exp(y * std::log(base));
        }
        case Kind::call: return apply_func(n.func, eval_node(*n.a, p));
    }
    throw EvalError("unreachable node");
}

// ---------------------------------------------------------------------------
// Jet evaluation: forward-mode rules on the AST. Hessians are filled on the
// upper triangle and mirrored, so symmetry is exact.
// ---------------------------------------------------------------------------

struct JetOps {
    int dim;

    Jet2 constant(double v) const {
        Jet2 j(dim);
        j.value = v;
        return j;
    }

    Jet2 var(int idx, double v) const {
        Jet2 j(dim);
        j.value = v;
        j.grad(idx) = 1.0;
        return j;
    }

    Jet2 neg(const Jet2& a) const {
        Jet2 j(dim);
        j.value = -a.value;
        j.grad = -a.grad;
        j.hess = -a.hess;
        return j;
    }

    Jet2 add(const Jet2& a, const Jet2& b) const {
        Jet2 j(dim);
        j.value = a.value + b.value;
        j.grad = a.grad + b.grad;
        j.hess = a.hess + b.hess;
        return j;
    }

    Jet2 sub(const Jet2& a, const Jet2& b) const {
        Jet2 j(dim);
        j.value = a.value - b.value;
        j.grad = a.grad - b.grad;
        j.hess = a.hess - b.hess;
        return j;
    }

    Jet2 mul(const Jet2& a, const Jet2& b) const {
        Jet2 j(dim);
        j.value = a.value * b.value;
        j.grad = a.value * b.grad + b.value * a.grad;
        for (int i = 0; i < dim; ++i)
            for (int k = i; k < dim; ++k) {
                double h = a.value * b.hess(i, k) + b.value * a.hess(i, k) +
                           a.grad(i) * b.grad(k) + a.grad(k) * b.grad(i);
                j.hess(i, k) = h;
                j.hess(k, i) = h;
            }
        return j;
    }

    // chain rule: phi(u) with derivatives d1 = phi'(u), d2 = phi''(u)
    Jet2 chain(const Jet2& u, double value, double d1, double d2) const {
        Jet2 j(dim);
        j.value = value;
        j.grad = d1 * u.grad;
        for (int i = 0; i < dim; ++i)
            for (int k = i; k < dim; ++k) {
                double h = d1 * u.hess(i, k) + d2 * u.grad(i) * u.grad(k);
                j.hess(i, k) = h;
                j.hess(k, i) = h;
            }
        return j;
    }

    Jet2 inv(const Jet2& a) const {
        if (a.value == 0.0) throw EvalError("division by zero");
        double iv = 1.0 / a.value;
        return chain(a, iv, -iv * iv, 2.0 * iv * iv * iv);
    }

    Jet2 pow_int(const Jet2& a, long long k) const {
        if (k == 0) return constant(1.0);
        if (k < 0) return inv(pow_int(a, -k));
        Jet2 result = constant(1.0);
        Jet2 base = a;
        long long e = k;
        for (;;) {
            if (e & 1) result = mul(result, base);
            e >>= 1;
            if (e == 0) break;
            base = mul(base, base);
        }
        return result;
    }

    Jet2 call(Func f, const Jet2& u) const {
        double x = u.value;
        switch (f) {
            case Func::sin: return chain(u, std::sin(x), std::cos(x), -std::sin(x));
            case Func::cos: return chain(u, std::cos(x), -std::sin(x), -std::cos(x));
            case Func::tan: {
                double c = std::cos(x);
                if (c == 0.0) throw EvalError("tan at a pole");
                double t = std::tan(x);
                double sec2 = 1.0 + t * t;
                return chain(u, t, sec2, 2.0 * t * sec2);
            }
            case Func::sinh: return chain(u, std::sinh(x), std::cosh(x), std::sinh(x));
            case Func::cosh: return chain(u, std::cosh(x), std::sinh(x), std::cosh(x));
            case Func::tanh: {
                double t = std::tanh(x);
                double sech2 = 1.0 - t * t;
                return chain(u, t, sech2, -2.0 * t * sech2);
            }
            case Func::coth: {
                double s = std::sinh(x);
                if (s == 0.0) throw EvalError("coth at zero");
                double t = std::cosh(x) / s;
                double d1 = 1.0 - t * t;  // -csch^2
                return chain(u, t, d1, -2.0 * t * d1);
            }
            case Func::exp: {
                double e = std::exp(x);
                return chain(u, e, e, e);
            }
            case Func::ln: {
                if (x <= 0.0) throw EvalError("ln of non-positive value");
                return chain(u, std::log(x), 1.0 / x, -1.0 / (x * x));
            }
            case Func::sqrt: {
                if (x <= 0.0) throw EvalError("sqrt derivative at non-positive value");
                double s = std::sqrt(x);
                return chain(u, s, 0.5 / s, -0.25 / (s * x));
            }
            case Func::abs: {
                double sign = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
                return chain(u, std::abs(x), sign, 0.0);
            }
        }
        throw EvalError("unreachable function");
    }

    Jet2 eval(const Node& n, std::span<const double> p) const {
        switch (n.kind) {
            case Kind::number:
            case Kind::constant: return constant(n.value);
            case Kind::variable:
                if (n.index >= dim) throw EvalError("point dimension too small");
                return var(n.index, p[static_cast<std::size_t>(n.index)]);
            case Kind::negate: return neg(eval(*n.a, p));
            case Kind::add: return add(eval(*n.a, p), eval(*n.b, p));
            case Kind::sub: return sub(eval(*n.a, p), eval(*n.b, p));
            case Kind::mul: return mul(eval(*n.a, p), eval(*n.b, p));
            case Kind::div: return mul(eval(*n.a, p), inv(eval(*n.b, p)));
            case Kind::pw: {
                long long k;
                if (as_integer_exponent(*n.b, k)) return pow_int(eval(*n.a, p), k);
                Jet2 base = eval(*n.a, p);
                if (base.value <= 0.0) throw EvalError("non-integer power of a non-positive base");
                Jet2 y = eval(*n.b, p);
                return call(Func::exp, mul(y, call(Func::ln, base)));
            }
            case Kind::call: return call(n.func, eval(*n.a, p));
        }
        throw EvalError("unreachable node");
    }
};

// ---------------------------------------------------------------------------
// Printer with minimal parentheses. Child precedence below the parent's
// requirement forces parentheses, which keeps re-parsing structural.
// ---------------------------------------------------------------------------

int precedence(Kind k) {
    switch (k) {
        case Kind::add:
        case Kind::sub: return 1;
        case Kind::mul:
        case Kind::div: return 2;
        case Kind::negate: return 3;
        case Kind::pw: return 4;
        default: return 5;
    }
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void print_node(const Node& n, std::span<const std::string> vars, std::string& out);

void print_child(const Node& child, int min_prec, std::span<const std::string> vars,
                 std::string& out) {
    if (precedence(child.kind) < min_prec) {
        out += '(';
        print_node(child, vars, out);
        out += ')';
    } else {
        print_node(child, vars, out);
    }
}

void print_node(const Node& n, std::span<const std::string> vars, std::string& out) {
    switch (n.kind) {
        case Kind::number: out += format_number(n.value); return;
        case Kind::constant: out += n.name; return;
        case Kind::variable: {
            if (n.index >= static_cast<int>(vars.size()))
                throw std::out_of_range("variable index out of range for name table");
            out += vars[static_cast<std::size_t>(n.index)];
            return;
        }
        case Kind::negate:
            out += '-';
            // force parens below pow so "-(x*y)" never reads back as "(-x)*y"
            print_child(*n.a, 4, vars, out);
            return;
        case Kind::add:
            print_child(*n.a, 1, vars, out);
            out += '+';
            print_child(*n.b, 2, vars, out);
            return;
        case Kind::sub:
            print_child(*n.a, 1, vars, out);
            out += '-';
            print_child(*n.b, 2, vars, out);
            return;
        case Kind::mul:
            print_child(*n.a, 2, vars, out);
            out += '*';
            print_child(*n.b, 3, vars, out);
            return;
        case Kind::div:
            print_child(*n.a, 2, vars, out);
            out += '/';
            print_child(*n.b, 3, vars, out);
            return;
        case Kind::pw:
            print_child(*n.a, 5, vars, out);
            out += '^';
            print_child(*n.b, 3, vars, out);
            return;
        case Kind::call:
            out += func_name(n.func);
            out += '(';
            print_node(*n.a, vars, out);
            out += ')';
            return;
    }
}

bool equal_nodes(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Kind::number: return a.value == b.value;
        case Kind::constant: return a.name == b.name && a.value == b.value;
        case Kind::variable: return a.index == b.index;
        case Kind::negate: return equal_nodes(*a.a, *b.a);
        case Kind::call: return a.func == b.func && equal_nodes(*a.a, *b.a);
        default: return equal_nodes(*a.a, *b.a) && equal_nodes(*a.b, *b.b);
    }
}

NodePtr transform(const Node& n, const std::function<NodePtr(const Node&)>& leaf) {
    switch (n.kind) {
        case Kind::number:
        case Kind::constant:
        case Kind::variable: return leaf(n);
        case Kind::negate:
        case Kind::call: {
            Node c = n;
            c.a = transform(*n.a, leaf);
            c.b = nullptr;
            return make_node(std::move(c));
        }
        default: {
            Node c = n;
            c.a = transform(*n.a, leaf);
            c.b = transform(*n.b, leaf);
            return make_node(std::move(c));
        }
    }
}

}  // namespace

// --- Expr members ----------------------------------------------------------

Expr Expr::number(double v) {
    if (std::signbit(v))
        return -number(-v);  // literals stay non-negative so printing round-trips
    return Expr(make_node({.kind = Kind::number, .value = v}));
}

Expr Expr::constant(std::string name, double v) {
    return Expr(make_node({.kind = Kind::constant, .value = v, .name = std::move(name)}));
}

Expr Expr::variable(int index) {
    return Expr(make_node({.kind = Kind::variable, .index = index}));
}

Expr Expr::apply(Func f, Expr arg) {
    return Expr(make_node({.kind = Kind::call, .func = f, .a = arg.node_}));
}

Expr operator+(Expr a, Expr b) {
    return Expr(make_node({.kind = Kind::add, .a = a.node_, .b = b.node_}));
}
Expr operator-(Expr a, Expr b) {
    return Expr(make_node({.kind = Kind::sub, .a = a.node_, .b = b.node_}));
}
Expr operator*(Expr a, Expr b) {
    return Expr(make_node({.kind = Kind::mul, .a = a.node_, .b = b.node_}));
}
Expr operator/(Expr a, Expr b) {
    return Expr(make_node({.kind = Kind::div, .a = a.node_, .b = b.node_}));
}
Expr operator-(Expr a) { return Expr(make_node({.kind = Kind::negate, .a = a.node_})); }

Expr Expr::pow(Expr base, Expr exponent) {
    return Expr(make_node({.kind = Kind::pw, .a = base.node_, .b = exponent.node_}));
}

Expr Expr::shifted_variables(int offset) const {
    if (!node_) return {};
    return Expr(transform(*node_, [offset](const Node& n) -> NodePtr {
        if (n.kind == Kind::variable) {
            Node c = n;
            c.index += offset;
            return make_node(std::move(c));
        }
        return make_node(Node(n));
    }));
}

Expr Expr::substituted(const std::map<int, double>& fixed_vars) const {
    if (!node_) return {};
    return Expr(transform(*node_, [&fixed_vars](const Node& n) -> NodePtr {
        if (n.kind == Kind::variable) {
            if (auto it = fixed_vars.find(n.index); it != fixed_vars.end()) {
                double v = it->second;
                if (std::signbit(v))
                    return make_node({.kind = Kind::negate,
                                      .a = make_node({.kind = Kind::number, .value = -v})});
                return make_node({.kind = Kind::number, .value = v});
            }
        }
        return make_node(Node(n));
    }));
}

bool Expr::depends_on_any_variable() const { return max_variable_index() >= 0; }

bool Expr::is_literal_zero() const {
    return node_ && node_->kind == Kind::number && node_->value == 0.0;
}

int Expr::max_variable_index() const {
    if (!node_) return -1;
    std::function<int(const Node&)> walk = [&](const Node& n) -> int {
        switch (n.kind) {
            case Kind::variable: return n.index;
            case Kind::number:
            case Kind::constant: return -1;
            case Kind::negate:
            case Kind::call: return walk(*n.a);
            default: return std::max(walk(*n.a), walk(*n.b));
        }
    };
    return walk(*node_);
}

// --- free functions ---------------------------------------------------------

Expr parse_expr(std::string_view text, std::span<const std::string> vars,
                const std::map<std::string, double>& consts) {
    for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = i + 1; j < vars.size(); ++j)
            if (vars[i] == vars[j]) throw ParseError("duplicate variable '" + vars[i] + "'", 0);
    for (const auto& v : vars)
        if (consts.count(v)) throw ParseError("'" + v + "' is both a variable and a constant", 0);
    Parser parser(text, vars, consts);
    return Expr(parser.run());
}

double eval(const Expr& e, std::span<const double> point) {
    if (!e.node_) throw EvalError("empty expression");
    return eval_node(*e.node_, point);
}

Jet2 eval_jet2(const Expr& e, std::span<const double> point) {
    if (!e.node_) throw EvalError("empty expression");
    JetOps ops{static_cast<int>(point.size())};
    return ops.eval(*e.node_, point);
}

std::string to_string(const Expr& e, std::span<const std::string> vars) {
    if (!e.node_) return "";
    std::string out;
    print_node(*e.node_, vars, out);
    return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (!a.node_ || !b.node_) return a.node_ == b.node_;
    return equal_nodes(*a.node_, *b.node_);
}

}  // namespace warpcheck
