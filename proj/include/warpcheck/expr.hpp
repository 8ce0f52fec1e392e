#pragma once

#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace warpcheck {

// Second-order forward-mode jet: value, gradient and Hessian with respect
// to the chart coordinates. hess is symmetric by construction.
struct Jet2 {
    double value = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;

    explicit Jet2(int dim = 0)
        : grad(Eigen::VectorXd::Zero(dim)), hess(Eigen::MatrixXd::Zero(dim, dim)) {}
};

// Raised on malformed expression text. offset is the byte position of the
// offending token in the original string.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Raised when an evaluation leaves the domain of a function (ln of a
// non-positive value, division by zero, coth at zero, ...).
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Immutable scalar expression over named coordinates and parse-time
// constants. Value-semantic handle; copies share the tree.
class Expr {
public:
    enum class Func { sin, cos, tan, sinh, cosh, tanh, coth, exp, ln, sqrt, abs };

    Expr() = default;
    bool valid() const { return node_ != nullptr; }

    // --- programmatic builders (used for product metrics, 1/2*g(z,z), ...)
    static Expr number(double v);
    static Expr constant(std::string name, double v);
    static Expr variable(int index);
    static Expr apply(Func f, Expr arg);
    friend Expr operator+(Expr a, Expr b);
    friend Expr operator-(Expr a, Expr b);
    friend Expr operator*(Expr a, Expr b);
    friend Expr operator/(Expr a, Expr b);
    friend Expr operator-(Expr a);
    static Expr pow(Expr base, Expr exponent);

    // Structural tree transforms.
    Expr shifted_variables(int offset) const;
    Expr substituted(const std::map<int, double>& fixed_vars) const;
    bool depends_on_any_variable() const;
    bool is_literal_zero() const;
    int max_variable_index() const;  // -1 when variable-free

    friend bool structurally_equal(const Expr& a, const Expr& b);
    friend double eval(const Expr& e, std::span<const double> point);
    friend Jet2 eval_jet2(const Expr& e, std::span<const double> point);
    friend std::string to_string(const Expr& e, std::span<const std::string> vars);
    friend Expr parse_expr(std::string_view text, std::span<const std::string> vars,
                           const std::map<std::string, double>& consts);

    struct Node;

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

// Parse `text` against the ordered coordinate names `vars` and the constant
// bindings `consts`. Grammar: +, -, *, /, ^ (right assoc, binds tighter than
// unary minus), parentheses, and the fixed unary function set of Expr::Func.
Expr parse_expr(std::string_view text, std::span<const std::string> vars,
                const std::map<std::string, double>& consts = {});

double eval(const Expr& e, std::span<const double> point);
Jet2 eval_jet2(const Expr& e, std::span<const double> point);

// Pretty-print with minimal parentheses; re-parsing the result against the
// same vars/consts yields a structurally identical tree.
std::string to_string(const Expr& e, std::span<const std::string> vars);

bool structurally_equal(const Expr& a, const Expr& b);

}  // namespace warpcheck
