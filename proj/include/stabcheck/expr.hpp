#ifndef STABCHECK_EXPR_HPP
#define STABCHECK_EXPR_HPP

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "stabcheck/interval.hpp"

namespace stabcheck {

enum class ExprKind { Constant, Variable, Unary, Binary };
enum class UnaryOp { Neg, Sin, Cos, Sqrt, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression tree node. Pow stores its integer exponent in
/// int_exponent and has no right child.
struct Expr {
    ExprKind kind;
    double value = 0.0;          // Constant
    std::string name;            // Variable
    UnaryOp uop = UnaryOp::Neg;
    BinaryOp bop = BinaryOp::Add;
    long int_exponent = 0;       // Pow
    ExprPtr lhs, rhs;

    static ExprPtr constant(double v);
    static ExprPtr variable(std::string n);
    static ExprPtr unary(UnaryOp op, ExprPtr a);
    static ExprPtr binary(BinaryOp op, ExprPtr a, ExprPtr b);
    static ExprPtr pow(ExprPtr a, long n);
};

struct ParseError : std::runtime_error {
    std::size_t position;
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg), position(pos) {}
};

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parse an infix expression. Precedence: ^ > unary minus > * / > + -,
/// left associative, whitespace insignificant. Exponents must be integer
/// literals. Every variable must appear in declared_vars.
ExprPtr parse_expression(const std::string& text,
                         const std::vector<std::string>& declared_vars);

/// Fully parenthesized rendering; parse(print(e)) is structurally identical
/// to e.
std::string to_string(const ExprPtr& e);

bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

/// Exact recursive floating-point evaluation.
double evaluate(const ExprPtr& e, const std::map<std::string, double>& bindings);

/// Free variables of the expression, sorted, deduplicated.
std::vector<std::string> free_variables(const ExprPtr& e);

/// Replace variables by expressions (variables absent from the map are kept).
ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& repl);

/// Symbolic partial derivative with respect to var. abs derivates to the
/// derivative of its argument (a valid a.e. magnitude bound) and sets the
/// non-smooth flag on range queries.
ExprPtr derivative(const ExprPtr& e, const std::string& var);

struct RangeLipschitz {
    Interval range;        // conservative enclosure of values over the box
    double lipschitz = 0;  // upper bound on the Euclidean gradient norm
    bool unbounded = false;   // domain violation inside the box (decertifies)
    bool heuristic = false;   // non-smooth node (abs) encountered
};

/// Interval range enclosure plus a Lipschitz bound over a box whose i-th
/// interval binds var_order[i]. Conservative: the true range is contained in
/// .range and the true Lipschitz constant is at most .lipschitz.
RangeLipschitz range_and_lipschitz(const ExprPtr& e, const IntervalBox& box,
                                   const std::vector<std::string>& var_order);

/// Range enclosure only (no derivative work).
struct IntervalResult {
    Interval value;
    bool unbounded = false;
    bool heuristic = false;
};
IntervalResult interval_evaluate(const ExprPtr& e, const IntervalBox& box,
                                 const std::vector<std::string>& var_order);

/// Conventional state/control variable name lists: x1..xn, u1..um.
std::vector<std::string> state_vars(std::size_t n);
std::vector<std::string> state_control_vars(std::size_t n, std::size_t m);

} // namespace stabcheck

#endif
