#include "stabcheck/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace stabcheck {

ExprPtr Expr::constant(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Constant;
    e->value = v;
    return e;
}
ExprPtr Expr::variable(std::string n) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Variable;
    e->name = std::move(n);
    return e;
}
ExprPtr Expr::unary(UnaryOp op, ExprPtr a) {
    // canonical form: negation of a literal is a negative literal
    if (op == UnaryOp::Neg && a->kind == ExprKind::Constant) return constant(-a->value);
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Unary;
    e->uop = op;
    e->lhs = std::move(a);
    return e;
}
ExprPtr Expr::binary(BinaryOp op, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Binary;
    e->bop = op;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}
ExprPtr Expr::pow(ExprPtr a, long n) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Binary;
    e->bop = BinaryOp::Pow;
    e->int_exponent = n;
    e->lhs = std::move(a);
    return e;
}

namespace {

struct Parser {
    const std::string& text;
    std::size_t pos = 0;
    const std::vector<std::string>& vars;

    Parser(const std::string& t, const std::vector<std::string>& v) : text(t), vars(v) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

    ExprPtr parse() {
        if (text.empty()) fail("empty expression");
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos != text.size()) fail("unexpected trailing input");
        return e;
    }

    ExprPtr parse_sum() {
        ExprPtr e = parse_term();
        for (;;) {
            if (accept('+'))
                e = Expr::binary(BinaryOp::Add, e, parse_term());
            else if (accept('-'))
                e = Expr::binary(BinaryOp::Sub, e, parse_term());
            else
                return e;
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_unary();
        for (;;) {
            if (accept('*'))
                e = Expr::binary(BinaryOp::Mul, e, parse_unary());
            else if (accept('/'))
                e = Expr::binary(BinaryOp::Div, e, parse_unary());
            else
                return e;
        }
    }

    ExprPtr parse_unary() {
        if (accept('-')) return Expr::unary(UnaryOp::Neg, parse_unary());
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        while (accept('^')) base = Expr::pow(base, parse_int_exponent());
        return base;
    }

    long parse_int_exponent() {
        skip_ws();
        std::size_t start = pos;
        bool neg = false;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
            neg = text[pos] == '-';
            ++pos;
        }
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
            throw ParseError("exponent must be an integer literal", start);
        long v = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            v = v * 10 + (text[pos] - '0');
            ++pos;
        }
        if (pos < text.size() && text[pos] == '.')
            throw ParseError("exponent must be an integer literal", pos);
        return neg ? -v : v;
    }

    ExprPtr parse_atom() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of expression");
        const char c = text[pos];
        if (c == '(') {
            ++pos;
            ExprPtr e = parse_sum();
            if (!accept(')')) fail("unmatched parenthesis");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    ExprPtr parse_number() {
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.'))
            ++pos;
        // exponent notation
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            std::size_t save = pos;
            ++pos;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
            if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                    ++pos;
            } else {
                pos = save;
            }
        }
        const std::string tok = text.substr(start, pos - start);
        try {
            std::size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument("partial");
            return Expr::constant(v);
        } catch (const std::exception&) {
            throw ParseError("malformed number '" + tok + "'", start);
        }
    }

    ExprPtr parse_ident() {
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        const std::string name = text.substr(start, pos - start);
        if (name == "sin" || name == "cos" || name == "sqrt" || name == "abs") {
            if (!accept('(')) throw ParseError("expected '(' after function " + name, pos);
            ExprPtr arg = parse_sum();
            if (!accept(')')) throw ParseError("unmatched parenthesis", pos);
            UnaryOp op = name == "sin"    ? UnaryOp::Sin
                         : name == "cos"  ? UnaryOp::Cos
                         : name == "sqrt" ? UnaryOp::Sqrt
                                          : UnaryOp::Abs;
            return Expr::unary(op, arg);
        }
        if (name == "pi") return Expr::constant(3.14159265358979323846);
        if (std::find(vars.begin(), vars.end(), name) == vars.end())
            throw ParseError("undeclared variable '" + name + "'", start);
        return Expr::variable(name);
    }
};

} // namespace

ExprPtr parse_expression(const std::string& text, const std::vector<std::string>& declared_vars) {
    Parser p(text, declared_vars);
    return p.parse();
}

std::string to_string(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Constant: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", e->value);
            std::string s(buf);
            return (e->value < 0) ? "(" + s + ")" : s;
        }
        case ExprKind::Variable:
            return e->name;
        case ExprKind::Unary: {
            const std::string a = to_string(e->lhs);
            switch (e->uop) {
                case UnaryOp::Neg: return "(-" + a + ")";
                case UnaryOp::Sin: return "sin(" + a + ")";
                case UnaryOp::Cos: return "cos(" + a + ")";
                case UnaryOp::Sqrt: return "sqrt(" + a + ")";
                case UnaryOp::Abs: return "abs(" + a + ")";
            }
            break;
        }
        case ExprKind::Binary: {
            const std::string a = to_string(e->lhs);
            switch (e->bop) {
                case BinaryOp::Add: return "(" + a + "+" + to_string(e->rhs) + ")";
                case BinaryOp::Sub: return "(" + a + "-" + to_string(e->rhs) + ")";
                case BinaryOp::Mul: return "(" + a + "*" + to_string(e->rhs) + ")";
                case BinaryOp::Div: return "(" + a + "/" + to_string(e->rhs) + ")";
                case BinaryOp::Pow:
                    return "(" + a + "^" + (e->int_exponent < 0 ? "-" : "") +
                           std::to_string(std::abs(e->int_exponent)) + ")";
            }
            break;
        }
    }
    return "?";
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ExprKind::Constant: return a->value == b->value;
        case ExprKind::Variable: return a->name == b->name;
        case ExprKind::Unary:
            return a->uop == b->uop && structurally_equal(a->lhs, b->lhs);
        case ExprKind::Binary:
            if (a->bop != b->bop) return false;
            if (a->bop == BinaryOp::Pow)
                return a->int_exponent == b->int_exponent && structurally_equal(a->lhs, b->lhs);
            return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
    }
    return false;
}

double evaluate(const ExprPtr& e, const std::map<std::string, double>& bindings) {
    switch (e->kind) {
        case ExprKind::Constant: return e->value;
        case ExprKind::Variable: {
            auto it = bindings.find(e->name);
            if (it == bindings.end()) throw EvalError("missing binding for '" + e->name + "'");
            return it->second;
        }
        case ExprKind::Unary: {
            const double a = evaluate(e->lhs, bindings);
            switch (e->uop) {
                case UnaryOp::Neg: return -a;
                case UnaryOp::Sin: return std::sin(a);
                case UnaryOp::Cos: return std::cos(a);
                case UnaryOp::Sqrt:
                    if (a < 0) throw EvalError("sqrt of negative value");
                    return std::sqrt(a);
                case UnaryOp::Abs: return std::abs(a);
            }
            break;
        }
        case ExprKind::Binary: {
            const double a = evaluate(e->lhs, bindings);
            if (e->bop == BinaryOp::Pow) return std::pow(a, double(e->int_exponent));
            const double b = evaluate(e->rhs, bindings);
            switch (e->bop) {
                case BinaryOp::Add: return a + b;
                case BinaryOp::Sub: return a - b;
                case BinaryOp::Mul: return a * b;
                case BinaryOp::Div:
                    if (b == 0.0) throw EvalError("division by zero");
                    return a / b;
                default: break;
            }
            break;
        }
    }
    throw EvalError("malformed expression node");
}

namespace {
void collect_vars(const ExprPtr& e, std::set<std::string>& out) {
    switch (e->kind) {
        case ExprKind::Constant: return;
        case ExprKind::Variable: out.insert(e->name); return;
        case ExprKind::Unary: collect_vars(e->lhs, out); return;
        case ExprKind::Binary:
            collect_vars(e->lhs, out);
            if (e->rhs) collect_vars(e->rhs, out);
            return;
    }
}
} // namespace

std::vector<std::string> free_variables(const ExprPtr& e) {
    std::set<std::string> s;
    collect_vars(e, s);
    return {s.begin(), s.end()};
}

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& repl) {
    switch (e->kind) {
        case ExprKind::Constant: return e;
        case ExprKind::Variable: {
            auto it = repl.find(e->name);
            return it == repl.end() ? e : it->second;
        }
        case ExprKind::Unary: return Expr::unary(e->uop, substitute(e->lhs, repl));
        case ExprKind::Binary:
            if (e->bop == BinaryOp::Pow)
                return Expr::pow(substitute(e->lhs, repl), e->int_exponent);
            return Expr::binary(e->bop, substitute(e->lhs, repl), substitute(e->rhs, repl));
    }
    return e;
}

ExprPtr derivative(const ExprPtr& e, const std::string& var) {
    switch (e->kind) {
        case ExprKind::Constant: return Expr::constant(0.0);
        case ExprKind::Variable: return Expr::constant(e->name == var ? 1.0 : 0.0);
        case ExprKind::Unary: {
            ExprPtr da = derivative(e->lhs, var);
            switch (e->uop) {
                case UnaryOp::Neg: return Expr::unary(UnaryOp::Neg, da);
                case UnaryOp::Sin:
                    return Expr::binary(BinaryOp::Mul, Expr::unary(UnaryOp::Cos, e->lhs), da);
                case UnaryOp::Cos:
                    return Expr::unary(
                        UnaryOp::Neg,
                        Expr::binary(BinaryOp::Mul, Expr::unary(UnaryOp::Sin, e->lhs), da));
                case UnaryOp::Sqrt:
                    return Expr::binary(
                        BinaryOp::Div, da,
                        Expr::binary(BinaryOp::Mul, Expr::constant(2.0),
                                     Expr::unary(UnaryOp::Sqrt, e->lhs)));
                case UnaryOp::Abs:
                    // a.e. |d/dx abs(u)| = |u'|; magnitude bound, flagged heuristic
                    // by range_and_lipschitz when it sees the Abs node itself.
                    return da;
            }
            break;
        }
        case ExprKind::Binary: {
            if (e->bop == BinaryOp::Pow) {
                // d(u^n) = n * u^(n-1) * u'
                return Expr::binary(
                    BinaryOp::Mul, Expr::constant(double(e->int_exponent)),
                    Expr::binary(BinaryOp::Mul, Expr::pow(e->lhs, e->int_exponent - 1),
                                 derivative(e->lhs, var)));
            }
            ExprPtr da = derivative(e->lhs, var);
            ExprPtr db = derivative(e->rhs, var);
            switch (e->bop) {
                case BinaryOp::Add: return Expr::binary(BinaryOp::Add, da, db);
                case BinaryOp::Sub: return Expr::binary(BinaryOp::Sub, da, db);
                case BinaryOp::Mul:
                    return Expr::binary(BinaryOp::Add,
                                        Expr::binary(BinaryOp::Mul, da, e->rhs),
                                        Expr::binary(BinaryOp::Mul, e->lhs, db));
                case BinaryOp::Div:
                    // (u/v)' = (u'v - uv') / v^2
                    return Expr::binary(
                        BinaryOp::Div,
                        Expr::binary(BinaryOp::Sub, Expr::binary(BinaryOp::Mul, da, e->rhs),
                                     Expr::binary(BinaryOp::Mul, e->lhs, db)),
                        Expr::pow(e->rhs, 2));
                default: break;
            }
            break;
        }
    }
    throw EvalError("derivative: malformed node");
}

namespace {

struct IntervalEval {
    const IntervalBox& box;
    const std::vector<std::string>& vars;
    bool unbounded = false;
    bool heuristic = false;

    Interval eval(const ExprPtr& e) {
        switch (e->kind) {
            case ExprKind::Constant: return {e->value, e->value};
            case ExprKind::Variable: {
                for (std::size_t i = 0; i < vars.size(); ++i)
                    if (vars[i] == e->name) return box[i];
                throw EvalError("interval_evaluate: unbound variable '" + e->name + "'");
            }
            case ExprKind::Unary: {
                Interval a = eval(e->lhs);
                switch (e->uop) {
                    case UnaryOp::Neg: return -a;
                    case UnaryOp::Sin: return isin(a);
                    case UnaryOp::Cos: return icos(a);
                    case UnaryOp::Sqrt:
                        if (a.lo < 0) unbounded = true;
                        return isqrt(a);
                    case UnaryOp::Abs:
                        heuristic = true;
                        return iabs(a);
                }
                break;
            }
            case ExprKind::Binary: {
                Interval a = eval(e->lhs);
                if (e->bop == BinaryOp::Pow) {
                    if (e->int_exponent < 0 && a.contains_zero()) {
                        unbounded = true;
                        return {-1e308, 1e308};
                    }
                    return ipow(a, e->int_exponent);
                }
                Interval b = eval(e->rhs);
                switch (e->bop) {
                    case BinaryOp::Add: return a + b;
                    case BinaryOp::Sub: return a - b;
                    case BinaryOp::Mul: return a * b;
                    case BinaryOp::Div:
                        if (b.contains_zero()) {
                            unbounded = true;
                            return {-1e308, 1e308};
                        }
                        return a / b;
                    default: break;
                }
                break;
            }
        }
        throw EvalError("interval_evaluate: malformed node");
    }
};

} // namespace

IntervalResult interval_evaluate(const ExprPtr& e, const IntervalBox& box,
                                 const std::vector<std::string>& var_order) {
    IntervalEval ev{box, var_order};
    IntervalResult r;
    r.value = ev.eval(e);
    r.unbounded = ev.unbounded;
    r.heuristic = ev.heuristic;
    return r;
}

RangeLipschitz range_and_lipschitz(const ExprPtr& e, const IntervalBox& box,
                                   const std::vector<std::string>& var_order) {
    RangeLipschitz out;
    auto rv = interval_evaluate(e, box, var_order);
    out.range = rv.value;
    out.unbounded = rv.unbounded;
    out.heuristic = rv.heuristic;

    double sq = 0.0;
    for (const auto& v : var_order) {
        ExprPtr d = derivative(e, v);
        auto dv = interval_evaluate(d, box, var_order);
        out.unbounded = out.unbounded || dv.unbounded;
        out.heuristic = out.heuristic || dv.heuristic;
        const double m = dv.value.mag();
        sq += m * m;
    }
    out.lipschitz = std::sqrt(sq) * (1.0 + detail::kSlackRel);
    if (out.unbounded) out.lipschitz = std::numeric_limits<double>::infinity();
    return out;
}

std::vector<std::string> state_vars(std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
    return v;
}

std::vector<std::string> state_control_vars(std::size_t n, std::size_t m) {
    auto v = state_vars(n);
    for (std::size_t i = 1; i <= m; ++i) v.push_back("u" + std::to_string(i));
    return v;
}

} // namespace stabcheck
