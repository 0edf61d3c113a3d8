#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace numcal {

/// Variable bindings for evaluation. Ordered map so that iteration (and
/// anything rendered from it) is deterministic.
using Bindings = std::map<std::string, double, std::less<>>;

enum class BinaryOp { add, sub, mul, div, pow };
enum class Builtin { sin, cos, tan, exp, ln, log10, sqrt, abs, atan };

/// Immutable AST for a real-valued expression in named variables.
///
/// Nodes live in a flat arena in bottom-up order (children precede
/// parents, root last). Variables are interned; a Variable node refers to
/// its slot in the table. Once parsed an Expr is never mutated, so it is
/// safe to share across threads.
class Expr {
public:
    struct Constant { double value; };
    struct Variable { int slot; };
    struct Negate   { int child; };
    struct Binary   { BinaryOp op; int lhs; int rhs; };
    struct Call     { Builtin fn; int child; };
    using Node = std::variant<Constant, Variable, Negate, Binary, Call>;

    Expr() = default;

    /// Free variable names in order of first appearance.
    const std::vector<std::string>& variables() const noexcept { return variables_; }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }

    /// Evaluate with variable slot i bound to slot_values[i].
    double eval_slots(std::span<const double> slot_values) const;

    /// Structural equality; constants compare bit-for-bit.
    friend bool operator==(const Expr& lhs, const Expr& rhs);

private:
    friend class Parser;
    std::vector<Node> nodes_;
    std::vector<std::string> variables_;
};

/// Parse expression text. Grammar:
///
///   expr    := term (("+"|"-") term)*
///   term    := factor (("*"|"/") factor)*
///   factor  := "-" factor | power
///   power   := atom ("^" factor)?
///   atom    := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
///
/// `pi` and `e` are reserved constants. Known functions: sin cos tan exp
/// ln log10 sqrt abs atan. Throws parse_error with the offending offset.
Expr parse(std::string_view text);

/// Render an Expr to text that parses back to a structurally identical
/// tree. Minimal parentheses; numbers in shortest round-trip form.
std::string format(const Expr& e);

/// Evaluate at a point. Total over the reals: domain violations follow
/// IEEE semantics (0/0 -> NaN, 1/0 -> inf, ...). Throws eval_error for an
/// unbound variable.
double eval(const Expr& e, const Bindings& bindings);

/// Elementwise evaluation of a univariate expression over a vector of
/// points. result[i] is bit-identical to eval(e, {var: xs[i]}).
/// Dispatches to the parallel kernel for large inputs.
std::vector<double> eval_vec(const Expr& e, std::string_view var, std::span<const double> xs);

/// Serial reference kernel for eval_vec.
std::vector<double> eval_vec_serial(const Expr& e, std::string_view var, std::span<const double> xs);

/// OpenMP kernel for eval_vec; bit-identical to the serial path for any
/// thread count since every element is computed independently.
std::vector<double> eval_vec_parallel(const Expr& e, std::string_view var, std::span<const double> xs);

/// Shortest decimal form that parses back to the same binary64.
std::string format_double(double value);

/// 10 raised to an integer power, as binary64.
double pow10(int exponent);

} // namespace numcal
