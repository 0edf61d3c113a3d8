#include "numcal/expr.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <system_error>

#include "numcal/error.hpp"

namespace numcal {

namespace {

struct FunctionEntry {
    std::string_view name;
    Builtin fn;
};

constexpr FunctionEntry kFunctions[] = {
    {"sin", Builtin::sin},   {"cos", Builtin::cos},     {"tan", Builtin::tan},
    {"exp", Builtin::exp},   {"ln", Builtin::ln},       {"log10", Builtin::log10},
    {"sqrt", Builtin::sqrt}, {"abs", Builtin::abs},     {"atan", Builtin::atan},
};

const FunctionEntry* lookup_function(std::string_view name) {
    for (const auto& entry : kFunctions) {
        if (entry.name == name) return &entry;
    }
    return nullptr;
}

bool bits_equal(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

} // namespace

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr run() {
        if (text_.empty()) throw parse_error("empty expression", 0);
        skip_spaces();
        if (pos_ >= text_.size()) throw parse_error("empty expression", pos_);
        parse_expr();
        skip_spaces();
        if (pos_ < text_.size())
            throw parse_error("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
        return std::move(result_);
    }

private:
    static constexpr int kMaxDepth = 2000;

    std::string_view text_;
    std::size_t pos_ = 0;
    int depth_ = 0;
    Expr result_;

    struct DepthGuard {
        explicit DepthGuard(Parser& p) : parser(p) {
            if (++parser.depth_ > kMaxDepth)
                throw parse_error("expression nested too deeply", parser.pos_);
        }
        ~DepthGuard() { --parser.depth_; }
        Parser& parser;
    };

    void skip_spaces() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_spaces();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_spaces();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    int add_node(Expr::Node node) {
        result_.nodes_.push_back(node);
        return static_cast<int>(result_.nodes_.size()) - 1;
    }

    int parse_expr() {
        int lhs = parse_term();
        for (;;) {
            if (consume('+')) {
                int rhs = parse_term();
                lhs = add_node(Expr::Binary{BinaryOp::add, lhs, rhs});
            } else if (consume('-')) {
                int rhs = parse_term();
                lhs = add_node(Expr::Binary{BinaryOp::sub, lhs, rhs});
            } else {
                return lhs;
            }
        }
    }

    int parse_term() {
        int lhs = parse_factor();
        for (;;) {
            if (consume('*')) {
                int rhs = parse_factor();
                lhs = add_node(Expr::Binary{BinaryOp::mul, lhs, rhs});
            } else if (consume('/')) {
                int rhs = parse_factor();
                lhs = add_node(Expr::Binary{BinaryOp::div, lhs, rhs});
            } else {
                return lhs;
            }
        }
    }

    int parse_factor() {
        DepthGuard guard(*this);
        if (consume('-')) {
            int child = parse_factor();
            return add_node(Expr::Negate{child});
        }
        return parse_power();
    }

    int parse_power() {
        int base = parse_atom();
        if (consume('^')) {
            int exponent = parse_factor();
            return add_node(Expr::Binary{BinaryOp::pow, base, exponent});
        }
        return base;
    }

    int parse_atom() {
        skip_spaces();
        if (pos_ >= text_.size()) throw parse_error("expected expression", pos_);
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        if (c == '(') {
            ++pos_;
            int inner = parse_expr();
            if (!consume(')')) throw parse_error("expected ')'", pos_);
            return inner;
        }
        throw parse_error("expected expression", pos_);
    }

    int parse_number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            } else {
                pos_ = mark; // bare 'e' belongs to the next token, not this literal
            }
        }
        std::string_view token = text_.substr(start, pos_ - start);
        double value = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size())
            throw parse_error("invalid number literal '" + std::string(token) + "'", start);
        return add_node(Expr::Constant{value});
    }

    int parse_identifier() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        std::string name(text_.substr(start, pos_ - start));
        if (consume('(')) {
            const FunctionEntry* entry = lookup_function(name);
            if (!entry) {
                std::string message = "unknown function '" + name + "'";
                if (name == "log") message += " (use ln or log10)";
                throw parse_error(message, start);
            }
            int arg = parse_expr();
            if (!consume(')')) throw parse_error("expected ')'", pos_);
            return add_node(Expr::Call{entry->fn, arg});
        }
        if (name == "pi") return add_node(Expr::Constant{std::numbers::pi});
        if (name == "e") return add_node(Expr::Constant{std::numbers::e});
        return add_node(Expr::Variable{intern(name)});
    }

    int intern(const std::string& name) {
        auto& vars = result_.variables_;
        auto it = std::find(vars.begin(), vars.end(), name);
        if (it != vars.end()) return static_cast<int>(it - vars.begin());
        vars.push_back(name);
        return static_cast<int>(vars.size()) - 1;
    }
};

Expr parse(std::string_view text) { return Parser(text).run(); }

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

double eval_node(const std::vector<Expr::Node>& nodes, int idx, std::span<const double> slots) {
    const Expr::Node& node = nodes[idx];
    if (const auto* c = std::get_if<Expr::Constant>(&node)) return c->value;
    if (const auto* v = std::get_if<Expr::Variable>(&node)) return slots[v->slot];
    if (const auto* n = std::get_if<Expr::Negate>(&node)) return -eval_node(nodes, n->child, slots);
    if (const auto* b = std::get_if<Expr::Binary>(&node)) {
        double lhs = eval_node(nodes, b->lhs, slots);
        double rhs = eval_node(nodes, b->rhs, slots);
        switch (b->op) {
            case BinaryOp::add: return lhs + rhs;
            case BinaryOp::sub: return lhs - rhs;
            case BinaryOp::mul: return lhs * rhs;
            case BinaryOp::div: return lhs / rhs;
            case BinaryOp::pow: return std::pow(lhs, rhs);
        }
    }
    const auto& call = std::get<Expr::Call>(node);
    double x = eval_node(nodes, call.child, slots);
    switch (call.fn) {
        case Builtin::sin:   return std::sin(x);
        case Builtin::cos:   return std::cos(x);
        case Builtin::tan:   return std::tan(x);
        case Builtin::exp:   return std::exp(x);
        case Builtin::ln:    return std::log(x);
        case Builtin::log10: return std::log10(x);
        case Builtin::sqrt:  return std::sqrt(x);
        case Builtin::abs:   return std::fabs(x);
        case Builtin::atan:  return std::atan(x);
    }
    return std::numeric_limits<double>::quiet_NaN(); // unreachable
}

// Resolves the single-variable slot for vectorized evaluation; exprs with
// no free variables are accepted (the slot is simply unused).
void check_univariate(const Expr& e, std::string_view var) {
    const auto& vars = e.variables();
    if (vars.empty()) return;
    if (vars.size() > 1)
        throw eval_error("expression has more than one free variable");
    if (vars[0] != var)
        throw eval_error("expression variable '" + vars[0] + "' does not match '" +
                         std::string(var) + "'");
}

constexpr std::size_t kParallelThreshold = 4096;

} // namespace

double Expr::eval_slots(std::span<const double> slot_values) const {
    return eval_node(nodes_, static_cast<int>(nodes_.size()) - 1, slot_values);
}

double eval(const Expr& e, const Bindings& bindings) {
    if (e.nodes().empty()) throw eval_error("empty expression");
    std::vector<double> slots(e.variables().size());
    for (std::size_t i = 0; i < e.variables().size(); ++i) {
        auto it = bindings.find(e.variables()[i]);
        if (it == bindings.end())
            throw eval_error("unbound variable '" + e.variables()[i] + "'");
        slots[i] = it->second;
    }
    return e.eval_slots(slots);
}

std::vector<double> eval_vec_serial(const Expr& e, std::string_view var,
                                    std::span<const double> xs) {
    check_univariate(e, var);
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double slot = xs[i];
        out[i] = e.eval_slots({&slot, 1});
    }
    return out;
}

std::vector<double> eval_vec_parallel(const Expr& e, std::string_view var,
                                      std::span<const double> xs) {
    check_univariate(e, var);
    std::vector<double> out(xs.size());
    const std::int64_t n = static_cast<std::int64_t>(xs.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        double slot = xs[i];
        out[i] = e.eval_slots({&slot, 1});
    }
    return out;
}

std::vector<double> eval_vec(const Expr& e, std::string_view var, std::span<const double> xs) {
    if (xs.size() >= kParallelThreshold) return eval_vec_parallel(e, var, xs);
    return eval_vec_serial(e, var, xs);
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

double pow10(int exponent) { return std::pow(10.0, static_cast<double>(exponent)); }

namespace {

// Precedence levels: additive 1, multiplicative 2, unary minus 3, power 4,
// atoms 5. Matches the grammar in the header.
int node_precedence(const Expr::Node& node) {
    if (std::holds_alternative<Expr::Constant>(node)) return 5;
    if (std::holds_alternative<Expr::Variable>(node)) return 5;
    if (std::holds_alternative<Expr::Call>(node)) return 5;
    if (std::holds_alternative<Expr::Negate>(node)) return 3;
    const auto& b = std::get<Expr::Binary>(node);
    switch (b.op) {
        case BinaryOp::add:
        case BinaryOp::sub: return 1;
        case BinaryOp::mul:
        case BinaryOp::div: return 2;
        case BinaryOp::pow: return 4;
    }
    return 5;
}

const char* builtin_name(Builtin fn) {
    switch (fn) {
        case Builtin::sin:   return "sin";
        case Builtin::cos:   return "cos";
        case Builtin::tan:   return "tan";
        case Builtin::exp:   return "exp";
        case Builtin::ln:    return "ln";
        case Builtin::log10: return "log10";
        case Builtin::sqrt:  return "sqrt";
        case Builtin::abs:   return "abs";
        case Builtin::atan:  return "atan";
    }
    return "?";
}

void format_node(const Expr& e, int idx, std::string& out);

void format_child(const Expr& e, int idx, int min_precedence, std::string& out) {
    bool parens = node_precedence(e.nodes()[idx]) < min_precedence;
    if (parens) out += '(';
    format_node(e, idx, out);
    if (parens) out += ')';
}

void format_node(const Expr& e, int idx, std::string& out) {
    const Expr::Node& node = e.nodes()[idx];
    if (const auto* c = std::get_if<Expr::Constant>(&node)) {
        out += format_double(c->value);
        return;
    }
    if (const auto* v = std::get_if<Expr::Variable>(&node)) {
        out += e.variables()[v->slot];
        return;
    }
    if (const auto* n = std::get_if<Expr::Negate>(&node)) {
        out += '-';
        format_child(e, n->child, 3, out);
        return;
    }
    if (const auto* call = std::get_if<Expr::Call>(&node)) {
        out += builtin_name(call->fn);
        out += '(';
        format_node(e, call->child, out);
        out += ')';
        return;
    }
    const auto& b = std::get<Expr::Binary>(node);
    switch (b.op) {
        case BinaryOp::add:
            format_child(e, b.lhs, 1, out);
            out += " + ";
            format_child(e, b.rhs, 2, out);
            break;
        case BinaryOp::sub:
            format_child(e, b.lhs, 1, out);
            out += " - ";
            format_child(e, b.rhs, 2, out);
            break;
        case BinaryOp::mul:
            format_child(e, b.lhs, 2, out);
            out += " * ";
            format_child(e, b.rhs, 3, out);
            break;
        case BinaryOp::div:
            format_child(e, b.lhs, 2, out);
            out += " / ";
            format_child(e, b.rhs, 3, out);
            break;
        case BinaryOp::pow:
            // right-associative: the left operand needs parens at equal level
            format_child(e, b.lhs, 5, out);
            out += '^';
            format_child(e, b.rhs, 3, out);
            break;
    }
}

} // namespace

std::string format(const Expr& e) {
    if (e.nodes().empty()) return "";
    std::string out;
    format_node(e, static_cast<int>(e.nodes().size()) - 1, out);
    return out;
}

// ---------------------------------------------------------------------------
// Structural equality
// ---------------------------------------------------------------------------

namespace {

bool nodes_equal(const Expr& a, int ia, const Expr& b, int ib) {
    const Expr::Node& na = a.nodes()[ia];
    const Expr::Node& nb = b.nodes()[ib];
    if (na.index() != nb.index()) return false;
    if (const auto* c = std::get_if<Expr::Constant>(&na))
        return bits_equal(c->value, std::get<Expr::Constant>(nb).value);
    if (const auto* v = std::get_if<Expr::Variable>(&na))
        return a.variables()[v->slot] == b.variables()[std::get<Expr::Variable>(nb).slot];
    if (const auto* n = std::get_if<Expr::Negate>(&na))
        return nodes_equal(a, n->child, b, std::get<Expr::Negate>(nb).child);
    if (const auto* bin = std::get_if<Expr::Binary>(&na)) {
        const auto& other = std::get<Expr::Binary>(nb);
        return bin->op == other.op && nodes_equal(a, bin->lhs, b, other.lhs) &&
               nodes_equal(a, bin->rhs, b, other.rhs);
    }
    const auto& call = std::get<Expr::Call>(na);
    const auto& other = std::get<Expr::Call>(nb);
    return call.fn == other.fn && nodes_equal(a, call.child, b, other.child);
}

} // namespace

bool operator==(const Expr& lhs, const Expr& rhs) {
    if (lhs.nodes().empty() || rhs.nodes().empty()) return lhs.nodes().empty() == rhs.nodes().empty();
    return nodes_equal(lhs, static_cast<int>(lhs.nodes().size()) - 1, rhs,
                       static_cast<int>(rhs.nodes().size()) - 1);
}

} // namespace numcal
