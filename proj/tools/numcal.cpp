// numcal: command-line front end for the numerical calculus toolkit.
//
// Every subcommand echoes its resolved inputs (defaults included) so a run
// can be reproduced from its output alone. --json emits one object on
// stdout with round-trip-exact number formatting; identical argv yields
// byte-identical output.
//
// Exit codes: 0 definitive verdict or value, 2 expression parse error,
// 3 invalid arguments or precondition failure, 4 inconclusive outcome.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "numcal/descent.hpp"
#include "numcal/diff.hpp"
#include "numcal/error.hpp"
#include "numcal/expr.hpp"
#include "numcal/limits.hpp"
#include "numcal/quad.hpp"
#include "numcal/series.hpp"
#include "numcal/trace.hpp"

namespace {

using namespace numcal;

constexpr int kExitOk = 0;
constexpr int kExitParseError = 2;
constexpr int kExitInvalidArgs = 3;
constexpr int kExitInconclusive = 4;

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

// Minimal ordered JSON emitter. Finite numbers use the shortest decimal
// form that parses back to the same binary64; non-finite values become the
// strings "inf", "-inf", "nan".
class JsonWriter {
public:
    JsonWriter& begin_object() { prefix(); buf_ += '{'; first_.push_back(true); return *this; }
    JsonWriter& end_object() { buf_ += '}'; first_.pop_back(); return *this; }
    JsonWriter& begin_array() { prefix(); buf_ += '['; first_.push_back(true); return *this; }
    JsonWriter& end_array() { buf_ += ']'; first_.pop_back(); return *this; }

    JsonWriter& key(std::string_view k) {
        prefix();
        append_escaped(k);
        buf_ += ':';
        after_key_ = true;
        return *this;
    }

    JsonWriter& string(std::string_view s) { prefix(); append_escaped(s); return *this; }

    JsonWriter& number(double v) {
        prefix();
        if (std::isfinite(v)) {
            buf_ += format_double(v);
        } else if (std::isnan(v)) {
            buf_ += "\"nan\"";
        } else {
            buf_ += v > 0 ? "\"inf\"" : "\"-inf\"";
        }
        return *this;
    }

    JsonWriter& integer(long long v) { prefix(); buf_ += std::to_string(v); return *this; }
    JsonWriter& unsigned_integer(unsigned long long v) { prefix(); buf_ += std::to_string(v); return *this; }
    JsonWriter& boolean(bool b) { prefix(); buf_ += b ? "true" : "false"; return *this; }

    const std::string& str() const { return buf_; }

private:
    void prefix() {
        if (after_key_) {
            after_key_ = false;
            return;
        }
        if (!first_.empty()) {
            if (!first_.back()) buf_ += ',';
            first_.back() = false;
        }
    }

    void append_escaped(std::string_view s) {
        buf_ += '"';
        for (char c : s) {
            switch (c) {
                case '"': buf_ += "\\\""; break;
                case '\\': buf_ += "\\\\"; break;
                case '\n': buf_ += "\\n"; break;
                case '\t': buf_ += "\\t"; break;
                case '\r': buf_ += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char hex[8];
                        std::snprintf(hex, sizeof(hex), "\\u%04x", c);
                        buf_ += hex;
                    } else {
                        buf_ += c;
                    }
            }
        }
        buf_ += '"';
    }

    std::string buf_;
    std::vector<bool> first_;
    bool after_key_ = false;
};

std::string human_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_double(v);
}

struct OutputOptions {
    bool json = false;
    bool trace = false;
    bool quiet = false;
};

// Key/value document assembled by each subcommand, rendered once as JSON
// or aligned text. Values are stored as JSON fragments.
struct Field {
    std::string key;
    std::string value;
    bool result = true;   // false for input echoes; quiet mode keeps results only
};

class Document {
public:
    explicit Document(std::string command) : command_(std::move(command)) {}

    void input(std::string_view key, std::string_view text) { add(key, quote(text), false); }
    void input_raw(std::string_view key, std::string value) { add(key, std::move(value), false); }
    void input_number(std::string_view key, double v) { add(key, json_number(v), false); }
    void input_integer(std::string_view key, long long v) { add(key, std::to_string(v), false); }
    void input_bool(std::string_view key, bool b) { add(key, b ? "true" : "false", false); }

    void result(std::string_view key, std::string_view text) { add(key, quote(text), true); }
    void result_raw(std::string_view key, std::string value) { add(key, std::move(value), true); }
    void result_number(std::string_view key, double v) { add(key, json_number(v), true); }
    void result_integer(std::string_view key, long long v) { add(key, std::to_string(v), true); }

    void set_trace(std::string json_fragment, std::string text_block) {
        trace_json_ = std::move(json_fragment);
        trace_text_ = std::move(text_block);
    }

    static std::string json_number(double v) {
        if (std::isfinite(v)) return format_double(v);
        if (std::isnan(v)) return "\"nan\"";
        return v > 0 ? "\"inf\"" : "\"-inf\"";
    }

    static std::string quote(std::string_view s) {
        JsonWriter w;
        w.string(s);
        return w.str();
    }

    std::string render_json(bool with_trace) const {
        std::string out = "{\"command\":" + quote(command_) + ",\"inputs\":{";
        bool first = true;
        for (const auto& f : fields_) {
            if (f.result) continue;
            if (!first) out += ',';
            first = false;
            out += quote(f.key) + ":" + f.value;
        }
        out += '}';
        for (const auto& f : fields_) {
            if (!f.result) continue;
            out += ',' + quote(f.key) + ":" + f.value;
        }
        if (with_trace) out += ",\"trace\":" + (trace_json_.empty() ? "[]" : trace_json_);
        out += '}';
        return out;
    }

    std::string render_text(bool with_trace, bool quiet) const {
        std::string out;
        if (!quiet) out += "command: " + command_ + "\n";
        for (const auto& f : fields_) {
            if (quiet && !f.result) continue;
            std::string value = f.value;
            if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
                value = value.substr(1, value.size() - 2);
            out += f.key + ": " + value + "\n";
        }
        if (with_trace && !quiet && !trace_text_.empty()) out += trace_text_;
        return out;
    }

private:
    void add(std::string_view key, std::string value, bool result) {
        fields_.push_back({std::string(key), std::move(value), result});
    }

    std::string command_;
    std::vector<Field> fields_;
    std::string trace_json_;
    std::string trace_text_;
};

void print_document(const Document& doc, const OutputOptions& opts) {
    if (opts.json) {
        std::cout << doc.render_json(opts.trace) << "\n";
    } else {
        std::cout << doc.render_text(opts.trace, opts.quiet);
    }
}

int print_error(const std::string& command, const std::string& code, const std::string& message,
                std::optional<long long> offset, int exit_code, const OutputOptions& opts) {
    if (opts.json) {
        JsonWriter w;
        w.begin_object();
        w.key("command").string(command);
        w.key("error").begin_object();
        w.key("code").string(code);
        w.key("message").string(message);
        if (offset) w.key("offset").integer(*offset);
        w.end_object();
        w.end_object();
        std::cout << w.str() << "\n";
    } else {
        std::string line = "error (" + code + "): " + message + "\n";
        std::cout << line;
        std::cerr << line;
    }
    return exit_code;
}

std::string trace_json(const SampleTrace& trace) {
    JsonWriter w;
    w.begin_array();
    for (const auto& entry : trace.entries) {
        w.begin_object();
        w.key("k").integer(entry.k);
        w.key("x").number(entry.x);
        w.key("fx").number(entry.fx);
        w.end_object();
    }
    w.end_array();
    return w.str();
}

std::string trace_text(const SampleTrace& trace, const char* header = "trace:") {
    std::string out = std::string(header) + "\n";
    char line[128];
    for (const auto& entry : trace.entries) {
        std::snprintf(line, sizeof(line), "  %3d  %-24s %s\n", entry.k,
                      human_double(entry.x).c_str(), human_double(entry.fx).c_str());
        out += line;
    }
    return out;
}

std::string vector_json(const std::vector<double>& values) {
    JsonWriter w;
    w.begin_array();
    for (double v : values) w.number(v);
    w.end_array();
    return w.str();
}

std::string vector_text(const std::vector<double>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += human_double(values[i]);
    }
    return out + "]";
}

// ---------------------------------------------------------------------------
// Argument helpers
// ---------------------------------------------------------------------------

double parse_cli_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(what);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid number '" + text + "' for " + what);
    }
}

Bindings parse_bindings(const std::vector<std::string>& pairs) {
    Bindings out;
    for (const auto& pair : pairs) {
        auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("expected NAME=VALUE, got '" + pair + "'");
        std::string name = pair.substr(0, eq);
        if (name == "pi" || name == "e")
            throw std::invalid_argument("'" + name + "' is a reserved constant and cannot be bound");
        out[name] = parse_cli_double(pair.substr(eq + 1), "binding '" + pair + "'");
    }
    return out;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        std::string item = text.substr(pos, comma - pos);
        if (!item.empty()) out.push_back(item);
        pos = comma + 1;
    }
    return out;
}

Bindings parse_binding_list(const std::string& text) {
    return parse_bindings(split_list(text));
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(parse_cli_double(item, what));
    return out;
}

std::string bindings_json(const Bindings& b) {
    JsonWriter w;
    w.begin_object();
    for (const auto& [name, value] : b) w.key(name).number(value);
    w.end_object();
    return w.str();
}

std::string names_json(const std::vector<std::string>& names) {
    JsonWriter w;
    w.begin_array();
    for (const auto& n : names) w.string(n);
    w.end_array();
    return w.str();
}

// ---------------------------------------------------------------------------
// Subcommand state
// ---------------------------------------------------------------------------

struct CliState {
    OutputOptions out;

    // shared option storage; each subcommand binds the ones it uses
    std::string expr_text;
    std::string var;
    std::vector<std::string> var_bindings;
    std::optional<double> at_value;
    std::string side = "both";
    std::string to_infinity;
    int n_limit = 12;
    int n_diff = 8;
    double tol_limit = 1e-8;
    double tol_diff = 1e-5;
    int window = 3;
    bool perturb = false;
    std::uint64_t seed = 0;
    std::string at_bindings;
    std::string vars_list;
    std::string x0_list;
    double alpha = 0.1;
    std::string step_mode = "fixed";
    std::optional<double> momentum_beta;
    int max_iters = 1000;
    double grad_tol = 1e-6;
    bool maximize = false;
    double from = 0, to = 0;
    int subintervals = 0;
    std::string rule;
    bool vectorized = false;
    std::string term_text;
    std::string index_var;
    long long series_start = 1;
    long long max_terms = 10000;
    double tol_series = 1e-8;
};

Side parse_side(const std::string& s) {
    if (s == "left") return Side::left;
    if (s == "right") return Side::right;
    if (s == "both") return Side::both;
    throw std::invalid_argument("invalid --side '" + s + "' (left|right|both)");
}

QuadRule parse_rule(const std::string& s) {
    if (s == "left") return QuadRule::riemann_left;
    if (s == "right") return QuadRule::riemann_right;
    if (s == "midpoint") return QuadRule::riemann_midpoint;
    if (s == "trapezoid") return QuadRule::trapezoid;
    if (s == "simpson") return QuadRule::simpson;
    throw std::invalid_argument("invalid --rule '" + s + "' (left|right|midpoint|trapezoid|simpson)");
}

const char* side_name(Side s) {
    switch (s) {
        case Side::left: return "left";
        case Side::right: return "right";
        case Side::both: return "both";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Subcommand runners
// ---------------------------------------------------------------------------

int run_eval(const CliState& st) {
    Expr e = parse(st.expr_text);
    Bindings b = parse_bindings(st.var_bindings);
    double value = eval(e, b);

    Document doc("eval");
    doc.input("expr", format(e));
    doc.input_raw("bindings", bindings_json(b));
    doc.result("verdict", "value");
    doc.result_number("value", value);
    doc.result_integer("iterations", 0);
    doc.set_trace("[]", "");
    print_document(doc, st.out);
    return kExitOk;
}

int run_limit(const CliState& st) {
    if (st.at_value.has_value() == !st.to_infinity.empty())
        throw std::invalid_argument("limit requires exactly one of --at or --to-infinity");

    LimitQuery query;
    query.expr = parse(st.expr_text);
    query.var = st.var;
    query.max_index = st.n_limit;
    query.tol = st.tol_limit;
    query.window = st.window;
    query.perturb = st.perturb;
    query.seed = st.seed;

    if (st.at_value) {
        query.target = LimitTarget::finite(*st.at_value, parse_side(st.side));
    } else if (st.to_infinity == "plus") {
        query.target = LimitTarget::plus_infinity();
    } else if (st.to_infinity == "minus") {
        query.target = LimitTarget::minus_infinity();
    } else {
        throw std::invalid_argument("invalid --to-infinity '" + st.to_infinity + "' (plus|minus)");
    }

    LimitVerdict verdict = limit(query);

    Document doc("limit");
    doc.input("expr", format(query.expr));
    doc.input("var", query.var);
    if (st.at_value) {
        doc.input_number("at", *st.at_value);
        doc.input("side", side_name(query.target.side));
    } else {
        doc.input("to_infinity", st.to_infinity);
    }
    doc.input_integer("n", query.max_index);
    doc.input_number("tol", query.tol);
    doc.input_integer("window", query.window);
    doc.input_bool("perturb", query.perturb);
    doc.input_raw("seed", std::to_string(query.seed));
    doc.result("verdict", to_string(verdict.kind));
    if (verdict.kind == VerdictKind::converged) doc.result_number("value", verdict.value);
    doc.result_integer("iterations", verdict.iterations_used);

    if (verdict.second_trace) {
        doc.set_trace("{\"left\":" + trace_json(verdict.trace) +
                          ",\"right\":" + trace_json(*verdict.second_trace) + "}",
                      trace_text(verdict.trace, "trace (left):") +
                          trace_text(*verdict.second_trace, "trace (right):"));
    } else {
        doc.set_trace(trace_json(verdict.trace), trace_text(verdict.trace));
    }
    print_document(doc, st.out);
    return verdict.kind == VerdictKind::inconclusive ? kExitInconclusive : kExitOk;
}

int run_derivative(const CliState& st) {
    DiffRequest req;
    req.expr = parse(st.expr_text);
    req.var = st.var;
    req.point = parse_binding_list(st.at_bindings);
    req.max_index = st.n_diff;
    req.tol = st.tol_diff;

    DerivativeResult r = derivative(req);

    Document doc("derivative");
    doc.input("expr", format(req.expr));
    doc.input("var", req.var);
    doc.input_raw("at", bindings_json(req.point));
    doc.input_integer("n", req.max_index);
    doc.input_number("tol", req.tol);
    doc.result("verdict", to_string(r.verdict.kind));
    if (r.estimate) doc.result_number("value", *r.estimate);
    doc.result_integer("iterations", r.verdict.iterations_used);
    doc.set_trace(trace_json(r.trace()), trace_text(r.trace(), "trace (quotients, x = h):"));
    print_document(doc, st.out);
    return r.verdict.kind == VerdictKind::inconclusive ? kExitInconclusive : kExitOk;
}

int run_gradient(const CliState& st) {
    Expr e = parse(st.expr_text);
    std::vector<std::string> vars = split_list(st.vars_list);
    if (vars.empty()) throw std::invalid_argument("gradient requires --vars");
    Bindings point = parse_binding_list(st.at_bindings);
    GradientOptions opts{st.n_diff, st.tol_diff};

    std::vector<double> grad = gradient(e, vars, point, opts);

    int iterations = 0;
    std::string traces_json = "{", traces_text;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        DiffRequest req{e, vars[i], point, opts.max_index, opts.tol};
        SampleTrace t = diff_quotient_trace(req);
        iterations = std::max(iterations, static_cast<int>(t.size()));
        if (i) traces_json += ',';
        traces_json += Document::quote(vars[i]) + ":" + trace_json(t);
        traces_text += trace_text(t, ("trace for " + vars[i] + ":").c_str());
    }
    traces_json += '}';

    Document doc("gradient");
    doc.input("expr", format(e));
    doc.input_raw("vars", names_json(vars));
    doc.input_raw("at", bindings_json(point));
    doc.input_integer("n", opts.max_index);
    doc.input_number("tol", opts.tol);
    doc.result("verdict", "converged");
    doc.result_raw("value", vector_json(grad));
    doc.result_integer("iterations", iterations);
    doc.set_trace(traces_json, traces_text);
    print_document(doc, st.out);
    return kExitOk;
}

int run_minimize(const CliState& st) {
    Expr e = parse(st.expr_text);
    std::vector<std::string> vars = split_list(st.vars_list);
    if (vars.empty()) throw std::invalid_argument("minimize requires --vars");

    DescentConfig cfg;
    cfg.x0 = parse_double_list(st.x0_list, "--x0");
    cfg.alpha = st.alpha;
    if (st.step_mode == "fixed") {
        cfg.step_mode = StepMode::fixed;
    } else if (st.step_mode == "backtracking") {
        cfg.step_mode = StepMode::backtracking;
    } else {
        throw std::invalid_argument("invalid --step '" + st.step_mode + "' (fixed|backtracking)");
    }
    cfg.max_iters = st.max_iters;
    cfg.grad_tol = st.grad_tol;
    cfg.maximize = st.maximize;
    if (st.momentum_beta) cfg.beta = *st.momentum_beta;

    DescentTrace trace = st.momentum_beta ? gradient_descent_momentum(e, vars, cfg)
                                          : gradient_descent(e, vars, cfg);

    const DescentStep& final_step = trace.iterates.back();

    Document doc("minimize");
    doc.input("expr", format(e));
    doc.input_raw("vars", names_json(vars));
    doc.input_raw("x0", vector_json(cfg.x0));
    doc.input_number("alpha", cfg.alpha);
    doc.input("step", st.step_mode);
    if (st.momentum_beta) doc.input_number("momentum", cfg.beta);
    doc.input_integer("max_iters", cfg.max_iters);
    doc.input_number("grad_tol", cfg.grad_tol);
    doc.input_bool("maximize", cfg.maximize);
    doc.result("verdict", to_string(trace.reason));
    doc.result_number("value", final_step.fx);
    doc.result_raw("x", vector_json(final_step.x));
    doc.result_number("grad_norm", final_step.grad_norm);
    doc.result_integer("iterations", static_cast<long long>(trace.iterates.size()) - 1);

    JsonWriter w;
    w.begin_array();
    std::string text = "trace:\n";
    char line[160];
    for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
        const auto& step = trace.iterates[i];
        w.begin_object();
        w.key("k").integer(static_cast<long long>(i));
        w.key("x");
        w.begin_array();
        for (double xi : step.x) w.number(xi);
        w.end_array();
        w.key("fx").number(step.fx);
        w.key("grad_norm").number(step.grad_norm);
        w.end_object();
        std::snprintf(line, sizeof(line), "  %4zu  f=%-22s |g|=%-22s x=", i,
                      human_double(step.fx).c_str(), human_double(step.grad_norm).c_str());
        text += line;
        text += vector_text(step.x) + "\n";
    }
    w.end_array();
    doc.set_trace(w.str(), text);
    print_document(doc, st.out);
    return trace.reason == StopReason::max_iters_reached ? kExitInconclusive : kExitOk;
}

int run_integrate(const CliState& st) {
    QuadRule rule = parse_rule(st.rule);
    bool is_riemann = rule == QuadRule::riemann_left || rule == QuadRule::riemann_right ||
                      rule == QuadRule::riemann_midpoint;
    if (st.vectorized && !is_riemann)
        throw std::invalid_argument("--vectorized applies only to Riemann rules");

    QuadratureSpec spec{parse(st.expr_text), st.var, Partition(st.from, st.to, st.subintervals),
                        rule};
    double value = st.vectorized ? riemann_vectorized(spec) : integrate(spec);

    Document doc("integrate");
    doc.input("expr", format(spec.expr));
    doc.input("var", spec.var);
    doc.input_number("from", spec.partition.a);
    doc.input_number("to", spec.partition.b);
    doc.input_integer("n", spec.partition.subintervals);
    doc.input("rule", st.rule);
    doc.input_bool("vectorized", st.vectorized);
    doc.result("verdict", "value");
    doc.result_number("value", value);
    doc.result_integer("iterations", spec.partition.subintervals);
    doc.set_trace("[]", "");
    print_document(doc, st.out);
    return kExitOk;
}

int run_series(const CliState& st) {
    SeriesQuery query;
    query.term = parse(st.term_text);
    query.index_var = st.index_var;
    query.start = st.series_start;
    query.max_terms = st.max_terms;
    query.tol = st.tol_series;

    LimitVerdict verdict = classify_series(query);

    Document doc("series");
    doc.input("term", format(query.term));
    doc.input("index", query.index_var);
    doc.input_integer("start", query.start);
    doc.input_integer("max_terms", query.max_terms);
    doc.input_integer("checkpoints", query.checkpoints);
    doc.input_number("tol", query.tol);
    doc.input_integer("window", query.window);
    doc.result("verdict", to_string(verdict.kind));
    if (verdict.kind == VerdictKind::converged) doc.result_number("value", verdict.value);
    doc.result_integer("iterations", verdict.iterations_used);
    doc.set_trace(trace_json(verdict.trace), trace_text(verdict.trace, "trace (x = N, fx = S_N):"));
    print_document(doc, st.out);
    return verdict.kind == VerdictKind::inconclusive ? kExitInconclusive : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numcal: numerical limits, derivatives, descent, quadrature, and series"};
    app.require_subcommand(1);

    CliState st;

    auto add_output_flags = [&st](CLI::App* cmd) {
        cmd->add_flag("--json", st.out.json, "emit one JSON object on stdout");
        cmd->add_flag("--trace", st.out.trace, "include the iteration trace");
        cmd->add_flag("--quiet", st.out.quiet, "suppress everything but the result (text mode)");
    };

    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate an expression at a point");
    eval_cmd->add_option("--expr", st.expr_text, "expression text")->required();
    eval_cmd->add_option("--var", st.var_bindings, "binding NAME=VALUE (repeatable)");
    add_output_flags(eval_cmd);

    CLI::App* limit_cmd = app.add_subcommand("limit", "estimate a limit");
    limit_cmd->add_option("--expr", st.expr_text)->required();
    limit_cmd->add_option("--var", st.var)->required();
    limit_cmd->add_option("--at", st.at_value, "finite target a");
    limit_cmd->add_option("--side", st.side, "left|right|both (default both)");
    limit_cmd->add_option("--to-infinity", st.to_infinity, "plus|minus");
    limit_cmd->add_option("--n", st.n_limit, "max probe index (default 12)");
    limit_cmd->add_option("--tol", st.tol_limit, "convergence threshold (default 1e-8)");
    limit_cmd->add_option("--window", st.window, "consecutive-agreement count (default 3)");
    limit_cmd->add_flag("--perturb", st.perturb, "randomize at-infinity probes");
    limit_cmd->add_option("--seed", st.seed, "perturbation seed (default 0)");
    add_output_flags(limit_cmd);

    CLI::App* deriv_cmd = app.add_subcommand("derivative", "forward-difference derivative");
    deriv_cmd->add_option("--expr", st.expr_text)->required();
    deriv_cmd->add_option("--var", st.var)->required();
    deriv_cmd->add_option("--at", st.at_bindings, "point, e.g. \"x=3\" or \"x=1,y=5\"")->required();
    deriv_cmd->add_option("--n", st.n_diff, "max quotient index (default 8)");
    deriv_cmd->add_option("--tol", st.tol_diff, "convergence threshold (default 1e-5)");
    add_output_flags(deriv_cmd);

    CLI::App* grad_cmd = app.add_subcommand("gradient", "gradient from per-variable partials");
    grad_cmd->add_option("--expr", st.expr_text)->required();
    grad_cmd->add_option("--vars", st.vars_list, "ordered names, e.g. x,y")->required();
    grad_cmd->add_option("--at", st.at_bindings)->required();
    grad_cmd->add_option("--n", st.n_diff);
    grad_cmd->add_option("--tol", st.tol_diff);
    add_output_flags(grad_cmd);

    CLI::App* min_cmd = app.add_subcommand("minimize", "gradient descent");
    min_cmd->add_option("--expr", st.expr_text)->required();
    min_cmd->add_option("--vars", st.vars_list)->required();
    min_cmd->add_option("--x0", st.x0_list, "initial point, e.g. \"1,1\"")->required();
    min_cmd->add_option("--alpha", st.alpha, "step size (default 0.1)");
    min_cmd->add_option("--step", st.step_mode, "fixed|backtracking (default fixed)");
    min_cmd->add_option("--momentum", st.momentum_beta, "heavy-ball coefficient beta");
    min_cmd->add_option("--max-iters", st.max_iters, "iteration budget (default 1000)");
    min_cmd->add_option("--grad-tol", st.grad_tol, "gradient-norm stop (default 1e-6)");
    min_cmd->add_flag("--maximize", st.maximize, "ascend instead");
    add_output_flags(min_cmd);

    CLI::App* int_cmd = app.add_subcommand("integrate", "numerical definite integral");
    int_cmd->add_option("--expr", st.expr_text)->required();
    int_cmd->add_option("--var", st.var)->required();
    int_cmd->add_option("--from", st.from)->required();
    int_cmd->add_option("--to", st.to)->required();
    int_cmd->add_option("--n", st.subintervals, "subinterval count")->required();
    int_cmd->add_option("--rule", st.rule, "left|right|midpoint|trapezoid|simpson")->required();
    int_cmd->add_flag("--vectorized", st.vectorized, "use the vectorized Riemann path");
    add_output_flags(int_cmd);

    CLI::App* series_cmd = app.add_subcommand("series", "classify series convergence");
    series_cmd->add_option("--term", st.term_text, "term expression in the index variable")->required();
    series_cmd->add_option("--index", st.index_var, "index variable name")->required();
    series_cmd->add_option("--start", st.series_start, "first index (default 1)");
    series_cmd->add_option("--max-terms", st.max_terms, "largest index summed (default 10000)");
    series_cmd->add_option("--tol", st.tol_series, "convergence threshold (default 1e-8)");
    add_output_flags(series_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        // the json flag may not have been reached before the failure
        bool wants_json = false;
        std::string command;
        for (int i = 1; i < argc; ++i) {
            if (std::string_view(argv[i]) == "--json") wants_json = true;
            if (command.empty() && argv[i][0] != '-') command = argv[i];
        }
        OutputOptions opts;
        opts.json = wants_json;
        return print_error(command, "invalid_argument", e.what(), std::nullopt, kExitInvalidArgs,
                           opts);
    }

    std::string command = app.get_subcommands().front()->get_name();
    try {
        if (command == "eval") return run_eval(st);
        if (command == "limit") return run_limit(st);
        if (command == "derivative") return run_derivative(st);
        if (command == "gradient") return run_gradient(st);
        if (command == "minimize") return run_minimize(st);
        if (command == "integrate") return run_integrate(st);
        if (command == "series") return run_series(st);
        std::cerr << "unknown subcommand\n";
        return kExitInvalidArgs;
    } catch (const parse_error& err) {
        return print_error(command, "parse_error", err.what(),
                           static_cast<long long>(err.offset()), kExitParseError, st.out);
    } catch (const descent_error& err) {
        return print_error(command, "descent_error", err.what(), std::nullopt, kExitInvalidArgs,
                           st.out);
    } catch (const gradient_error& err) {
        return print_error(command, "gradient_error", err.what(), std::nullopt, kExitInvalidArgs,
                           st.out);
    } catch (const eval_error& err) {
        return print_error(command, "eval_error", err.what(), std::nullopt, kExitInvalidArgs,
                           st.out);
    } catch (const std::domain_error& err) {
        return print_error(command, "domain_error", err.what(), std::nullopt, kExitInvalidArgs,
                           st.out);
    } catch (const std::invalid_argument& err) {
        return print_error(command, "invalid_argument", err.what(), std::nullopt, kExitInvalidArgs,
                           st.out);
    } catch (const std::exception& err) {
        return print_error(command, "internal_error", err.what(), std::nullopt, kExitInvalidArgs,
                           st.out);
    }
}
