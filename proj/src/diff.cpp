#include "numcal/diff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "numcal/error.hpp"

namespace numcal {

namespace {

void check_request(const DiffRequest& req) {
    if (req.max_index < 2) throw std::invalid_argument("derivative: n must be >= 2");
    if (!(req.tol > 0)) throw std::invalid_argument("derivative: tol must be > 0");
}

// Resolves req.point into slot values and returns the slot of req.var.
int bind_slots(const DiffRequest& req, std::vector<double>& slots) {
    const auto& vars = req.expr.variables();
    slots.resize(vars.size());
    int var_slot = -1;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        auto it = req.point.find(vars[i]);
        if (it == req.point.end()) throw eval_error("unbound variable '" + vars[i] + "'");
        slots[i] = it->second;
        if (vars[i] == req.var) var_slot = static_cast<int>(i);
    }
    if (var_slot < 0 && std::find(vars.begin(), vars.end(), req.var) == vars.end()) {
        // perturbing a variable the expression ignores: quotients are all 0,
        // which is the correct partial of a constant-in-var expression,
        // provided the request at least names a bound value for it
        auto it = req.point.find(req.var);
        if (it == req.point.end()) throw eval_error("unbound variable '" + req.var + "'");
    }
    return var_slot;
}

} // namespace

SampleTrace diff_quotient_trace(const DiffRequest& req) {
    check_request(req);
    std::vector<double> slots;
    int var_slot = bind_slots(req, slots);

    const double base = req.expr.eval_slots(slots);
    const double a = var_slot >= 0 ? slots[static_cast<std::size_t>(var_slot)]
                                   : req.point.find(req.var)->second;
    const int last = std::min(req.max_index, kQuotientIndexCap);

    SampleTrace trace;
    trace.entries.reserve(static_cast<std::size_t>(last) + 1);
    for (int k = 0; k <= last; ++k) {
        double h = pow10(-k);
        double shifted = base;
        if (var_slot >= 0) {
            slots[static_cast<std::size_t>(var_slot)] = a + h;
            shifted = req.expr.eval_slots(slots);
            slots[static_cast<std::size_t>(var_slot)] = a;
        }
        trace.entries.push_back({k, h, (shifted - base) / h});
    }
    return trace;
}

DerivativeResult derivative(const DiffRequest& req) {
    DerivativeResult result;
    result.verdict = classify(diff_quotient_trace(req), req.tol, 3);
    if (result.verdict.kind == VerdictKind::converged) result.estimate = result.verdict.value;
    return result;
}

DerivativeResult partial(const DiffRequest& req) { return derivative(req); }

std::vector<double> gradient(const Expr& f, std::span<const std::string> vars,
                             const Bindings& point, const GradientOptions& opts) {
    std::vector<double> components;
    components.reserve(vars.size());
    for (const std::string& var : vars) {
        DiffRequest req{f, var, point, opts.max_index, opts.tol};
        DerivativeResult r = derivative(req);
        if (!r.estimate) {
            throw gradient_error("gradient component along '" + var + "' did not converge (" +
                                     std::string(to_string(r.verdict.kind)) + ")",
                                 var);
        }
        components.push_back(*r.estimate);
    }
    return components;
}

} // namespace numcal
