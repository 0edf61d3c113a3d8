#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "numcal/expr.hpp"
#include "numcal/limits.hpp"
#include "numcal/trace.hpp"

namespace numcal {

/// Steps never shrink below 10^-8 (about sqrt of machine epsilon): past
/// that, cancellation in f(a+h) - f(a) swamps the quotient.
inline constexpr int kQuotientIndexCap = 8;

struct DiffRequest {
    Expr expr;
    std::string var;          // the variable being perturbed
    Bindings point;           // binds every free variable of expr
    int max_index = 8;        // quotients use h = 10^-k for k = 0..min(max_index, cap)
    double tol = 1e-5;
};

/// Outcome of a quotient-sequence classification. The quotient trace
/// (entry k holds x = h and fx = the forward quotient at that h) lives in
/// verdict.trace; estimate is set iff the verdict is converged and then
/// equals verdict.value.
struct DerivativeResult {
    LimitVerdict verdict;
    std::optional<double> estimate;

    const SampleTrace& trace() const noexcept { return verdict.trace; }
};

struct GradientOptions {
    int max_index = 8;
    double tol = 1e-5;
};

/// Forward-difference quotients (f(a + 10^-k) - f(a)) / 10^-k with every
/// other variable pinned from req.point.
SampleTrace diff_quotient_trace(const DiffRequest& req);

/// Derivative estimate: classify the quotient trace with req.tol and a
/// window of 3.
DerivativeResult derivative(const DiffRequest& req);

/// Partial derivative along req.var; same contract as derivative().
DerivativeResult partial(const DiffRequest& req);

/// Gradient assembled from per-variable partials, ordered like `vars`.
/// Throws gradient_error naming the variable if any component fails to
/// converge.
std::vector<double> gradient(const Expr& f, std::span<const std::string> vars,
                             const Bindings& point, const GradientOptions& opts = {});

} // namespace numcal
