#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "numcal/expr.hpp"

namespace numcal {

enum class StepMode { fixed, backtracking };

enum class StopReason { gradient_tolerance_met, max_iters_reached, diverged };

std::string_view to_string(StopReason reason);

struct DescentConfig {
    std::vector<double> x0;
    double alpha = 0.1;                    // step size
    StepMode step_mode = StepMode::fixed;  // backtracking halves alpha until f improves
    double beta = 0.9;                     // momentum coefficient (momentum variant only)
    int max_iters = 1000;
    double grad_tol = 1e-6;                // stop when the gradient norm drops this low
    bool maximize = false;                 // ascent flips the update sign
};

struct DescentStep {
    std::vector<double> x;
    double fx;
    double grad_norm;   // NaN on a diverged terminal entry (gradient not evaluated there)
};

struct DescentTrace {
    std::vector<DescentStep> iterates;   // includes x0; length <= max_iters + 1
    StopReason reason = StopReason::max_iters_reached;
};

/// Plain gradient descent: x_{k+1} = x_k - alpha * grad f(x_k), with the
/// gradient estimated by forward-difference quotients. Terminates when the
/// gradient norm reaches grad_tol, the iteration budget runs out, or the
/// iterates diverge (non-finite coordinate or |f| > 1e300). Throws
/// descent_error if a gradient component fails to converge at some iterate.
DescentTrace gradient_descent(const Expr& f, std::span<const std::string> vars,
                              const DescentConfig& cfg);

/// Heavy-ball variant: v_{k+1} = beta * v_k + grad f(x_k), then
/// x_{k+1} = x_k - alpha * v_{k+1}, with v_0 = 0. beta = 0 reproduces
/// plain descent bit for bit.
DescentTrace gradient_descent_momentum(const Expr& f, std::span<const std::string> vars,
                                       const DescentConfig& cfg);

} // namespace numcal
