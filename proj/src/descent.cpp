#include "numcal/descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "numcal/diff.hpp"
#include "numcal/error.hpp"

namespace numcal {

namespace {

constexpr double kObjectiveBound = 1e300;
constexpr int kMaxHalvings = 30;

// The descent loop only needs gradient directions, not five digits, and a
// looser classification tolerance keeps the estimator usable across the
// curvature/slope ratios a trajectory sweeps through. Final accuracy is
// governed by grad_tol on the estimate itself.
constexpr GradientOptions kLoopGradient{8, 1e-3};

void check_config(const Expr& f, std::span<const std::string> vars, const DescentConfig& cfg) {
    if (!(cfg.alpha > 0)) throw std::invalid_argument("descent: alpha must be > 0");
    if (!(cfg.beta >= 0 && cfg.beta < 1)) throw std::invalid_argument("descent: beta must be in [0, 1)");
    if (cfg.max_iters < 1) throw std::invalid_argument("descent: max_iters must be >= 1");
    if (!(cfg.grad_tol > 0)) throw std::invalid_argument("descent: grad_tol must be > 0");
    if (cfg.x0.size() != vars.size())
        throw std::invalid_argument("descent: dim(x0) must equal the number of variables");
    for (const std::string& free_var : f.variables()) {
        if (std::find(vars.begin(), vars.end(), free_var) == vars.end())
            throw std::invalid_argument("descent: expression variable '" + free_var +
                                        "' is not among the descent variables");
    }
}

Bindings bind_point(std::span<const std::string> vars, const std::vector<double>& x) {
    Bindings b;
    for (std::size_t i = 0; i < vars.size(); ++i) b[vars[i]] = x[i];
    return b;
}

double norm(const std::vector<double>& g) {
    double sum = 0;
    for (double gi : g) sum += gi * gi;
    return std::sqrt(sum);
}

bool improved(double trial, double current, bool maximize) {
    return maximize ? trial > current : trial < current;
}

// Shared loop; `momentum` selects the heavy-ball update. With beta = 0 the
// momentum update 0 * v + g degenerates to g exactly, but the two public
// entry points still run distinct code paths.
template <bool momentum>
DescentTrace run(const Expr& f, std::span<const std::string> vars, const DescentConfig& cfg) {
    check_config(f, vars, cfg);

    DescentTrace trace;
    std::vector<double> x = cfg.x0;
    std::vector<double> velocity(x.size(), 0.0);

    for (int iter = 0;; ++iter) {
        double fx = eval(f, bind_point(vars, x));

        bool finite_point = true;
        for (double xi : x) finite_point = finite_point && std::isfinite(xi);
        if (!finite_point || std::fabs(fx) > kObjectiveBound) {
            trace.iterates.push_back({x, fx, std::numeric_limits<double>::quiet_NaN()});
            trace.reason = StopReason::diverged;
            return trace;
        }

        std::vector<double> grad;
        try {
            grad = gradient(f, vars, bind_point(vars, x), kLoopGradient);
        } catch (const gradient_error& err) {
            throw descent_error("iterate " + std::to_string(iter) + ": " + err.what(), iter,
                                err.variable());
        }
        double gn = norm(grad);
        trace.iterates.push_back({x, fx, gn});

        if (gn <= cfg.grad_tol) {
            trace.reason = StopReason::gradient_tolerance_met;
            return trace;
        }
        if (iter == cfg.max_iters) {
            trace.reason = StopReason::max_iters_reached;
            return trace;
        }

        if constexpr (momentum) {
            for (std::size_t i = 0; i < grad.size(); ++i)
                velocity[i] = cfg.beta * velocity[i] + grad[i];
        }
        const std::vector<double>& direction = momentum ? velocity : grad;
        const double update_sign = cfg.maximize ? 1.0 : -1.0;

        if (cfg.step_mode == StepMode::fixed) {
            for (std::size_t i = 0; i < x.size(); ++i)
                x[i] = x[i] + update_sign * cfg.alpha * direction[i];
        } else {
            double a = cfg.alpha;
            std::vector<double> trial(x.size());
            bool accepted = false;
            for (int halving = 0; halving <= kMaxHalvings; ++halving) {
                for (std::size_t i = 0; i < x.size(); ++i)
                    trial[i] = x[i] + update_sign * a * direction[i];
                if (improved(eval(f, bind_point(vars, trial)), fx, cfg.maximize)) {
                    accepted = true;
                    break;
                }
                a /= 2.0;
            }
            if (!accepted) {
                // line search stalled; the iterate cannot move, so the
                // remaining budget cannot be spent
                trace.reason = StopReason::max_iters_reached;
                return trace;
            }
            x = trial;
        }
    }
}

} // namespace

std::string_view to_string(StopReason reason) {
    switch (reason) {
        case StopReason::gradient_tolerance_met: return "gradient_tolerance_met";
        case StopReason::max_iters_reached: return "max_iters_reached";
        case StopReason::diverged: return "diverged";
    }
    return "?";
}

DescentTrace gradient_descent(const Expr& f, std::span<const std::string> vars,
                              const DescentConfig& cfg) {
    return run<false>(f, vars, cfg);
}

DescentTrace gradient_descent_momentum(const Expr& f, std::span<const std::string> vars,
                                       const DescentConfig& cfg) {
    return run<true>(f, vars, cfg);
}

} // namespace numcal
