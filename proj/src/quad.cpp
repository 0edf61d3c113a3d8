#include "numcal/quad.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "numcal/error.hpp"

namespace numcal {

namespace {

class Sampler {
public:
    Sampler(const Expr& e, const std::string& var) : expr_(e) {
        const auto& vars = e.variables();
        if (vars.size() > 1) throw eval_error("expression has more than one free variable");
        if (vars.size() == 1 && vars[0] != var)
            throw eval_error("expression variable '" + vars[0] + "' does not match '" + var + "'");
        has_slot_ = !vars.empty();
    }

    double operator()(double x) const {
        return has_slot_ ? expr_.eval_slots({&x, 1}) : expr_.eval_slots({});
    }

private:
    const Expr& expr_;
    bool has_slot_;
};

[[noreturn]] void throw_non_finite(double x, int k) {
    throw std::domain_error("non-finite sample value at x = " + format_double(x) +
                            " (k = " + std::to_string(k) + ")");
}

// Sample index k for entry i of the rule's probe sequence.
int probe_index(QuadRule rule, int i) { return rule == QuadRule::riemann_right ? i + 1 : i; }

double probe_point(const Partition& p, QuadRule rule, int i) {
    switch (rule) {
        case QuadRule::riemann_right: return p.point(i + 1);
        case QuadRule::riemann_left: return p.point(i);
        case QuadRule::riemann_midpoint: return (p.point(i) + p.point(i + 1)) / 2.0;
        default: break;
    }
    throw std::invalid_argument("riemann: rule must be left, right, or midpoint");
}

} // namespace

Partition::Partition(double a_, double b_, int subintervals_)
    : a(a_), b(b_), subintervals(subintervals_) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("partition: endpoints must be finite");
    if (!(a < b)) throw std::invalid_argument("partition: requires a < b");
    if (subintervals < 1) throw std::invalid_argument("partition: n must be >= 1");
    // endpoints must stay strictly increasing: the width has to clear the
    // rounding grid at both ends of the interval
    if (!(a + delta() > a) || !(b - delta() < b))
        throw std::invalid_argument("partition: n too large for the interval width");
}

double riemann(const QuadratureSpec& spec) {
    Sampler f(spec.expr, spec.var);
    const Partition& p = spec.partition;
    double sum = 0.0;
    for (int i = 0; i < p.subintervals; ++i) {
        double x = probe_point(p, spec.rule, i);
        double fx = f(x);
        if (!std::isfinite(fx)) throw_non_finite(x, probe_index(spec.rule, i));
        sum += fx;
    }
    return p.delta() * sum;
}

double riemann_vectorized(const QuadratureSpec& spec) {
    const Partition& p = spec.partition;
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(p.subintervals));
    for (int i = 0; i < p.subintervals; ++i) xs.push_back(probe_point(p, spec.rule, i));

    std::vector<double> ys = eval_vec(spec.expr, spec.var, xs);

    double sum = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (!std::isfinite(ys[i]))
            throw_non_finite(xs[i], probe_index(spec.rule, static_cast<int>(i)));
        sum += ys[i];
    }
    return p.delta() * sum;
}

double trapezoid(const QuadratureSpec& spec) {
    Sampler f(spec.expr, spec.var);
    const Partition& p = spec.partition;
    const int n = p.subintervals;

    auto sample = [&](int k) {
        double x = p.point(k);
        double fx = f(x);
        if (!std::isfinite(fx)) throw_non_finite(x, k);
        return fx;
    };

    double sum = sample(0) / 2.0;
    for (int k = 1; k < n; ++k) sum += sample(k);
    sum += sample(n) / 2.0;
    return p.delta() * sum;
}

double simpson(const QuadratureSpec& spec) {
    Sampler f(spec.expr, spec.var);
    const Partition& p = spec.partition;
    const int n = p.subintervals;
    if (n % 2 != 0) throw std::invalid_argument("simpson: n must be even");

    auto sample = [&](int k) {
        double x = p.point(k);
        double fx = f(x);
        if (!std::isfinite(fx)) throw_non_finite(x, k);
        return fx;
    };

    double odd = 0.0;
    for (int k = 1; k < n; k += 2) odd += sample(k);
    double even = 0.0;
    for (int k = 2; k < n; k += 2) even += sample(k);
    double total = sample(0) + 4.0 * odd + 2.0 * even + sample(n);
    return (p.delta() / 3.0) * total;
}

double integrate(const QuadratureSpec& spec) {
    switch (spec.rule) {
        case QuadRule::riemann_left:
        case QuadRule::riemann_right:
        case QuadRule::riemann_midpoint:
            return riemann(spec);
        case QuadRule::trapezoid:
            return trapezoid(spec);
        case QuadRule::simpson:
            return simpson(spec);
    }
    throw std::invalid_argument("integrate: unknown rule");
}

} // namespace numcal
