#pragma once

#include <string>

#include "numcal/expr.hpp"

namespace numcal {

/// Uniform partition of [a, b] into n subintervals. The last endpoint is
/// pinned to exactly b so endpoint semantics survive rounding.
struct Partition {
    Partition(double a, double b, int subintervals);

    double a;
    double b;
    int subintervals;

    double delta() const { return (b - a) / subintervals; }
    double point(int k) const { return k == subintervals ? b : a + k * delta(); }
};

enum class QuadRule { riemann_left, riemann_right, riemann_midpoint, trapezoid, simpson };

struct QuadratureSpec {
    Expr expr;
    std::string var;
    Partition partition;
    QuadRule rule;
};

/// Riemann sum for spec.rule in {left, right, midpoint}:
///   right:    delta * sum_{k=1..n} f(x_k)
///   left:     delta * sum_{k=0..n-1} f(x_k)
///   midpoint: delta * sum over subinterval midpoints
/// Summation is sequential in ascending k. Throws domain_error naming the
/// offending point if a sample is non-finite.
double riemann(const QuadratureSpec& spec);

/// Same sum computed as one vectorized evaluation followed by an ordered
/// reduction; bit-identical to riemann() on the same spec.
double riemann_vectorized(const QuadratureSpec& spec);

/// Composite trapezoid: delta * (f(x_0)/2 + sum_{k=1..n-1} f(x_k) + f(x_n)/2).
double trapezoid(const QuadratureSpec& spec);

/// Composite Simpson (n must be even):
///   (delta/3) * (f(x_0) + 4*sum_odd + 2*sum_even_interior + f(x_n)).
double simpson(const QuadratureSpec& spec);

/// Dispatch on spec.rule.
double integrate(const QuadratureSpec& spec);

} // namespace numcal
