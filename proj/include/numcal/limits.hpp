#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "numcal/expr.hpp"
#include "numcal/trace.hpp"

namespace numcal {

enum class Side { left, right, both };

enum class TargetKind { finite, plus_infinity, minus_infinity };

struct LimitTarget {
    TargetKind kind = TargetKind::finite;
    double a = 0.0;              // meaningful for finite targets
    Side side = Side::both;      // meaningful for finite targets

    static LimitTarget finite(double a, Side side = Side::both) {
        return {TargetKind::finite, a, side};
    }
    static LimitTarget plus_infinity() { return {TargetKind::plus_infinity, 0.0, Side::both}; }
    static LimitTarget minus_infinity() { return {TargetKind::minus_infinity, 0.0, Side::both}; }
};

struct LimitQuery {
    Expr expr;
    std::string var;
    LimitTarget target;
    int max_index = 12;          // n: probes run k = 0..n
    double tol = 1e-8;           // relative when |last sample| > 1, else absolute
    int window = 3;              // consecutive-agreement count
    bool perturb = false;        // randomize at-infinity probes
    std::uint64_t seed = 0;
};

enum class VerdictKind {
    converged,
    diverges_plus_inf,
    diverges_minus_inf,
    no_limit_oscillation,
    inconclusive,
};

std::string_view to_string(VerdictKind kind);

/// Classification of a sampled sequence. `value` is finite iff converged.
/// Two-sided queries carry the left trace in `trace` and the right trace
/// in `second_trace`.
struct LimitVerdict {
    VerdictKind kind = VerdictKind::inconclusive;
    double value = std::numeric_limits<double>::quiet_NaN();
    int iterations_used = 0;
    SampleTrace trace;
    std::optional<SampleTrace> second_trace;
};

/// Probe f at a +/- 10^-k for k = 0..n. Produces all n + 1 samples;
/// classification is a separate step.
SampleTrace sample_one_sided(const Expr& f, std::string_view var, double a, Side side, int n);

/// Probe f at sign * (10^k + eps_k) for k = 0..n, where eps_k = 0 unless
/// perturb is set, in which case eps_k is drawn uniformly from [0, 1) by a
/// splitmix64 stream seeded with `seed`.
SampleTrace sample_at_infinity(const Expr& f, std::string_view var, TargetKind sign, int n,
                               bool perturb, std::uint64_t seed);

/// Heuristic verdict over a sampled sequence. Rules, applied to the final
/// `window` samples / consecutive differences, first match wins:
///
///  1. any NaN in the window: all NaN -> no-limit, otherwise inconclusive;
///  2. converged: every |difference| <= tol (relative when |last| > 1) and
///     the last sample is finite; the value is the last sample;
///  3. diverges: samples share a sign, magnitudes non-decreasing, and the
///     last magnitude reaches 1e12 (infinities of one sign also land here);
///  4. diverges (growth): differences share a sign and do not shrink --
///     measured per probe gap when the gaps widen (samples marching to
///     +/-inf), raw when the gaps narrow (samples closing on a point);
///  5. no limit: differences alternate sign with non-shrinking magnitude
///     (each at least half the previous), or the samples repeat an exact
///     cycle.
///
/// Anything else is inconclusive. NaN never counts toward convergence.
LimitVerdict classify(const SampleTrace& trace, double tol, int window);

/// Full limit estimation: sampling with early stop (sampling halts at the
/// first k >= window where the converged criterion holds), classification,
/// and two-sided combination.
LimitVerdict limit(const LimitQuery& query);

} // namespace numcal
