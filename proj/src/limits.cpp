#include "numcal/limits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "numcal/error.hpp"

namespace numcal {

namespace {

constexpr double kDivergenceBound = 1e12;
constexpr double kGrowthFactor = 0.9;      // non-shrinking threshold for rule 4
constexpr double kOscillationFactor = 0.5; // non-shrinking threshold for rule 5

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1) with 53 random bits
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
};

void check_query(const LimitQuery& q) {
    if (q.max_index < 2) throw std::invalid_argument("limit: n must be >= 2");
    if (!(q.tol > 0)) throw std::invalid_argument("limit: tol must be > 0");
    if (q.window < 2 || q.window > q.max_index)
        throw std::invalid_argument("limit: window must satisfy 2 <= window <= n");
}

int resolve_slot(const Expr& f, std::string_view var) {
    const auto& vars = f.variables();
    if (vars.size() > 1) throw eval_error("expression has more than one free variable");
    if (vars.size() == 1 && vars[0] != var)
        throw eval_error("expression variable '" + vars[0] + "' does not match '" +
                         std::string(var) + "'");
    return vars.empty() ? -1 : 0;
}

double eval_at(const Expr& f, int slot, double x) {
    if (slot < 0) {
        return f.eval_slots({});
    }
    return f.eval_slots({&x, 1});
}

} // namespace

std::string_view to_string(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::converged: return "converged";
        case VerdictKind::diverges_plus_inf: return "diverges_plus_inf";
        case VerdictKind::diverges_minus_inf: return "diverges_minus_inf";
        case VerdictKind::no_limit_oscillation: return "no_limit_oscillation";
        case VerdictKind::inconclusive: return "inconclusive";
    }
    return "?";
}

SampleTrace sample_one_sided(const Expr& f, std::string_view var, double a, Side side, int n) {
    if (side == Side::both) throw std::invalid_argument("sample_one_sided: side must be left or right");
    if (!std::isfinite(a)) throw std::invalid_argument("sample_one_sided: a must be finite");
    if (n < 0) throw std::invalid_argument("sample_one_sided: n must be >= 0");
    int slot = resolve_slot(f, var);
    double sign = side == Side::right ? 1.0 : -1.0;
    SampleTrace trace;
    trace.entries.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        double x = a + sign * pow10(-k);
        trace.entries.push_back({k, x, eval_at(f, slot, x)});
    }
    return trace;
}

SampleTrace sample_at_infinity(const Expr& f, std::string_view var, TargetKind sign, int n,
                               bool perturb, std::uint64_t seed) {
    if (sign == TargetKind::finite)
        throw std::invalid_argument("sample_at_infinity: sign must be an infinity");
    if (n < 0) throw std::invalid_argument("sample_at_infinity: n must be >= 0");
    int slot = resolve_slot(f, var);
    double s = sign == TargetKind::plus_infinity ? 1.0 : -1.0;
    SplitMix64 rng(seed);
    SampleTrace trace;
    trace.entries.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        double eps = perturb ? rng.next_unit() : 0.0;
        double x = s * (pow10(k) + eps);
        trace.entries.push_back({k, x, eval_at(f, slot, x)});
    }
    return trace;
}

LimitVerdict classify(const SampleTrace& trace, double tol, int window) {
    if (trace.empty()) throw std::invalid_argument("classify: trace is empty");
    if (!(tol > 0)) throw std::invalid_argument("classify: tol must be > 0");
    if (window < 2) throw std::invalid_argument("classify: window must be >= 2");

    LimitVerdict verdict;
    verdict.trace = trace;
    verdict.iterations_used = static_cast<int>(trace.size());

    const auto& e = trace.entries;
    const int m = static_cast<int>(e.size());
    const int ws = std::min(window, m);       // samples examined by value rules
    const int wd = std::min(window, m - 1);   // consecutive differences examined

    // Rule 1: NaN handling.
    int nan_count = 0;
    for (int i = m - ws; i < m; ++i) {
        if (std::isnan(e[i].fx)) ++nan_count;
    }
    if (nan_count > 0) {
        verdict.kind = nan_count == ws ? VerdictKind::no_limit_oscillation
                                       : VerdictKind::inconclusive;
        return verdict;
    }
    if (wd < 1) {
        verdict.kind = VerdictKind::inconclusive;
        return verdict;
    }

    std::vector<double> diffs, gaps;
    diffs.reserve(static_cast<std::size_t>(wd));
    gaps.reserve(static_cast<std::size_t>(wd));
    for (int j = m - wd; j < m; ++j) {
        diffs.push_back(e[j].fx - e[j - 1].fx);
        gaps.push_back(std::fabs(e[j].x - e[j - 1].x));
    }
    const double last = e[m - 1].fx;

    // Rule 2: converged.
    const double tol_eff = std::fabs(last) > 1.0 ? tol * std::fabs(last) : tol;
    bool cauchy = std::isfinite(last);
    for (double d : diffs) {
        cauchy = cauchy && std::fabs(d) <= tol_eff;
    }
    if (cauchy) {
        verdict.kind = VerdictKind::converged;
        verdict.value = last;
        return verdict;
    }

    // Rule 3: magnitude reaches the divergence bound.
    bool all_pos = true, all_neg = true, mono_mag = true, all_finite = true;
    for (int i = m - ws; i < m; ++i) {
        all_pos = all_pos && e[i].fx > 0;
        all_neg = all_neg && e[i].fx < 0;
        all_finite = all_finite && std::isfinite(e[i].fx);
        if (i > m - ws) mono_mag = mono_mag && std::fabs(e[i].fx) >= std::fabs(e[i - 1].fx);
    }
    if ((all_pos || all_neg) && mono_mag && std::fabs(last) >= kDivergenceBound) {
        verdict.kind = all_pos ? VerdictKind::diverges_plus_inf : VerdictKind::diverges_minus_inf;
        return verdict;
    }

    // Rule 4: monotone trend whose slope does not taper off. Probe gaps
    // decide the yardstick: widening gaps (marching to +/-inf) compare
    // per-gap rates, narrowing gaps (closing on a finite point) compare
    // the raw differences.
    if (all_finite && wd >= 2) {
        bool inc = true, dec = true, gaps_ok = true;
        for (std::size_t i = 0; i < diffs.size(); ++i) {
            inc = inc && diffs[i] > 0;
            dec = dec && diffs[i] < 0;
            gaps_ok = gaps_ok && gaps[i] > 0 && std::isfinite(gaps[i]);
        }
        if ((inc || dec) && gaps_ok) {
            bool widening = true, narrowing = true;
            for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
                widening = widening && gaps[i + 1] >= gaps[i];
                narrowing = narrowing && gaps[i + 1] <= gaps[i];
            }
            bool fired = false;
            if (widening) {
                fired = true;
                for (std::size_t i = 0; i + 1 < diffs.size(); ++i) {
                    double r0 = std::fabs(diffs[i]) / gaps[i];
                    double r1 = std::fabs(diffs[i + 1]) / gaps[i + 1];
                    fired = fired && r1 >= kGrowthFactor * r0;
                }
            } else if (narrowing) {
                fired = true;
                for (std::size_t i = 0; i + 1 < diffs.size(); ++i) {
                    fired = fired && std::fabs(diffs[i + 1]) >= kGrowthFactor * std::fabs(diffs[i]);
                }
            }
            if (fired) {
                verdict.kind = inc ? VerdictKind::diverges_plus_inf : VerdictKind::diverges_minus_inf;
                return verdict;
            }
        }
    }

    // Rule 5a: alternating differences with non-shrinking magnitude.
    if (wd >= 2) {
        bool alternating = true, nonshrink = true;
        for (std::size_t i = 0; i + 1 < diffs.size(); ++i) {
            alternating = alternating && diffs[i] * diffs[i + 1] < 0;
            nonshrink = nonshrink &&
                        std::fabs(diffs[i + 1]) >= kOscillationFactor * std::fabs(diffs[i]);
        }
        if (alternating && nonshrink) {
            verdict.kind = VerdictKind::no_limit_oscillation;
            return verdict;
        }
    }

    // Rule 5b: exact cycling among finite values.
    if (all_finite) {
        for (int period = 1; period < ws; ++period) {
            bool cycles = true;
            for (int i = m - ws + period; i < m; ++i) {
                cycles = cycles && e[i].fx == e[i - period].fx;
            }
            if (cycles) {
                verdict.kind = VerdictKind::no_limit_oscillation;
                return verdict;
            }
        }
    }

    verdict.kind = VerdictKind::inconclusive;
    return verdict;
}

namespace {

// Samples with early stop: halts at the first k >= window where classify
// already reports convergence, so re-classifying the truncated trace
// reproduces the reported verdict.
LimitVerdict run_single(const Expr& f, std::string_view var, const LimitQuery& q, Side side) {
    int slot = resolve_slot(f, var);
    SplitMix64 rng(q.seed);
    SampleTrace trace;
    trace.entries.reserve(static_cast<std::size_t>(q.max_index) + 1);
    for (int k = 0; k <= q.max_index; ++k) {
        double x = 0;
        if (q.target.kind == TargetKind::finite) {
            double sign = side == Side::right ? 1.0 : -1.0;
            x = q.target.a + sign * pow10(-k);
        } else {
            double sign = q.target.kind == TargetKind::plus_infinity ? 1.0 : -1.0;
            double eps = q.perturb ? rng.next_unit() : 0.0;
            x = sign * (pow10(k) + eps);
        }
        trace.entries.push_back({k, x, eval_at(f, slot, x)});
        if (k >= q.window) {
            LimitVerdict v = classify(trace, q.tol, q.window);
            if (v.kind == VerdictKind::converged) return v;
        }
    }
    return classify(trace, q.tol, q.window);
}

} // namespace

LimitVerdict limit(const LimitQuery& q) {
    check_query(q);
    if (q.target.kind != TargetKind::finite || q.target.side != Side::both) {
        Side side = q.target.kind == TargetKind::finite ? q.target.side : Side::right;
        return run_single(q.expr, q.var, q, side);
    }

    LimitVerdict left = run_single(q.expr, q.var, q, Side::left);
    LimitVerdict right = run_single(q.expr, q.var, q, Side::right);

    LimitVerdict out;
    out.trace = std::move(left.trace);
    out.second_trace = std::move(right.trace);
    out.iterations_used = std::max(left.iterations_used, right.iterations_used);

    if (left.kind == VerdictKind::converged && right.kind == VerdictKind::converged) {
        if (std::fabs(left.value - right.value) <= 10.0 * q.tol) {
            out.kind = VerdictKind::converged;
            out.value = (left.value + right.value) / 2.0;
        } else {
            // the sides disagree: a two-sided limit does not exist
            out.kind = VerdictKind::no_limit_oscillation;
        }
    } else if (left.kind == VerdictKind::converged) {
        out.kind = right.kind;
    } else if (right.kind == VerdictKind::converged) {
        out.kind = left.kind;
    } else if (left.kind == right.kind) {
        out.kind = left.kind;
    } else {
        out.kind = VerdictKind::no_limit_oscillation;
    }
    return out;
}

} // namespace numcal
