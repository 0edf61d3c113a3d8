#include "numcal/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "numcal/error.hpp"

namespace numcal {

namespace {

void check_query(const SeriesQuery& q) {
    if (q.start < 0) throw std::invalid_argument("series: start must be >= 0");
    if (q.max_terms < q.window) throw std::invalid_argument("series: max_terms must be >= window");
    if (q.max_terms < q.start) throw std::invalid_argument("series: max_terms must be >= start");
    if (q.checkpoints < 2) throw std::invalid_argument("series: checkpoints must be >= 2");
    if (!(q.tol > 0)) throw std::invalid_argument("series: tol must be > 0");
    if (q.window < 2) throw std::invalid_argument("series: window must be >= 2");
}

} // namespace

std::vector<std::int64_t> series_checkpoints(std::int64_t start, std::int64_t max_terms,
                                             int checkpoints) {
    // Halve down from max_terms so the spacing stays geometric all the way
    // to the final checkpoint, then nudge alternate entries to the other
    // index parity (a partial sum sampled only at even counts would hide
    // an alternating series).
    std::vector<std::int64_t> raw{max_terms};
    std::int64_t floor = std::max<std::int64_t>(start, 1);
    while (raw.back() > floor && static_cast<int>(raw.size()) < checkpoints) {
        raw.push_back(std::max(floor, (raw.back() + 1) / 2));
    }
    std::reverse(raw.begin(), raw.end());

    const int last = static_cast<int>(raw.size()) - 1;
    std::vector<std::int64_t> out;
    out.reserve(raw.size());
    for (int j = 0; j <= last; ++j) {
        std::int64_t n = raw[static_cast<std::size_t>(j)];
        if (j < last) n += (last - j) & 1;
        n = std::clamp(n, std::max<std::int64_t>(start, 0), max_terms);
        if (out.empty() || n > out.back()) out.push_back(n);
    }
    if (out.empty() || out.back() != max_terms) out.push_back(max_terms);
    return out;
}

SampleTrace partial_sums(const SeriesQuery& q) {
    check_query(q);
    const auto& vars = q.term.variables();
    if (vars.size() > 1) throw eval_error("series term has more than one free variable");
    if (vars.size() == 1 && vars[0] != q.index_var)
        throw eval_error("series term variable '" + vars[0] + "' does not match '" +
                         q.index_var + "'");
    const bool has_slot = !vars.empty();

    std::vector<std::int64_t> marks = series_checkpoints(q.start, q.max_terms, q.checkpoints);

    SampleTrace trace;
    trace.entries.reserve(marks.size());
    double sum = 0.0;
    std::int64_t k = q.start;
    int j = 0;
    for (std::int64_t mark : marks) {
        for (; k <= mark; ++k) {
            double kd = static_cast<double>(k);
            double term = has_slot ? q.term.eval_slots({&kd, 1}) : q.term.eval_slots({});
            if (!std::isfinite(term))
                throw std::domain_error("non-finite series term at k = " + std::to_string(k));
            sum += term;
        }
        trace.entries.push_back({j++, static_cast<double>(mark), sum});
    }
    return trace;
}

LimitVerdict classify_series(const SeriesQuery& q) {
    return classify(partial_sums(q), q.tol, q.window);
}

} // namespace numcal
