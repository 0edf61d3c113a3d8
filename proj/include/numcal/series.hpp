#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "numcal/expr.hpp"
#include "numcal/limits.hpp"
#include "numcal/trace.hpp"

namespace numcal {

struct SeriesQuery {
    Expr term;                   // expression in the index variable
    std::string index_var;
    std::int64_t start = 1;
    std::int64_t max_terms = 10000;   // largest index summed; final checkpoint
    int checkpoints = 30;             // cap on recorded partial sums
    double tol = 1e-8;
    int window = 3;
};

/// Partial sums S_N = sum_{k=start..N} term(k) recorded at geometrically
/// spaced checkpoints (roughly doubling, last one exactly max_terms).
/// Checkpoints alternate index parity so period-two oscillation stays
/// visible in the recorded sums. Trace entry j holds x = N_j and
/// fx = S_{N_j}. Throws domain_error naming k if a term is non-finite.
SampleTrace partial_sums(const SeriesQuery& query);

/// classify() applied to the partial-sum checkpoints with query.tol and
/// query.window; nothing else.
LimitVerdict classify_series(const SeriesQuery& query);

/// The checkpoint indices partial_sums() will record.
std::vector<std::int64_t> series_checkpoints(std::int64_t start, std::int64_t max_terms,
                                             int checkpoints);

} // namespace numcal
