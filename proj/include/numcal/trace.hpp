#pragma once

#include <cstddef>
#include <vector>

namespace numcal {

/// One probe of an iterative sampler: index, probe point, sample value.
/// The meaning of `x` depends on the producer: a probe location for limit
/// samplers, a step size h for difference quotients, a partial-sum index
/// for series.
struct SampleEntry {
    int k;
    double x;
    double fx;
};

/// Ordered record of probes with consecutive indices starting at 0.
struct SampleTrace {
    std::vector<SampleEntry> entries;

    bool empty() const noexcept { return entries.empty(); }
    std::size_t size() const noexcept { return entries.size(); }
    const SampleEntry& back() const { return entries.back(); }
    const SampleEntry& operator[](std::size_t i) const { return entries[i]; }
};

} // namespace numcal
