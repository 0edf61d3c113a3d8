#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "numcal/error.hpp"
#include "numcal/expr.hpp"
#include "numcal/series.hpp"

using namespace numcal;

namespace {

bool same_bits(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

SeriesQuery query(const char* term, std::int64_t start = 1, std::int64_t max_terms = 10000) {
    SeriesQuery q;
    q.term = parse(term);
    q.index_var = "k";
    q.start = start;
    q.max_terms = max_terms;
    return q;
}

} // namespace

TEST_CASE("checkpoints are geometric, parity-alternating, and end at max_terms") {
    auto cps = series_checkpoints(1, 10000, 30);
    REQUIRE(!cps.empty());
    CHECK(cps.back() == 10000);
    for (std::size_t i = 1; i < cps.size(); ++i) CHECK(cps[i] > cps[i - 1]);
    // roughly doubling through the tail
    for (std::size_t i = cps.size() - 4; i + 1 < cps.size(); ++i) {
        double ratio = static_cast<double>(cps[i + 1]) / static_cast<double>(cps[i]);
        CHECK(ratio >= 1.5);
        CHECK(ratio <= 2.5);
    }
    // the last four checkpoints alternate index parity
    for (std::size_t i = cps.size() - 3; i + 1 < cps.size(); ++i) {
        CHECK((cps[i] & 1) != (cps[i + 1] & 1));
    }
}

TEST_CASE("partial sums of a fast geometric series") {
    SampleTrace t = partial_sums(query("1/2^k", 1, 64));
    CHECK(t.back().x == 64.0);
    // S_64 = 1 - 2^-64
    CHECK(t.back().fx == doctest::Approx(1.0).epsilon(1e-12));

    // running sums are recorded at each checkpoint
    SampleTrace zero = partial_sums(query("0"));
    for (const auto& entry : zero.entries) CHECK(entry.fx == 0.0);

    SampleTrace count = partial_sums(query("1"));
    for (const auto& entry : count.entries) CHECK(entry.fx == entry.x);
}

TEST_CASE("non-finite terms are reported with the index") {
    SeriesQuery q = query("1/(k - 5)", 1, 100);
    try {
        partial_sums(q);
        FAIL("expected domain_error");
    } catch (const std::domain_error& err) {
        CHECK(std::string(err.what()).find("k = 5") != std::string::npos);
    }
}

TEST_CASE("classification examples") {
    CHECK(classify_series(query("1/2^k")).kind == VerdictKind::converged);
    CHECK(classify_series(query("1/2^k")).value == doctest::Approx(1.0).epsilon(1e-6));

    // term = k: partial sums grow without bound; the growth rule catches
    // it well before the magnitude bound would
    CHECK(classify_series(query("k")).kind == VerdictKind::diverges_plus_inf);

    // harmonic: too slow for the heuristics under defaults
    CHECK(classify_series(query("1/k")).kind == VerdictKind::inconclusive);
}

TEST_CASE("geometric oracle: sum from k=1 is r/(1-r)") {
    const double ratios[] = {0.5, -0.5, 0.9, -0.8, 0.3};
    for (double r : ratios) {
        CAPTURE(r);
        std::string term = "(" + format_double(r) + ")^k";
        LimitVerdict v = classify_series(query(term.c_str()));
        REQUIRE(v.kind == VerdictKind::converged);
        double target = r / (1.0 - r);
        CHECK(std::fabs(v.value - target) <= 1e-6 * std::max(1.0, std::fabs(target)));
    }
}

TEST_CASE("alternating unit terms never classify as converged") {
    LimitVerdict v = classify_series(query("(-1)^k"));
    CHECK(v.kind != VerdictKind::converged);
    // with parity-alternating checkpoints the oscillation is visible
    CHECK(v.kind == VerdictKind::no_limit_oscillation);
}

TEST_CASE("composition: classify_series equals classify over partial_sums") {
    for (const char* term : {"1/2^k", "k", "1/k", "(-1)^k", "(0.9)^k", "1/k^2"}) {
        CAPTURE(term);
        SeriesQuery q = query(term);
        LimitVerdict direct = classify_series(q);
        LimitVerdict composed = classify(partial_sums(q), q.tol, q.window);
        CHECK(direct.kind == composed.kind);
        CHECK(same_bits(direct.value, composed.value));
        REQUIRE(direct.trace.size() == composed.trace.size());
        for (std::size_t i = 0; i < direct.trace.size(); ++i) {
            CHECK(same_bits(direct.trace[i].fx, composed.trace[i].fx));
        }
    }
}

TEST_CASE("query validation") {
    SeriesQuery q = query("1/k");
    q.start = -1;
    CHECK_THROWS_AS(partial_sums(q), std::invalid_argument);
    q = query("1/k");
    q.max_terms = 2;
    CHECK_THROWS_AS(partial_sums(q), std::invalid_argument);
    q = query("1/k", 100, 50);
    CHECK_THROWS_AS(partial_sums(q), std::invalid_argument);
    CHECK_THROWS_AS(partial_sums(query("x + k")), eval_error);
}

TEST_CASE("start offsets shift the sum window") {
    // sum_{k=3..10000} 2^-k = 2^-2 - 2^-10000 ~ 0.25
    LimitVerdict v = classify_series(query("1/2^k", 3));
    REQUIRE(v.kind == VerdictKind::converged);
    CHECK(v.value == doctest::Approx(0.25).epsilon(1e-9));
}
