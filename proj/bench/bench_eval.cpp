// Compares the serial reference kernels against the OpenMP paths:
// elementwise expression evaluation and the vectorized Riemann sum.
// Also verifies bit-equality between the paths on every run.

#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "numcal/expr.hpp"
#include "numcal/quad.hpp"

using namespace numcal;

namespace {

double wall() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

bool vectors_identical(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
    }
    return true;
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("openmp enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("openmp disabled (serial build)\n");
#endif

    Expr e = parse("sin(x) * x + x^2 / (1 + abs(x))");
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> point(-100.0, 100.0);

    std::printf("\nelementwise evaluation of %s\n", format(e).c_str());
    std::printf("%12s %14s %14s %10s %8s\n", "points", "serial (ms)", "parallel (ms)", "speedup",
                "bits");
    for (std::size_t n : {100000ull, 1000000ull, 4000000ull}) {
        std::vector<double> xs(n);
        for (double& x : xs) x = point(rng);

        double t0 = wall();
        auto serial = eval_vec_serial(e, "x", xs);
        double t1 = wall();
        auto parallel = eval_vec_parallel(e, "x", xs);
        double t2 = wall();

        std::printf("%12zu %14.2f %14.2f %9.2fx %8s\n", n, (t1 - t0) * 1e3, (t2 - t1) * 1e3,
                    (t1 - t0) / (t2 - t1), vectors_identical(serial, parallel) ? "equal" : "DIFFER");
    }

    std::printf("\nright riemann sum of %s on [0, 20]\n", format(e).c_str());
    std::printf("%12s %14s %16s %10s %8s\n", "n", "loop (ms)", "vectorized (ms)", "speedup",
                "bits");
    for (int n : {100000, 1000000, 4000000}) {
        QuadratureSpec spec{e, "x", Partition(0.0, 20.0, n), QuadRule::riemann_right};

        double t0 = wall();
        double loop_value = riemann(spec);
        double t1 = wall();
        double vec_value = riemann_vectorized(spec);
        double t2 = wall();

        bool equal = std::bit_cast<std::uint64_t>(loop_value) ==
                     std::bit_cast<std::uint64_t>(vec_value);
        std::printf("%12d %14.2f %16.2f %9.2fx %8s\n", n, (t1 - t0) * 1e3, (t2 - t1) * 1e3,
                    (t1 - t0) / (t2 - t1), equal ? "equal" : "DIFFER");
    }
    return 0;
}
