#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "numcal/error.hpp"
#include "numcal/expr.hpp"

using namespace numcal;

namespace {

bool same_bits(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

// Depth-bounded random expression text in one variable.
std::string random_expr(std::mt19937_64& rng, int depth) {
    auto pick = [&rng](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    if (depth == 0) {
        switch (pick(4)) {
            case 0: return "x";
            case 1: return "2";
            case 2: return "0.5";
            default: return "3.25";
        }
    }
    switch (pick(8)) {
        case 0: return random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1);
        case 1: return random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1);
        case 2: return random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1);
        case 3: return random_expr(rng, depth - 1) + " / " + random_expr(rng, depth - 1);
        case 4: return "(" + random_expr(rng, depth - 1) + ")^2";
        case 5: return "-(" + random_expr(rng, depth - 1) + ")";
        case 6: {
            static const char* fns[] = {"sin", "cos", "tan", "exp", "sqrt", "abs", "atan"};
            return std::string(fns[pick(7)]) + "(" + random_expr(rng, depth - 1) + ")";
        }
        default: return "(" + random_expr(rng, depth - 1) + ")";
    }
}

} // namespace

TEST_CASE("parse builds the expected trees") {
    // "x^2 + 1" is Binary(+, Binary(^, x, 2), 1)
    Expr e = parse("x^2 + 1");
    REQUIRE(e.nodes().size() == 5);
    const auto& root = std::get<Expr::Binary>(e.nodes().back());
    CHECK(root.op == BinaryOp::add);
    const auto& pow_node = std::get<Expr::Binary>(e.nodes()[root.lhs]);
    CHECK(pow_node.op == BinaryOp::pow);
    CHECK(std::get<Expr::Variable>(e.nodes()[pow_node.lhs]).slot == 0);
    CHECK(std::get<Expr::Constant>(e.nodes()[pow_node.rhs]).value == 2.0);
    CHECK(std::get<Expr::Constant>(e.nodes()[root.rhs]).value == 1.0);

    // "sin(x)/x" is Binary(/, Call(sin, x), x)
    Expr q = parse("sin(x)/x");
    const auto& div_node = std::get<Expr::Binary>(q.nodes().back());
    CHECK(div_node.op == BinaryOp::div);
    CHECK(std::get<Expr::Call>(q.nodes()[div_node.lhs]).fn == Builtin::sin);
    CHECK(std::holds_alternative<Expr::Variable>(q.nodes()[div_node.rhs]));
}

TEST_CASE("parse errors carry the offset") {
    CHECK_THROWS_AS(parse("2 +"), parse_error);
    try {
        parse("2 +");
    } catch (const parse_error& err) {
        CHECK(err.offset() == 3);
    }
    try {
        parse("log(x)");
    } catch (const parse_error& err) {
        CHECK(err.offset() == 0);
        CHECK(std::string(err.what()).find("ln or log10") != std::string::npos);
    }
    CHECK_THROWS_AS(parse(""), parse_error);
    CHECK_THROWS_AS(parse("(x"), parse_error);
    CHECK_THROWS_AS(parse("x + * y"), parse_error);
    CHECK_THROWS_AS(parse("foo(3)"), parse_error);
    CHECK_THROWS_AS(parse("1.2.3"), parse_error);
}

TEST_CASE("grammar shape") {
    // precedence: ^ above unary minus above * / above + -
    CHECK(eval(parse("-2^2"), {}) == -4.0);
    CHECK(eval(parse("(-2)^2"), {}) == 4.0);
    CHECK(eval(parse("2 + 3 * 4"), {}) == 14.0);
    CHECK(eval(parse("2 ^ 3 ^ 2"), {}) == 512.0);  // right-associative
    CHECK(eval(parse("8 / 4 / 2"), {}) == 1.0);    // left-associative
    CHECK(eval(parse("2^-1"), {}) == 0.5);
    CHECK(eval(parse("1 - 2 - 3"), {}) == -4.0);
    // implicit multiplication is rejected
    CHECK_THROWS_AS(parse("2x"), parse_error);
    // reserved constants
    CHECK(eval(parse("pi"), {}) == doctest::Approx(3.141592653589793).epsilon(1e-15));
    CHECK(eval(parse("e"), {}) == doctest::Approx(2.718281828459045).epsilon(1e-15));
}

TEST_CASE("eval examples") {
    CHECK(eval(parse("x"), {{"x", 7.0}}) == 7.0);
    CHECK(eval(parse("1/x"), {{"x", 0.0}}) == std::numeric_limits<double>::infinity());
    CHECK(std::isnan(eval(parse("sqrt(x)"), {{"x", -1.0}})));
    CHECK(std::isnan(eval(parse("0/x"), {{"x", 0.0}})));
    CHECK(std::isnan(eval(parse("ln(x)"), {{"x", -2.0}})));
    CHECK(eval(parse("ln(x)"), {{"x", 0.0}}) == -std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(eval(parse("x + y"), {{"x", 1.0}}), eval_error);
    // negative base with non-integer exponent is NaN; integer exponent is exact
    CHECK(std::isnan(eval(parse("(-2)^0.5"), {})));
    CHECK(eval(parse("(-1)^3"), {}) == -1.0);
    CHECK(eval(parse("(-1)^4"), {}) == 1.0);
}

TEST_CASE("eval_vec examples") {
    Expr square = parse("x^2");
    std::vector<double> xs{1.0, 2.0, 3.0};
    CHECK(eval_vec(square, "x", xs) == std::vector<double>{1.0, 4.0, 9.0});

    CHECK(eval_vec(parse("x"), "x", std::vector<double>{}).empty());

    Expr s = parse("sin(x)");
    std::vector<double> pts{0.0, 3.141592653589793};
    auto vec = eval_vec(s, "x", pts);
    CHECK(same_bits(vec[0], eval(s, {{"x", pts[0]}})));
    CHECK(same_bits(vec[1], eval(s, {{"x", pts[1]}})));

    CHECK_THROWS_AS(eval_vec(parse("x + y"), "x", xs), eval_error);
}

TEST_CASE("round-trip: parse(format(parse(t))) == parse(t)") {
    const char* corpus[] = {
        "x",           "42",              "0.5",               "x^2 + 1",
        "sin(x)/x",    "-x^2",            "(-x)^2",            "2^3^2",
        "(2^3)^2",     "a - (b - c)",     "a - b - c",         "x * -y",
        "-(x + y)",    "-(x * y)",        "1/(1 + x^2)",       "exp(-x)",
        "ln(x)",       "log10(x)",        "sqrt(abs(x))",      "atan(x) * 4",
        "pi",          "e^x",             "x/2 + x/3",         "(x + 1) * (x - 1)",
        "tan(x/4)",    "cos(x)^2 + sin(x)^2",                  "x^0.5",
        "2e3",         "1.5e-2 * x",      "x_1 + x_2",         "abs(x)/x",
        "(2*x + 1)/x", "x^2 - 2*x + 1",   "-(-x)",             "--x",
        "x - -y",      "3/x/y",           "x^(y + 1)",         "5*x",
        "0.1 + 0.2",   "x*y*z",           "x/(y*z)",           "sin(cos(tan(x)))",
        "1e-8",        "123456789",       "x^2^3",             "(x)",
        "sqrt(x^2 + y^2)",                "exp(x)/x^2",        "1 - exp(-2*x)",
    };
    for (const char* text : corpus) {
        CAPTURE(text);
        Expr once = parse(text);
        Expr twice = parse(format(once));
        CHECK(once == twice);
    }
}

TEST_CASE("scalar/vector agreement on random expressions") {
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> point(-10.0, 10.0);
    int checked = 0;
    for (int round = 0; round < 60; ++round) {
        std::string text = random_expr(rng, 3);
        Expr e = parse(text);
        if (e.variables().size() > 1) continue;

        std::vector<double> xs(37);
        for (double& x : xs) x = point(rng);
        auto serial = eval_vec_serial(e, "x", xs);
        auto parallel = eval_vec_parallel(e, "x", xs);
        auto dispatched = eval_vec(e, "x", xs);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            CAPTURE(text);
            CAPTURE(xs[i]);
            double scalar = eval(e, {{"x", xs[i]}});
            CHECK(same_bits(serial[i], scalar));
            CHECK(same_bits(parallel[i], scalar));
            CHECK(same_bits(dispatched[i], scalar));
        }
        ++checked;
    }
    CHECK(checked >= 40);
}

TEST_CASE("parallel kernel agrees with serial on large inputs") {
    Expr e = parse("sin(x) * x + x^2 / (1 + abs(x))");
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> point(-50.0, 50.0);
    std::vector<double> xs(20000);
    for (double& x : xs) x = point(rng);
    auto serial = eval_vec_serial(e, "x", xs);
    auto parallel = eval_vec_parallel(e, "x", xs);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        REQUIRE(same_bits(serial[i], parallel[i]));
    }
}

TEST_CASE("purity: repeated evaluation is bit-identical") {
    Expr e = parse("sin(x)^2 + exp(x/3) - ln(abs(x) + 1)");
    for (double x : {0.1, -2.5, 7.0, 1e-9}) {
        double first = eval(e, {{"x", x}});
        double second = eval(e, {{"x", x}});
        CHECK(same_bits(first, second));
    }
}

TEST_CASE("a shared Expr evaluates safely from concurrent threads") {
    Expr e = parse("sin(x) * exp(x/7) + x^3/(1 + x^2)");
    std::vector<double> xs(5000);
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> point(-30.0, 30.0);
    for (double& x : xs) x = point(rng);

    std::vector<double> expected(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) expected[i] = eval(e, {{"x", xs[i]}});

    std::vector<double> got(xs.size());
    const std::int64_t n = static_cast<std::int64_t>(xs.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
        double slot = xs[static_cast<std::size_t>(i)];
        got[static_cast<std::size_t>(i)] = e.eval_slots({&slot, 1});
    }
    for (std::size_t i = 0; i < xs.size(); ++i) REQUIRE(same_bits(got[i], expected[i]));
}

TEST_CASE("round-trip on random expressions") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 200; ++round) {
        std::string text = random_expr(rng, 4);
        CAPTURE(text);
        Expr once = parse(text);
        CHECK(once == parse(format(once)));
    }
}

TEST_CASE("parser rejects hostile input without crashing") {
    // deep nesting hits the depth limit instead of the stack
    std::string deep(100000, '(');
    deep += "x";
    deep.append(100000, ')');
    CHECK_THROWS_AS(parse(deep), parse_error);
    CHECK_THROWS_AS(parse(std::string(100000, '-') + "x"), parse_error);

    // random byte soup either parses or throws parse_error; anything else
    // (crash, other exception) fails the test
    std::mt19937_64 rng(0xFEED);
    const char charset[] = "xy019.+-*/^()ae sinlogqrt_\\\"";
    for (int round = 0; round < 3000; ++round) {
        std::string text;
        int len = 1 + static_cast<int>(rng() % 24);
        for (int i = 0; i < len; ++i) text += charset[rng() % (sizeof(charset) - 1)];
        try {
            Expr e = parse(text);
            CHECK(parse(format(e)) == e);
        } catch (const parse_error&) {
            // expected for most inputs
        }
    }
}

TEST_CASE("format uses shortest round-trip numbers") {
    CHECK(format(parse("0.1")) == "0.1");
    CHECK(format(parse("2")) == "2");
    CHECK(format(parse("1e30")) == "1e+30");
    CHECK(format_double(0.30000000000000004) == "0.30000000000000004");
}
