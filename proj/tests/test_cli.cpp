#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "numcal/expr.hpp"
#include "numcal/limits.hpp"
#include "numcal/quad.hpp"

using namespace numcal;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(NUMCAL_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) out.append(buf, got);
    int status = pclose(pipe);
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, out};
}

bool same_bits(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

} // namespace

TEST_CASE("eval evaluates and echoes inputs") {
    RunResult r = run_cli("eval --expr \"x^2 + 1\" --var x=3 --json");
    CHECK(r.exit_code == 0);
    json doc = json::parse(r.stdout_text);
    CHECK(doc["command"] == "eval");
    CHECK(doc["inputs"]["bindings"]["x"] == 3.0);
    CHECK(doc["value"] == 10.0);
    CHECK(doc["verdict"] == "value");
    CHECK(!doc.contains("error"));
    CHECK(!doc.contains("trace"));
}

TEST_CASE("limit converges on sin(x)/x and is bit-identical to the library") {
    RunResult r = run_cli("limit --expr \"sin(x)/x\" --var x --at 0 --side both --json");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.stdout_text);
    CHECK(doc["verdict"] == "converged");
    double cli_value = doc["value"].get<double>();

    LimitQuery q;
    q.expr = parse("sin(x)/x");
    q.var = "x";
    q.target = LimitTarget::finite(0.0, Side::both);
    LimitVerdict v = limit(q);
    CHECK(same_bits(cli_value, v.value));

    // defaults are echoed so the run is reproducible from its output
    CHECK(doc["inputs"]["n"] == 12);
    CHECK(doc["inputs"]["window"] == 3);
    CHECK(doc["inputs"]["perturb"] == false);
    CHECK(doc["inputs"]["seed"] == 0);
}

TEST_CASE("integrate value is bit-identical to the library call") {
    RunResult r = run_cli(
        "integrate --expr \"x^3\" --var x --from 0 --to 1 --rule simpson --n 2 --json");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.stdout_text);
    QuadratureSpec s{parse("x^3"), "x", Partition(0.0, 1.0, 2), QuadRule::simpson};
    CHECK(same_bits(doc["value"].get<double>(), simpson(s)));
    CHECK(doc["value"].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("byte-identical output across repeated invocations") {
    const std::string args =
        "limit --expr \"sin(x)\" --var x --to-infinity plus --perturb --seed 7 --trace --json";
    RunResult first = run_cli(args);
    RunResult second = run_cli(args);
    CHECK(first.exit_code == second.exit_code);
    CHECK(first.stdout_text == second.stdout_text);
    CHECK(!first.stdout_text.empty());
}

TEST_CASE("exit code 2: expression parse error with offset") {
    RunResult r = run_cli("limit --expr \"2 +\" --var x --at 0 --json");
    CHECK(r.exit_code == 2);
    json doc = json::parse(r.stdout_text);
    CHECK(doc["error"]["code"] == "parse_error");
    CHECK(doc["error"]["offset"] == 3);
    CHECK(!doc.contains("verdict"));
}

TEST_CASE("exit code 3: invalid arguments") {
    // odd n for simpson
    RunResult r = run_cli(
        "integrate --expr \"x\" --var x --from 0 --to 1 --rule simpson --n 3 --json");
    CHECK(r.exit_code == 3);
    json doc = json::parse(r.stdout_text);
    CHECK(doc["error"]["code"] == "invalid_argument");

    // both --at and --to-infinity
    r = run_cli("limit --expr \"x\" --var x --at 0 --to-infinity plus --json");
    CHECK(r.exit_code == 3);

    // unbound variable
    r = run_cli("eval --expr \"x + y\" --var x=1 --json");
    CHECK(r.exit_code == 3);
    doc = json::parse(r.stdout_text);
    CHECK(doc["error"]["code"] == "eval_error");

    // argv-level failures still produce one structured error under --json
    r = run_cli("limit --var x --at 0 --json");
    CHECK(r.exit_code == 3);
    doc = json::parse(r.stdout_text);
    CHECK(doc.contains("error"));

    // reserved constants cannot be bound as variables
    r = run_cli("eval --expr \"pi\" --var pi=3 --json");
    CHECK(r.exit_code == 3);
}

TEST_CASE("text-mode errors are duplicated on stderr") {
    std::string cmd = std::string(NUMCAL_CLI_PATH) +
                      " limit --expr \"2 +\" --var x --at 0 2>&1 1>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string err;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) err.append(buf, got);
    pclose(pipe);
    CHECK(err.find("parse_error") != std::string::npos);
}

TEST_CASE("exit code 4: inconclusive verdict is not an error document") {
    RunResult r = run_cli("series --term \"1/k\" --index k --json");
    CHECK(r.exit_code == 4);
    json doc = json::parse(r.stdout_text);
    CHECK(doc["verdict"] == "inconclusive");
    CHECK(!doc.contains("error"));
}

TEST_CASE("exit code 0 on definitive non-converged verdicts") {
    RunResult r = run_cli("limit --expr \"1/x\" --var x --at 0 --side right --json");
    CHECK(r.exit_code == 0);
    json doc = json::parse(r.stdout_text);
    CHECK(doc["verdict"] == "diverges_plus_inf");
}

TEST_CASE("trace appears exactly when requested") {
    RunResult without = run_cli("derivative --expr \"x^2\" --var x --at x=3 --json");
    json doc = json::parse(without.stdout_text);
    CHECK(!doc.contains("trace"));

    RunResult with = run_cli("derivative --expr \"x^2\" --var x --at x=3 --trace --json");
    doc = json::parse(with.stdout_text);
    REQUIRE(doc.contains("trace"));
    CHECK(doc["trace"].is_array());
    CHECK(doc["trace"].size() == 9);
    CHECK(doc["trace"][0]["k"] == 0);
    CHECK(doc["trace"][0]["x"] == 1.0);
}

TEST_CASE("two-sided limit traces are labeled") {
    RunResult r = run_cli("limit --expr \"x\" --var x --at 2 --side both --trace --json");
    json doc = json::parse(r.stdout_text);
    REQUIRE(doc.contains("trace"));
    CHECK(doc["trace"].contains("left"));
    CHECK(doc["trace"].contains("right"));
}

TEST_CASE("minimize reports the stop reason and final point") {
    RunResult r = run_cli(
        "minimize --expr \"x^2\" --vars x --x0 1 --alpha 0.1 --json");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.stdout_text);
    CHECK(doc["verdict"] == "gradient_tolerance_met");
    CHECK(std::fabs(doc["x"][0].get<double>()) <= 1e-5);

    // momentum with beta = 0 must match plain descent byte for byte on
    // everything except the echoed inputs
    RunResult plain = run_cli("minimize --expr \"x^2 + 3*y^2\" --vars x,y --x0 0.9,-1.1 "
                              "--alpha 0.05 --trace --json");
    RunResult mom = run_cli("minimize --expr \"x^2 + 3*y^2\" --vars x,y --x0 0.9,-1.1 "
                            "--alpha 0.05 --momentum 0 --trace --json");
    json pd = json::parse(plain.stdout_text);
    json md = json::parse(mom.stdout_text);
    CHECK(pd["trace"] == md["trace"]);
    CHECK(pd["value"] == md["value"]);
}

TEST_CASE("gradient emits the component vector") {
    RunResult r = run_cli(
        "gradient --expr \"x^2 + 10*y^2\" --vars x,y --at x=1,y=1 --json");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.stdout_text);
    REQUIRE(doc["value"].is_array());
    CHECK(doc["value"][0].get<double>() == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(doc["value"][1].get<double>() == doctest::Approx(20.0).epsilon(1e-3));
}

TEST_CASE("vectorized integrate matches the loop path bitwise") {
    const char* base = "integrate --expr \"sin(x)\" --var x --from 0 --to 3 --rule right --n 1000 --json";
    json loop = json::parse(run_cli(base).stdout_text);
    json vec = json::parse(run_cli(std::string(base) + " --vectorized").stdout_text);
    CHECK(same_bits(loop["value"].get<double>(), vec["value"].get<double>()));

    // --vectorized is a Riemann-only knob
    RunResult r = run_cli(
        "integrate --expr \"x\" --var x --from 0 --to 1 --rule simpson --n 2 --vectorized --json");
    CHECK(r.exit_code == 3);
}

TEST_CASE("text mode still reports results") {
    RunResult r = run_cli("eval --expr \"x\" --var x=7");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("value: 7") != std::string::npos);

    RunResult quiet = run_cli("eval --expr \"x\" --var x=7 --quiet");
    CHECK(quiet.stdout_text.find("command:") == std::string::npos);
    CHECK(quiet.stdout_text.find("value: 7") != std::string::npos);
}
