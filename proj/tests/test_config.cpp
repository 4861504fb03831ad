#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>

#include "pfr/config.hpp"
#include "pfr/runner.hpp"

using namespace pfr;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

TEST_CASE("defaults reproduce the case-study parameters") {
    const auto config = parse_config_text("");
    CHECK(config.run_type == RunType::CaseStudy);
    CHECK(config.reactor.n == 2.0);
    CHECK(config.reactor.k == 0.001);
    CHECK(config.reactor.L == 1.0);
    CHECK(config.reactor.v == 0.01);
    CHECK(config.spec.tau == 100.0);
    CHECK(config.spec.C_bar == 1.0);
    CHECK(config.spec.C_min == 0.5);
    CHECK(config.spec.C_max == 1.5);
    REQUIRE(config.spec.has_flow());
    CHECK(*config.spec.v_bar == 0.01);
    CHECK(config.seed == 12345);
    CHECK(config.threads == 1);
}

TEST_CASE("full scenario round trip") {
    const std::string text = R"(# scenario
[run]
type = trial
seed = 777
threads = 2

[reactor]
n = 1.5
k = 0.002

[spec]
tau = 50
C_bar = 0.9
v_bar = none
v_min = none
v_max = none

[control.c]
kind = piecewise
breakpoints = 0, 10, 30
values = 1.2, 0.7, 1.1

[trial]
samples = 13
pieces = 5
two_input = false

[output]
csv = out.csv
table = false
)";
    const auto config = parse_config_text(text);
    CHECK(config.run_type == RunType::Trial);
    CHECK(config.seed == 777);
    CHECK(config.threads == 2);
    CHECK(config.reactor.n == 1.5);
    CHECK(config.reactor.L == 1.0);  // default retained
    CHECK(config.spec.tau == 50.0);
    CHECK_FALSE(config.spec.has_flow());
    REQUIRE(config.control_c.has_value());
    const auto c = config.control_c->build(config.spec.tau);
    CHECK(c.breakpoints() == std::vector<double>{0.0, 10.0, 30.0});
    CHECK(config.trial.samples == 13);
    CHECK_FALSE(config.output.table);
    CHECK(config.output.csv == "out.csv");
}

TEST_CASE("parse errors carry the line and the field") {
    try {
        parse_config_text("[run]\ntype = warp\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK_THAT(e.what(), ContainsSubstring("line 2"));
        CHECK_THAT(e.what(), ContainsSubstring("type"));
    }

    CHECK_THROWS_AS(parse_config_text("[run]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[nowhere]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("loose = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[reactor]\nn = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[reactor]\nn 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[control.c]\nbreakpoints = 0,,5\n"), ConfigError);

    try {
        parse_config_text("[spec]\n\ntau = -1e3x\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK_THAT(e.what(), ContainsSubstring("line 3"));
        CHECK_THAT(e.what(), ContainsSubstring("tau"));
    }
}

TEST_CASE("signal serialization round trip") {
    for (const auto& s :
         {PeriodicSignal::steady(100.0, 1.25),
          PeriodicSignal::piecewise(100.0, {0.0, 12.5, 80.0}, {1.5, 0.5, 1.0}),
          PeriodicSignal::sinusoid(100.0, 1.0, 0.5, 0.25)}) {
        const auto text = "[control.c]\n" + describe_signal(s);
        const auto config = parse_config_text(text);
        REQUIRE(config.control_c.has_value());
        const auto rebuilt = config.control_c->build(100.0);
        CHECK(rebuilt.kind() == s.kind());
        for (double t : {0.0, 12.5, 40.0, 99.0}) CHECK(rebuilt(t) == s(t));
    }
}

TEST_CASE("scenario validation distinguishes config from feasibility errors") {
    auto config = parse_config_text("[spec]\nC_min = 2\n");
    CHECK_THROWS_AS(validate_scenario(config), InfeasibleSpecError);

    auto bad_signal = parse_config_text("[control.c]\nkind = piecewise\nbreakpoints = 5\nvalues = 1\n");
    CHECK_THROWS_AS(validate_scenario(bad_signal), ConfigError);

    // two-input trial on a tube longer than the flow can traverse
    auto infeasible = parse_config_text("[run]\ntype = trial\n[trial]\ntwo_input = true\n[reactor]\nL = 2\n");
    CHECK_THROWS_AS(validate_scenario(infeasible), InfeasibleSpecError);
}

TEST_CASE("evaluate run produces route-agreeing costs") {
    auto config = parse_config_text(R"([run]
type = evaluate

[control.c]
kind = piecewise
breakpoints = 0, 50
values = 1.5, 0.5
)");
    config.output.table = false;
    std::ostringstream sink;
    RunOptions opts;
    opts.check = true;
    CHECK(run_scenario(config, opts, sink) == 0);
    CHECK_THAT(sink.str(), ContainsSubstring("[CHECK PASS]"));
}

TEST_CASE("trial run honors the check flag") {
    auto config = parse_config_text(R"([run]
type = trial
seed = 99

[trial]
samples = 15
pieces = 6
)");
    config.output.table = false;
    std::ostringstream sink;
    CHECK(run_scenario(config, RunOptions{true, ""}, sink) == 0);
}
