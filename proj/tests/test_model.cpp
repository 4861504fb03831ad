#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pfr/model.hpp"
#include "pfr/rng.hpp"

using namespace pfr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ReactorParams case_params() { return {2.0, 0.001, 1.0, 0.01}; }

PeriodicSignal case_bang() {
    return PeriodicSignal::piecewise(100.0, {0.0, 50.0}, {1.5, 0.5});
}

PeriodicSignal case_flow() {
    return PeriodicSignal::piecewise(100.0, {0.0, 50.0}, {0.005, 0.015});
}

/// Delay a step signal by dt (periodic wrap), rebuilding the piece layout.
PeriodicSignal shift_signal(const PeriodicSignal& s, double dt) {
    const double tau = s.period();
    std::vector<std::pair<double, double>> edges;  // (new breakpoint, value)
    for (std::size_t i = 0; i < s.breakpoints().size(); ++i)
        edges.emplace_back(wrap_time(s.breakpoints()[i] + dt, tau), s.values()[i]);
    std::sort(edges.begin(), edges.end());
    std::vector<double> bps, vals;
    if (edges.front().first != 0.0) {
        bps.push_back(0.0);
        vals.push_back(edges.back().second);  // piece wrapping over the period end
    }
    for (const auto& [b, value] : edges) {
        bps.push_back(b);
        vals.push_back(value);
    }
    return PeriodicSignal::piecewise(tau, bps, vals);
}

}  // namespace

TEST_CASE("pure transport carries the inlet unchanged") {
    const ReactorParams p{1.0, 0.0, 1.0, 0.01};
    const auto inlet = PeriodicSignal::steady(100.0, 1.0);
    for (double x : {0.0, 0.25, 1.0})
        for (double t : {-3.0, 0.0, 17.5}) CHECK(eval_constant_flow(p, inlet, x, t) == 1.0);
}

TEST_CASE("steady case-study outlet concentration") {
    const auto inlet = PeriodicSignal::steady(100.0, 1.0);
    const double c_out = eval_constant_flow(case_params(), inlet, 1.0, 12.3);
    CHECK_THAT(c_out, WithinAbs(1.0 / 1.1, 1e-15));
    // consistency with the published steady cost J = v * C(L, .)
    CHECK_THAT(case_params().v * c_out, WithinRel(9.0909090909090909e-3, 1e-12));
}

TEST_CASE("bang inlet spot values against an ODE integrator") {
    const auto params = case_params();
    const auto bang = case_bang();
    // travel time L/v = 100 s; the characteristic through t picks up the
    // inlet value at t - 100
    const double expect_25 = oracle::rk4_decay(1.5, params.n, params.k, 100.0);
    const double expect_75 = oracle::rk4_decay(0.5, params.n, params.k, 100.0);
    CHECK_THAT(eval_constant_flow(params, bang, 1.0, 25.0), WithinAbs(expect_25, 1e-10));
    CHECK_THAT(eval_constant_flow(params, bang, 1.0, 75.0), WithinAbs(expect_75, 1e-10));
}

TEST_CASE("controlled flow reduces to constant flow for steady flow-rate") {
    const auto params = case_params();
    const auto inlet = case_bang();
    const CumulativeFlow cf(PeriodicSignal::steady(100.0, params.v));
    for (int i = 0; i <= 9; ++i) {
        for (int j = 0; j <= 9; ++j) {
            const double x = i / 9.0;
            const double t = -30.0 + j * 20.0;
            CHECK_THAT(eval_controlled_flow(params, inlet, cf, x, t),
                       WithinAbs(eval_constant_flow(params, inlet, x, t), 1e-12));
        }
    }
}

TEST_CASE("two-input schedule reproduces the published outlet flux") {
    const auto params = case_params();
    const ConcentrationField field(params, case_bang(), case_flow());
    const auto flow = case_flow();
    const double J = oracle::simpson([&](double t) { return field.outlet(t) * flow(t); }, 0.0,
                                     50.0, 50000) /
                         100.0 +
                     oracle::simpson([&](double t) { return field.outlet(t) * flow(t); }, 50.0,
                                     100.0, 50000) /
                         100.0;
    CHECK_THAT(J, WithinRel(6.832298136645963e-3, 1e-6));
}

TEST_CASE("first-order kinetics with unit residence time is a pure delay") {
    const ReactorParams params{1.0, 0.001, 1.0, 0.01};
    const auto inlet = case_bang();
    const auto flow = case_flow();  // integrates to L over one period
    const CumulativeFlow cf(flow);
    const double decay = std::exp(-params.k * 100.0);
    for (double t : {5.0, 31.0, 50.0, 77.7, 99.0})
        CHECK_THAT(eval_controlled_flow(params, inlet, cf, 1.0, t),
                   WithinAbs(inlet(t - 100.0) * decay, 1e-12));
}

TEST_CASE("outlet depends on the inlet only through the delayed value") {
    const auto params = case_params();
    const auto inlet = case_bang();
    const auto delayed = shift_signal(inlet, 13.25);
    for (double t : {3.0, 26.0, 55.5, 90.0})
        CHECK_THAT(eval_constant_flow(params, delayed, 1.0, t),
                   WithinAbs(eval_constant_flow(params, inlet, 1.0, t - 13.25), 1e-13));
}

TEST_CASE("periodicity of the concentration field") {
    const auto params = case_params();
    const ConcentrationField constant_flow(params, case_bang());
    const ConcentrationField controlled(params, case_bang(), case_flow());
    for (int i = 1; i <= 5; ++i) {
        for (int j = 0; j < 7; ++j) {
            const double x = i / 5.0;
            const double t = j * 14.0;
            CHECK_THAT(constant_flow(x, t + 100.0), WithinAbs(constant_flow(x, t), 1e-12));
            CHECK_THAT(controlled(x, t + 100.0), WithinAbs(controlled(x, t), 1e-12));
        }
    }
}

TEST_CASE("concentration decays monotonically along characteristics") {
    Rng rng(31);
    for (double n : {0.5, 1.0, 2.0, 3.0}) {
        for (int rep = 0; rep < 20; ++rep) {
            const double c0 = rng.uniform(0.3, 2.0);
            const double k = rng.uniform(0.0005, 0.002);
            double prev = c0;
            for (double s : {10.0, 40.0, 90.0}) {
                const double z = decay_along_characteristic(c0, n, k, s);
                CHECK(z <= prev + 1e-15);
                CHECK(z > 0.0);
                prev = z;
            }
        }
    }
}

TEST_CASE("controlled-flow solution agrees with an independent integrator") {
    // smooth inputs so that the reference emission time can be bisected from
    // a plain Simpson antiderivative
    const auto inlet = PeriodicSignal::sinusoid(100.0, 1.0, 0.4, 0.2);
    Rng rng(37);
    for (int rep = 0; rep < 3; ++rep) {
        const auto flow = PeriodicSignal::sinusoid(100.0, rng.uniform(0.008, 0.012),
                                                   rng.uniform(0.001, 0.004),
                                                   rng.uniform(0.0, 6.0));
        const ReactorParams params{rng.uniform(1.5, 2.5), 0.001, 1.0, 0.01};
        const CumulativeFlow cf(flow);
        for (int i = 0; i < 10; ++i) {
            const double x = rng.uniform(0.05, 1.0);
            const double t = rng.uniform(0.0, 100.0);
            // independent emission time: bisect the Simpson antiderivative
            auto travelled = [&](double r) {
                return oracle::simpson([&](double u) { return flow(u); }, r, t, 2000);
            };
            double lo = t - 400.0, hi = t;
            while (hi - lo > 1e-11) {
                const double mid = 0.5 * (lo + hi);
                (travelled(mid) > x ? lo : hi) = mid;
            }
            const double r = 0.5 * (lo + hi);
            const double expect = oracle::rk4_decay(inlet(r), params.n, params.k, t - r);
            CHECK_THAT(eval_controlled_flow(params, inlet, cf, x, t), WithinRel(expect, 1e-8));
        }
    }
}

TEST_CASE("extinction inside the tube raises a domain error") {
    const ReactorParams params{0.5, 0.1, 1.0, 0.01};
    const auto inlet = PeriodicSignal::steady(100.0, 1.0);
    CHECK_THROWS_AS(eval_constant_flow(params, inlet, 1.0, 0.0), ExtinctionError);
    // short distances are still fine
    CHECK_NOTHROW(eval_constant_flow(params, inlet, 0.01, 0.0));
}

TEST_CASE("evaluation preconditions") {
    const auto params = case_params();
    const auto inlet = PeriodicSignal::steady(100.0, 1.0);
    CHECK_THROWS_AS(eval_constant_flow(params, inlet, -0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_constant_flow(params, inlet, 1.5, 0.0), std::invalid_argument);
    const auto negative_inlet = PeriodicSignal::piecewise(100.0, {0.0, 50.0}, {1.0, -0.2});
    CHECK_THROWS_AS(eval_constant_flow(params, negative_inlet, 0.5, 0.0), std::invalid_argument);
}
