#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pfr/model.hpp"
#include "pfr/quadrature.hpp"
#include "pfr/signal.hpp"
#include "pfr/strategy.hpp"

namespace pfr {

enum class CostRoute { Analytic, ReducedQuadrature, OutletQuadrature, Pde };

/// A cost evaluation together with the route that produced it and the
/// constraint residuals of the inputs. Inadmissible inputs are evaluated
/// anyway and flagged.
struct CostReport {
    double J = 0.0;
    CostRoute route = CostRoute::Analytic;
    std::optional<double> mean_residual;
    std::optional<double> weighted_residual;
    std::optional<double> residence_residual;
    bool within_bounds = true;
    bool admissible = true;
    std::vector<std::pair<std::string, double>> improvement_vs;
};

/// Reduced cost integrand: the outlet concentration as a function of the
/// inlet value alone. Phi fixes the travel time at L/v (constant flow), Psi
/// at tau (controlled flow under the residence-time constraint); both are
/// increasing and concave for n > 1.
struct ReducedIntegrand {
    enum class Form { Phi, Psi };

    ReactorParams params;
    double horizon;  // L/v for Phi, tau for Psi
    Form form;

    static ReducedIntegrand make_phi(const ReactorParams& p) {
        return {p, p.L / p.v, Form::Phi};
    }
    static ReducedIntegrand make_psi(const ReactorParams& p, double tau) {
        return {p, tau, Form::Psi};
    }

    double operator()(double xi) const {
        if (!(xi > 0.0)) throw std::invalid_argument("reduced integrand: xi must be positive");
        return decay_along_characteristic(xi, params.n, params.k, horizon);
    }

    double prime(double xi) const {
        if (!(xi > 0.0)) throw std::invalid_argument("reduced integrand: xi must be positive");
        const double n = params.n;
        if (n == 1.0) return std::exp(-params.k * horizon);
        const double base = 1.0 + params.k * horizon * (n - 1.0) * std::pow(xi, n - 1.0);
        if (base <= 0.0) throw ExtinctionError("reduced integrand: extinct (n < 1 regime)");
        return std::pow(base, -n / (n - 1.0));
    }

    double second(double xi) const {
        if (!(xi > 0.0)) throw std::invalid_argument("reduced integrand: xi must be positive");
        const double n = params.n;
        if (n == 1.0) return 0.0;
        const double kh = params.k * horizon * (n - 1.0);
        const double base = 1.0 + kh * std::pow(xi, n - 1.0);
        if (base <= 0.0) throw ExtinctionError("reduced integrand: extinct (n < 1 regime)");
        return -kh * n * std::pow(base, -(2.0 * n - 1.0) / (n - 1.0)) * std::pow(xi, n - 2.0);
    }
};

inline double phi(const ReactorParams& p, double xi) {
    return ReducedIntegrand::make_phi(p)(xi);
}
inline double phi_prime(const ReactorParams& p, double xi) {
    return ReducedIntegrand::make_phi(p).prime(xi);
}
inline double phi_second(const ReactorParams& p, double xi) {
    return ReducedIntegrand::make_phi(p).second(xi);
}
inline double psi(const ReactorParams& p, double tau, double xi) {
    return ReducedIntegrand::make_psi(p, tau)(xi);
}
inline double psi_prime(const ReactorParams& p, double tau, double xi) {
    return ReducedIntegrand::make_psi(p, tau).prime(xi);
}

namespace detail {

/// (1/tau) int f(c(t)) dt, exact piecewise sum for step signals, adaptive
/// quadrature otherwise.
inline double reduced_average(const ReducedIntegrand& f, const PeriodicSignal& c,
                              CostRoute& route) {
    const double tau = c.period();
    if (c.is_piecewise_like()) {
        route = CostRoute::Analytic;
        double acc = 0.0;
        for (std::size_t i = 0; i < c.values().size(); ++i)
            acc += f(c.values()[i]) * c.piece_length(i);
        return acc / tau;
    }
    route = CostRoute::ReducedQuadrature;
    return integrate([&](double t) { return f(c(t)); }, 0.0, tau) / tau;
}

/// (1/tau) int f(c(t)) v(t) dt with the same exactness contract.
inline double reduced_weighted_average(const ReducedIntegrand& f, const PeriodicSignal& c,
                                       const PeriodicSignal& v, CostRoute& route) {
    const double tau = c.period();
    if (c.is_piecewise_like() && v.is_piecewise_like()) {
        route = CostRoute::Analytic;
        std::vector<double> grid(c.breakpoints());
        grid.insert(grid.end(), v.breakpoints().begin(), v.breakpoints().end());
        grid.push_back(tau);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i)
            acc += f(c(grid[i])) * v(grid[i]) * (grid[i + 1] - grid[i]);
        return acc / tau;
    }
    route = CostRoute::ReducedQuadrature;
    std::vector<double> splits;
    if (c.is_piecewise_like())
        splits.insert(splits.end(), c.breakpoints().begin(), c.breakpoints().end());
    if (v.is_piecewise_like())
        splits.insert(splits.end(), v.breakpoints().begin(), v.breakpoints().end());
    return integrate_split([&](double t) { return f(c(t)) * v(t); }, 0.0, tau, splits) / tau;
}

}  // namespace detail

/// Mean outlet molar flux (1/tau) int C(L,t) v(t) dt by adaptive quadrature
/// of the exact characteristic solution. Independent of the reduced forms.
inline CostReport cost_outlet(const PeriodicSignal& c, const PeriodicSignal* flow,
                              const ReactorParams& params) {
    params.validate();
    const double tau = c.period();
    CostReport report;
    report.route = CostRoute::OutletQuadrature;
    std::vector<double> splits;
    if (!flow) {
        // outlet discontinuities are inlet breakpoints delayed by L/v
        if (c.is_piecewise_like())
            for (double b : c.breakpoints()) splits.push_back(wrap_time(b + params.L / params.v, tau));
        report.J = params.v *
                   integrate_split([&](double t) { return eval_constant_flow(params, c, params.L, t); },
                                   0.0, tau, splits) /
                   tau;
        return report;
    }
    if (flow->period() != tau) throw std::invalid_argument("cost_outlet: periods differ");
    const CumulativeFlow cf(*flow);
    if (flow->is_piecewise_like())
        for (double b : flow->breakpoints()) splits.push_back(b);
    if (c.is_piecewise_like()) {
        // an inlet breakpoint b reaches the outlet when V(t) = V(b) + L
        for (double b : c.breakpoints()) {
            const double t_exit = cf.inverse(cf(b) + params.L);
            splits.push_back(wrap_time(t_exit, tau));
        }
    }
    report.J = integrate_split(
                   [&](double t) {
                       return eval_controlled_flow(params, c, cf, params.L, t) * (*flow)(t);
                   },
                   0.0, tau, splits) /
               tau;
    return report;
}

/// Cost of a single-input control: J = (v/tau) int Phi(c(t)) dt for n != 1
/// and J = v * mean(c) * exp(-kL/v) for n = 1.
inline CostReport cost_single(const PeriodicSignal& c, const ReactorParams& params,
                              const IsoperimetricSpec& spec) {
    params.validate();
    if (c.period() != spec.tau) throw std::invalid_argument("cost_single: period mismatch");
    CostReport report;
    const auto adm = check_admissible_single(c, spec);
    report.mean_residual = adm.mean_residual;
    report.within_bounds = adm.within_bounds;
    report.admissible = adm.admissible();
    if (params.first_order()) {
        report.route = CostRoute::Analytic;
        report.J = params.v * mean(c) * std::exp(-params.k * params.L / params.v);
        return report;
    }
    const auto integrand = ReducedIntegrand::make_phi(params);
    report.J = params.v * detail::reduced_average(integrand, c, report.route);
    return report;
}

/// Cost of a (concentration, flow-rate) pair. Requires the residence-time
/// constraint for the reduction to Psi; pairs violating it fall back to
/// outlet quadrature.
inline CostReport cost_pair(const PeriodicSignal& c, const PeriodicSignal& v,
                            const ReactorParams& params, const IsoperimetricSpec& spec) {
    params.validate();
    if (c.period() != spec.tau || v.period() != spec.tau)
        throw std::invalid_argument("cost_pair: period mismatch");
    const auto adm = check_admissible_pair(c, v, spec, params.L);
    CostReport report;
    report.weighted_residual = adm.weighted_residual;
    report.residence_residual = adm.residence_residual;
    report.within_bounds = adm.within_bounds;
    report.admissible = adm.admissible();
    if (std::abs(adm.residence_residual) > 1e-9 * std::max(1.0, params.L)) {
        const double J = cost_outlet(c, &v, params).J;
        report.route = CostRoute::OutletQuadrature;
        report.J = J;
        return report;
    }
    if (params.first_order()) {
        report.route = CostRoute::Analytic;
        report.J = weighted_mean(c, v) * std::exp(-params.k * spec.tau);
        return report;
    }
    const auto integrand = ReducedIntegrand::make_psi(params, spec.tau);
    report.J = detail::reduced_weighted_average(integrand, c, v, report.route);
    return report;
}

/// Reduced-form pair cost without a spec (no residual annotation); used where
/// only the value is needed. Still requires the residence-time constraint.
inline double cost_pair_reduced(const PeriodicSignal& c, const PeriodicSignal& v,
                                const ReactorParams& params) {
    params.validate();
    if (c.period() != v.period()) throw std::invalid_argument("cost_pair_reduced: period mismatch");
    const double tau = c.period();
    if (std::abs(tau * mean(v) - params.L) > 1e-9 * std::max(1.0, params.L))
        throw std::invalid_argument("cost_pair_reduced: residence-time constraint violated");
    if (params.first_order()) return weighted_mean(c, v) * std::exp(-params.k * tau);
    CostRoute route;
    return detail::reduced_weighted_average(ReducedIntegrand::make_psi(params, tau), c, v, route);
}

enum class ConvexityRegime {
    NeutralN1,            // n = 1: every admissible control gives the same cost
    ConvexSteadyOptimal,  // n < 1 with C_min above the convexity threshold
    ConcaveBangOptimal,   // n > 1
    Unclassified          // n < 1 below the threshold
};

inline ConvexityRegime convexity_regime(const ReactorParams& params,
                                        const IsoperimetricSpec& spec) {
    params.validate();
    if (params.first_order()) return ConvexityRegime::NeutralN1;
    if (params.n > 1.0) return ConvexityRegime::ConcaveBangOptimal;
    const double threshold =
        std::pow(params.v / (params.k * params.L * (1.0 - params.n)), -1.0 / (1.0 - params.n));
    return spec.C_min > threshold ? ConvexityRegime::ConvexSteadyOptimal
                                  : ConvexityRegime::Unclassified;
}

}  // namespace pfr
