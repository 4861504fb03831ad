#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pfr/model.hpp"
#include "pfr/signal.hpp"

namespace pfr {

/// Discretization for the explicit upwind solver. The time step is derived
/// from the CFL number against the fastest flow and then reduced per segment
/// so that period boundaries and signal breakpoints land exactly on the grid.
struct Grid {
    int nx = 256;
    double cfl = 0.9;
    int warmup_periods = 3;

    void validate() const {
        if (nx < 16) throw std::invalid_argument("grid: nx must be at least 16");
        if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("grid: CFL must be in (0, 1]");
        if (warmup_periods < 0) throw std::invalid_argument("grid: negative warm-up");
    }
};

struct OutletTrace {
    double period_start = 0.0;
    std::vector<double> times;   // absolute sample times, both period ends included
    std::vector<double> values;  // outlet concentration C(L, t)
};

struct SimResult {
    std::vector<OutletTrace> periods;  // warm-up periods plus the two sampled ones
    long clamp_events = 0;
    double dx = 0.0;
    double dt_max = 0.0;
};

using FieldObserver = std::function<void(double t, const std::vector<double>& cells)>;

/// First-order upwind march of dC/dt + v(t) dC/dx = -k C^n with Dirichlet
/// inlet data. Returns the outlet trace of every simulated period
/// (warmup_periods + 2, so the last two can be compared for periodicity).
inline SimResult simulate(const ReactorParams& params, const PeriodicSignal& inlet,
                          const PeriodicSignal* flow, const Grid& grid,
                          const FieldObserver& observer = {}) {
    params.validate();
    grid.validate();
    if (flow && flow->period() != inlet.period())
        throw std::invalid_argument("simulate: inlet and flow must share the period");
    if (flow && !(flow->lo() > 0.0))
        throw std::invalid_argument("simulate: flow must be strictly positive");

    const double tau = inlet.period();
    const double v_max = flow ? flow->hi() : params.v;
    SimResult result;
    result.dx = params.L / grid.nx;
    result.dt_max = grid.cfl * result.dx / v_max;

    // per-period step schedule: exact landing on breakpoints and period ends
    std::vector<double> nodes{0.0, tau};
    if (inlet.is_piecewise_like())
        nodes.insert(nodes.end(), inlet.breakpoints().begin(), inlet.breakpoints().end());
    if (flow && flow->is_piecewise_like())
        nodes.insert(nodes.end(), flow->breakpoints().begin(), flow->breakpoints().end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    struct Segment {
        double start, dt;
        long steps;
    };
    std::vector<Segment> schedule;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double len = nodes[i + 1] - nodes[i];
        if (len <= 0.0) continue;
        const long steps = std::max(1L, static_cast<long>(std::ceil(len / result.dt_max - 1e-12)));
        schedule.push_back({nodes[i], len / steps, steps});
    }

    const double kin_n = params.n;
    auto reaction = [&](double c) {
        if (c <= 0.0) return 0.0;
        if (kin_n == 1.0) return params.k * c;
        if (kin_n == 2.0) return params.k * c * c;
        return params.k * std::pow(c, kin_n);
    };

    std::vector<double> cells(static_cast<std::size_t>(grid.nx) + 1, inlet(0.0));
    const int total_periods = grid.warmup_periods + 2;
    for (int p = 0; p < total_periods; ++p) {
        OutletTrace trace;
        trace.period_start = p * tau;
        trace.times.push_back(trace.period_start);
        trace.values.push_back(cells.back());
        for (const Segment& seg : schedule) {
            double t = trace.period_start + seg.start;
            for (long m = 0; m < seg.steps; ++m) {
                const double v_now = flow ? (*flow)(t) : params.v;
                const double courant = v_now * seg.dt / result.dx;
                double upstream_old = cells[0];
                for (std::size_t i = 1; i < cells.size(); ++i) {
                    const double old = cells[i];
                    double next = old - courant * (old - upstream_old) - seg.dt * reaction(old);
                    if (next < 0.0) {
                        next = 0.0;
                        ++result.clamp_events;
                    }
                    cells[i] = next;
                    upstream_old = old;
                }
                t = trace.period_start + seg.start + (m + 1) * seg.dt;
                cells[0] = inlet(t);
                trace.times.push_back(t);
                trace.values.push_back(cells.back());
                if (observer) observer(t, cells);
            }
        }
        result.periods.push_back(std::move(trace));
    }
    return result;
}

/// Sup-norm difference of two aligned outlet traces (consecutive periods of
/// the same simulation). Below 1e-6 * C_max counts as the periodic regime.
inline double periodic_residual(const OutletTrace& a, const OutletTrace& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("periodic_residual: traces are not aligned");
    double sup = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        sup = std::max(sup, std::abs(a.values[i] - b.values[i]));
    return sup;
}

/// Mean outlet flux (1/tau) int C(L,t) v(t) dt from a simulated trace,
/// trapezoidal in C with the flow evaluated mid-sample (exact for step flows
/// since breakpoints land on the grid).
inline double trace_flux_cost(const OutletTrace& trace, const ReactorParams& params,
                              const PeriodicSignal* flow) {
    if (trace.times.size() < 2) throw std::invalid_argument("trace_flux_cost: empty trace");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < trace.times.size(); ++i) {
        const double dt = trace.times[i + 1] - trace.times[i];
        const double v_mid =
            flow ? (*flow)(0.5 * (trace.times[i] + trace.times[i + 1])) : params.v;
        acc += 0.5 * (trace.values[i] + trace.values[i + 1]) * v_mid * dt;
    }
    return acc / (trace.times.back() - trace.times.front());
}

/// Compactly supported polynomial bump phi(x,t) = B((x-x0)/rx) B((t-t0)/rt)
/// with B(u) = (1-u^2)^p on |u| < 1; smooth enough to probe the weak form.
struct BumpTestFunction {
    double x_center, t_center;
    double x_halfwidth, t_halfwidth;
    int smoothness = 4;

    static double profile(double u, int p) {
        if (std::abs(u) >= 1.0) return 0.0;
        return std::pow(1.0 - u * u, p);
    }
    static double profile_derivative(double u, int p) {
        if (std::abs(u) >= 1.0) return 0.0;
        return -2.0 * p * u * std::pow(1.0 - u * u, p - 1);
    }

    double value(double x, double t) const {
        return profile((x - x_center) / x_halfwidth, smoothness) *
               profile((t - t_center) / t_halfwidth, smoothness);
    }
    double ddx(double x, double t) const {
        return profile_derivative((x - x_center) / x_halfwidth, smoothness) / x_halfwidth *
               profile((t - t_center) / t_halfwidth, smoothness);
    }
    double ddt(double x, double t) const {
        return profile((x - x_center) / x_halfwidth, smoothness) *
               profile_derivative((t - t_center) / t_halfwidth, smoothness) / t_halfwidth;
    }
};

/// Residual of the weak-solution integral identity
/// int (C phi_t + v C phi_x - k C^n phi) dx dt
/// (integration by parts of C_t + v C_x + k C^n = 0 against a compactly
/// supported phi) over the bump's support, by tensor-product composite
/// two-point Gauss with points_per_axis quadrature points per axis. Tends to
/// zero under refinement for the exact characteristic field.
inline double weak_identity_residual(const ConcentrationField& field,
                                     const BumpTestFunction& bump, int points_per_axis) {
    if (points_per_axis < 2) throw std::invalid_argument("weak identity: need at least 2 points");
    const double L = field.params().L;
    if (!(bump.x_center - bump.x_halfwidth > 0.0 && bump.x_center + bump.x_halfwidth < L))
        throw std::invalid_argument("weak identity: bump support must lie strictly inside (0, L)");

    const int cells = points_per_axis / 2;
    const double x_lo = bump.x_center - bump.x_halfwidth;
    const double t_lo = bump.t_center - bump.t_halfwidth;
    const double hx = 2.0 * bump.x_halfwidth / cells;
    const double ht = 2.0 * bump.t_halfwidth / cells;
    const double node = 0.5 / std::numbers::sqrt3;  // two-point Gauss offsets
    const double offsets[2] = {0.5 - node, 0.5 + node};

    const double n = field.params().n;
    const double k = field.params().k;
    double acc = 0.0;
    for (int ix = 0; ix < cells; ++ix) {
        for (int a = 0; a < 2; ++a) {
            const double x = x_lo + (ix + offsets[a]) * hx;
            for (int it = 0; it < cells; ++it) {
                for (int b = 0; b < 2; ++b) {
                    const double t = t_lo + (it + offsets[b]) * ht;
                    const double C = field(x, t);
                    acc += (C * bump.ddt(x, t) + field.flow_rate(t) * C * bump.ddx(x, t) -
                            k * std::pow(C, n) * bump.value(x, t)) *
                           0.25 * hx * ht;
                }
            }
        }
    }
    return std::abs(acc);
}

}  // namespace pfr
