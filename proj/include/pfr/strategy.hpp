#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfr/signal.hpp"

namespace pfr {

/// Raised when an isoperimetric specification cannot be met by any admissible
/// control (as opposed to a malformed input).
class InfeasibleSpecError : public std::runtime_error {
  public:
    explicit InfeasibleSpecError(const std::string& what) : std::runtime_error(what) {}
};

constexpr double kAdmissibleTol = 1e-10;

/// Period, mean targets and box bounds defining the admissible control
/// classes. The flow entries are absent for the single-input problem.
struct IsoperimetricSpec {
    double tau;
    double C_bar;
    double C_min, C_max;
    std::optional<double> v_bar, v_min, v_max;

    bool has_flow() const { return v_bar && v_min && v_max; }

    void validate() const {
        if (!(tau > 0.0)) throw InfeasibleSpecError("spec: tau must be positive");
        if (!(C_min > 0.0)) throw InfeasibleSpecError("spec: C_min must be positive");
        if (!(C_min < C_max)) throw InfeasibleSpecError("spec: C_min < C_max required");
        if (!(C_bar >= C_min && C_bar <= C_max))
            throw InfeasibleSpecError("spec: C_bar outside [C_min, C_max]");
        if (v_bar || v_min || v_max) {
            if (!has_flow()) throw InfeasibleSpecError("spec: incomplete flow bounds");
            if (!(*v_min > 0.0)) throw InfeasibleSpecError("spec: v_min must be positive");
            if (!(*v_min < *v_max)) throw InfeasibleSpecError("spec: v_min < v_max required");
            if (!(*v_bar >= *v_min && *v_bar <= *v_max))
                throw InfeasibleSpecError("spec: v_bar outside [v_min, v_max]");
        }
    }

    /// Full two-input feasibility against a reactor length: the residence-time
    /// constraint must be reachable and the weighted mean representable.
    void validate_pair(double L) const {
        validate();
        if (!has_flow()) throw InfeasibleSpecError("spec: flow bounds required");
        if (!(L >= *v_min * tau && L <= *v_max * tau))
            throw InfeasibleSpecError("spec: L outside [v_min*tau, v_max*tau]");
        const double product = C_bar * *v_bar * tau / L;
        if (!(product >= C_min && product <= C_max))
            throw InfeasibleSpecError("spec: C_bar*v_bar*tau/L outside [C_min, C_max]");
    }
};

struct SingleAdmissibility {
    double mean_residual;  // mean(c) - C_bar
    bool within_bounds;
    bool admissible() const {
        return within_bounds && std::abs(mean_residual) <= kAdmissibleTol;
    }
};

struct PairAdmissibility {
    double weighted_residual;   // (1/tau) int c v - C_bar*v_bar
    double residence_residual;  // int v - L
    bool within_bounds;
    bool admissible() const {
        return within_bounds && std::abs(weighted_residual) <= kAdmissibleTol &&
               std::abs(residence_residual) <= kAdmissibleTol;
    }
};

inline bool within(const PeriodicSignal& s, double lo, double hi) {
    return s.lo() >= lo && s.hi() <= hi;
}

inline SingleAdmissibility check_admissible_single(const PeriodicSignal& c,
                                                   const IsoperimetricSpec& spec) {
    return {mean(c) - spec.C_bar, within(c, spec.C_min, spec.C_max)};
}

inline PairAdmissibility check_admissible_pair(const PeriodicSignal& c,
                                               const PeriodicSignal& v,
                                               const IsoperimetricSpec& spec, double L) {
    if (c.period() != v.period())
        throw std::invalid_argument("check_admissible_pair: periods differ");
    if (!spec.has_flow())
        throw std::invalid_argument("check_admissible_pair: spec lacks flow bounds");
    const bool bounds = within(c, spec.C_min, spec.C_max) && within(v, *spec.v_min, *spec.v_max);
    return {weighted_mean(c, v) - spec.C_bar * *spec.v_bar,
            spec.tau * mean(v) - L, bounds};
}

namespace detail {

/// Assemble a periodic step signal from (length, value) runs laid head to
/// tail from t = 0; zero-length runs are dropped and a single run collapses
/// to a steady signal.
inline PeriodicSignal signal_from_runs(double tau,
                                       const std::vector<std::pair<double, double>>& runs) {
    std::vector<double> bps, vals;
    double t = 0.0;
    for (const auto& [len, value] : runs) {
        if (len <= 0.0) continue;
        if (!vals.empty() && vals.back() == value) {
            t += len;
            continue;
        }
        bps.push_back(t);
        vals.push_back(value);
        t += len;
    }
    if (vals.empty()) throw std::invalid_argument("signal_from_runs: empty layout");
    if (vals.size() == 1) return PeriodicSignal::steady(tau, vals[0]);
    return PeriodicSignal::piecewise(tau, std::move(bps), std::move(vals));
}

}  // namespace detail

/// Bang-bang control for the single-input problem: values {C_min, C_max} with
/// mu(A^-) = tau*(C_max - C_bar)/(C_max - C_min). The default (blocks = 1) is
/// the canonical one-switch layout with C_min first; blocks > 1 replicates the
/// same split inside each of `blocks` equal sub-intervals, preserving the
/// measures (and therefore the cost).
inline PeriodicSignal make_bang_single(const IsoperimetricSpec& spec, int blocks = 1) {
    spec.validate();
    if (blocks < 1) throw std::invalid_argument("make_bang_single: invalid switching pattern");
    const double mu_minus = spec.tau * (spec.C_max - spec.C_bar) / (spec.C_max - spec.C_min);
    if (mu_minus == 0.0) return PeriodicSignal::steady(spec.tau, spec.C_max);
    if (mu_minus == spec.tau) return PeriodicSignal::steady(spec.tau, spec.C_min);
    std::vector<std::pair<double, double>> runs;
    const double block = spec.tau / blocks;
    for (int b = 0; b < blocks; ++b) {
        runs.emplace_back(mu_minus / blocks, spec.C_min);
        runs.emplace_back(block - mu_minus / blocks, spec.C_max);
    }
    return detail::signal_from_runs(spec.tau, runs);
}

/// Sign of kappa decides how the concentration switching sets may overlap the
/// flow-rate switching sets (case (i) for kappa <= 0, case (ii) otherwise).
inline double kappa(const IsoperimetricSpec& spec, double L) {
    if (!spec.has_flow()) throw std::invalid_argument("kappa: spec lacks flow bounds");
    const double cv = spec.C_bar * *spec.v_bar;
    return spec.tau * *spec.v_max * (cv - spec.C_max * *spec.v_min) +
           spec.tau * *spec.v_min * (spec.C_min * *spec.v_max - cv) +
           L * (spec.C_max * *spec.v_min - spec.C_min * *spec.v_max);
}

enum class StrategyCase { CaseI, CaseII, SingleInput };

/// A (concentration, flow-rate) strategy with its switching-set measures and
/// kappa classification.
struct StrategyPair {
    PeriodicSignal c, v;
    double mu_A_plus, mu_A_minus;
    double mu_B_plus, mu_B_minus;
    double kappa;
    StrategyCase case_tag;
};

/// The bang-bang strategy pair: v takes {v_min, v_max} with measures fixed by
/// the residence-time constraint, c takes {C_min, C_max} with measures from
/// the kappa case split, and the interval layout realizes the maximal overlap
/// of A^+ with B^- (low concentration rides the fast flow). blocks > 1
/// replicates the layout per sub-interval with identical measures.
inline StrategyPair make_bang_pair(const IsoperimetricSpec& spec, double L, int blocks = 1) {
    spec.validate_pair(L);
    if (blocks < 1) throw std::invalid_argument("make_bang_pair: invalid switching pattern");
    const double tau = spec.tau;
    const double vmin = *spec.v_min, vmax = *spec.v_max;
    const double cv = spec.C_bar * *spec.v_bar;

    const double mu_B_plus = (L - tau * vmin) / (vmax - vmin);
    const double mu_B_minus = tau - mu_B_plus;
    const double kap = kappa(spec, L);

    double mu_A_plus, mu_A_minus;
    StrategyCase tag;
    std::vector<std::pair<double, double>> c_runs, v_runs;
    const double block = tau / blocks;
    if (kap <= 0.0) {
        tag = StrategyCase::CaseI;  // A^+ inside B^-
        mu_A_plus = (tau * cv - L * spec.C_min) / (vmin * (spec.C_max - spec.C_min));
        mu_A_minus = tau - mu_A_plus;
        for (int b = 0; b < blocks; ++b) {
            v_runs.emplace_back(mu_B_minus / blocks, vmin);
            v_runs.emplace_back(block - mu_B_minus / blocks, vmax);
            c_runs.emplace_back(mu_A_plus / blocks, spec.C_max);
            c_runs.emplace_back(block - mu_A_plus / blocks, spec.C_min);
        }
    } else {
        tag = StrategyCase::CaseII;  // A^- inside B^+
        mu_A_minus = (L * spec.C_max - tau * cv) / (vmax * (spec.C_max - spec.C_min));
        mu_A_plus = tau - mu_A_minus;
        for (int b = 0; b < blocks; ++b) {
            v_runs.emplace_back(mu_B_plus / blocks, vmax);
            v_runs.emplace_back(block - mu_B_plus / blocks, vmin);
            c_runs.emplace_back(mu_A_minus / blocks, spec.C_min);
            c_runs.emplace_back(block - mu_A_minus / blocks, spec.C_max);
        }
    }
    return {detail::signal_from_runs(tau, c_runs), detail::signal_from_runs(tau, v_runs),
            mu_A_plus, mu_A_minus, mu_B_plus, mu_B_minus, kap, tag};
}

struct Interval {
    double begin, end;
    double length() const { return end - begin; }
};
using IntervalSet = std::vector<Interval>;

inline double total_length(const IntervalSet& set) {
    double acc = 0.0;
    for (const auto& iv : set) acc += iv.length();
    return acc;
}

/// A level-set split of an admissible control: threshold plus the sets where
/// the signal sits (essentially) above and below it.
struct ClassSplit {
    double threshold;
    IntervalSet above, below;
};

namespace detail {

inline void append_interval(IntervalSet& set, double begin, double end) {
    if (end <= begin) return;
    set.push_back({begin, end});
}

inline void normalize(IntervalSet& set) {
    std::sort(set.begin(), set.end(),
              [](const Interval& a, const Interval& b) { return a.begin < b.begin; });
    IntervalSet merged;
    for (const auto& iv : set) {
        if (!merged.empty() && iv.begin <= merged.back().end) {
            merged.back().end = std::max(merged.back().end, iv.end);
        } else {
            merged.push_back(iv);
        }
    }
    set = std::move(merged);
}

inline ClassSplit classify_piecewise(const PeriodicSignal& c, double nu) {
    struct Piece {
        double begin, length, value;
    };
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i < c.values().size(); ++i)
        pieces.push_back({c.breakpoints()[i], c.piece_length(i), c.values()[i]});
    std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
        return a.value != b.value ? a.value > b.value : a.begin < b.begin;
    });

    ClassSplit split{};
    double remaining = nu;
    double lowest_included = pieces.front().value;
    std::optional<double> highest_excluded;
    for (const auto& piece : pieces) {
        if (remaining <= 0.0) {
            if (!highest_excluded) highest_excluded = piece.value;
            append_interval(split.below, piece.begin, piece.begin + piece.length);
            continue;
        }
        if (remaining >= piece.length) {
            append_interval(split.above, piece.begin, piece.begin + piece.length);
            lowest_included = piece.value;
            remaining -= piece.length;
        } else {
            // plateau split: take just enough of this piece to land on nu
            append_interval(split.above, piece.begin, piece.begin + remaining);
            append_interval(split.below, piece.begin + remaining, piece.begin + piece.length);
            lowest_included = piece.value;
            highest_excluded = piece.value;
            remaining = 0.0;
        }
    }
    if (highest_excluded)
        split.threshold = (*highest_excluded == lowest_included)
                              ? lowest_included
                              : 0.5 * (lowest_included + *highest_excluded);
    else
        split.threshold = lowest_included;  // A^- empty
    normalize(split.above);
    normalize(split.below);
    return split;
}

inline ClassSplit classify_sinusoid(const PeriodicSignal& c, double nu) {
    const double tau = c.period();
    ClassSplit split{};
    split.threshold = c.sin_mean() + c.sin_amplitude() * std::cos(std::numbers::pi * nu / tau);
    if (nu <= 0.0) {
        split.below.push_back({0.0, tau});
        return split;
    }
    if (nu >= tau) {
        split.above.push_back({0.0, tau});
        return split;
    }
    // {t : sin(w t + phase) >= q} maps to one angular arc per period
    const double q = std::cos(std::numbers::pi * nu / tau);
    const double w = c.omega();
    const double theta0 = std::asin(std::clamp(q, -1.0, 1.0));
    double t0 = (theta0 - c.sin_phase()) / w;
    double t1 = (std::numbers::pi - theta0 - c.sin_phase()) / w;
    t0 = wrap_time(t0, tau);
    t1 = t0 + nu;  // arc length equals the requested measure
    if (t1 <= tau) {
        append_interval(split.above, t0, t1);
        append_interval(split.below, 0.0, t0);
        append_interval(split.below, t1, tau);
    } else {
        append_interval(split.above, t0, tau);
        append_interval(split.above, 0.0, t1 - tau);
        append_interval(split.below, t1 - tau, t0);
    }
    normalize(split.above);
    normalize(split.below);
    return split;
}

}  // namespace detail

/// Extract the level-set structure of an admissible control: a threshold
/// C-tilde and a split (A^+, A^-) with ess-inf over A^+ >= C-tilde,
/// ess-sup over A^- <= C-tilde and mu(A^+) = nu exactly (plateaus are split).
inline ClassSplit classify_class_A(const PeriodicSignal& c, const IsoperimetricSpec& spec,
                                   double nu) {
    if (!(nu >= 0.0 && nu <= spec.tau))
        throw std::invalid_argument("classify_class_A: nu outside [0, tau]");
    if (!check_admissible_single(c, spec).admissible())
        throw std::invalid_argument("classify_class_A: control is not admissible");
    return c.is_piecewise_like() ? detail::classify_piecewise(c, nu)
                                 : detail::classify_sinusoid(c, nu);
}

namespace detail {

/// Mean (optionally flow-weighted) of clip(raw + shift) without materializing
/// the shifted signal.
inline double shifted_mean(const PeriodicSignal& raw, double lo, double hi, double shift,
                           const PeriodicSignal* flow) {
    double acc = 0.0;
    const double tau = raw.period();
    if (!flow) {
        for (std::size_t i = 0; i < raw.values().size(); ++i)
            acc += std::clamp(raw.values()[i] + shift, lo, hi) * raw.piece_length(i);
        return acc / tau;
    }
    std::vector<double> grid(raw.breakpoints());
    if (flow->is_piecewise_like())
        grid.insert(grid.end(), flow->breakpoints().begin(), flow->breakpoints().end());
    grid.push_back(tau);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double value = std::clamp(raw(grid[i]) + shift, lo, hi);
        if (flow->is_piecewise_like()) {
            acc += value * (*flow)(grid[i]) * (grid[i + 1] - grid[i]);
        } else {
            acc += value * sinusoid_integral(*flow, grid[i], grid[i + 1]);
        }
    }
    return acc / tau;
}

inline PeriodicSignal project_step_signal(const PeriodicSignal& raw, double lo, double hi,
                                          double target, const PeriodicSignal* flow) {
    const double floor_mean = shifted_mean(raw, lo, hi, lo - raw.hi(), flow);
    const double ceil_mean = shifted_mean(raw, lo, hi, hi - raw.lo(), flow);
    if (!(target >= floor_mean && target <= ceil_mean))
        throw InfeasibleSpecError("projection: target outside achievable range");

    // the shift-to-mean map is continuous, monotone and piecewise linear;
    // bisection bottoms out at ulp level well inside the 1e-12 fixed-point
    // requirement
    double a = lo - raw.hi(), b = hi - raw.lo();
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (a + b);
        (shifted_mean(raw, lo, hi, mid, flow) < target ? a : b) = mid;
    }
    const double shift = 0.5 * (a + b);

    std::vector<double> values(raw.values());
    for (double& value : values) value = std::clamp(value + shift, lo, hi);
    std::vector<std::pair<double, double>> runs;
    for (std::size_t i = 0; i < values.size(); ++i)
        runs.emplace_back(raw.piece_length(i), values[i]);
    return signal_from_runs(raw.period(), runs);
}

}  // namespace detail

/// Shift-and-clip projection of a step signal onto the mean constraint
/// mean(c) = target with values in [lo, hi].
inline PeriodicSignal project_to_mean(const PeriodicSignal& raw, double lo, double hi,
                                      double target) {
    if (!raw.is_piecewise_like())
        throw std::invalid_argument("projection requires a step signal");
    return detail::project_step_signal(raw, lo, hi, target, nullptr);
}

/// Same with the flow-weighted mean (1/tau) int c v = target.
inline PeriodicSignal project_to_weighted_mean(const PeriodicSignal& raw, double lo, double hi,
                                               const PeriodicSignal& flow, double target) {
    if (!raw.is_piecewise_like())
        throw std::invalid_argument("projection requires a step signal");
    if (raw.period() != flow.period())
        throw std::invalid_argument("projection: periods differ");
    return detail::project_step_signal(raw, lo, hi, target, &flow);
}

/// Project a raw in-bounds signal onto the isoperimetric constraint set:
/// mean C_bar for the single-input class, flow-weighted mean C_bar*v_bar when
/// a flow signal is supplied. Signals that already satisfy the constraint are
/// returned unchanged.
inline PeriodicSignal project_to_constraint(const PeriodicSignal& raw,
                                            const IsoperimetricSpec& spec,
                                            const PeriodicSignal* flow = nullptr) {
    if (!within(raw, spec.C_min, spec.C_max))
        throw std::invalid_argument("project_to_constraint: raw signal out of bounds");
    if (!flow) {
        if (std::abs(mean(raw) - spec.C_bar) <= 1e-12) return raw;
        return project_to_mean(raw, spec.C_min, spec.C_max, spec.C_bar);
    }
    if (!spec.has_flow())
        throw std::invalid_argument("project_to_constraint: spec lacks flow bounds");
    const double target = spec.C_bar * *spec.v_bar;
    if (std::abs(weighted_mean(raw, *flow) - target) <= 1e-12) return raw;
    return project_to_weighted_mean(raw, spec.C_min, spec.C_max, *flow, target);
}

}  // namespace pfr
