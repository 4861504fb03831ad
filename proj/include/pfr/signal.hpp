#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace pfr {

/// Wrap t into [0, period). Exact for exactly-representable multiples of the
/// period (fmod computes the remainder without rounding).
inline double wrap_time(double t, double period) {
    double u = std::fmod(t, period);
    if (u < 0.0) u += period;
    if (u >= period) u = 0.0;
    return u;
}

/// A tau-periodic bounded control signal.
///
/// Three kinds: steady value, right-continuous piecewise-constant steps
/// (breakpoints sorted, first one at 0), and a sinusoid
/// mean + amplitude*sin(2*pi*t/tau + phase). Values at step breakpoints take
/// the right limit.
class PeriodicSignal {
  public:
    enum class Kind { Steady, Piecewise, Sinusoid };

    static PeriodicSignal steady(double period, double value) {
        PeriodicSignal s(period, Kind::Steady);
        s.breakpoints_ = {0.0};
        s.values_ = {value};
        s.lo_ = s.hi_ = value;
        return s;
    }

    static PeriodicSignal piecewise(double period, std::vector<double> breakpoints,
                                    std::vector<double> values) {
        PeriodicSignal s(period, Kind::Piecewise);
        if (breakpoints.empty() || breakpoints.size() != values.size())
            throw std::invalid_argument("piecewise signal: breakpoints/values size mismatch");
        if (breakpoints.front() != 0.0)
            throw std::invalid_argument("piecewise signal: first breakpoint must be 0");
        for (std::size_t i = 1; i < breakpoints.size(); ++i)
            if (!(breakpoints[i] > breakpoints[i - 1]))
                throw std::invalid_argument("piecewise signal: breakpoints not strictly increasing");
        if (!(breakpoints.back() < period))
            throw std::invalid_argument("piecewise signal: breakpoint beyond period");
        s.breakpoints_ = std::move(breakpoints);
        s.values_ = std::move(values);
        const auto [lo, hi] = std::minmax_element(s.values_.begin(), s.values_.end());
        s.lo_ = *lo;
        s.hi_ = *hi;
        return s;
    }

    static PeriodicSignal sinusoid(double period, double mean, double amplitude,
                                   double phase = 0.0) {
        if (amplitude < 0.0)
            throw std::invalid_argument("sinusoid: amplitude must be nonnegative");
        PeriodicSignal s(period, Kind::Sinusoid);
        s.mean_ = mean;
        s.amplitude_ = amplitude;
        s.phase_ = phase;
        s.lo_ = mean - amplitude;
        s.hi_ = mean + amplitude;
        return s;
    }

    double period() const { return period_; }
    Kind kind() const { return kind_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool is_piecewise_like() const { return kind_ != Kind::Sinusoid; }

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }
    double sin_mean() const { return mean_; }
    double sin_amplitude() const { return amplitude_; }
    double sin_phase() const { return phase_; }
    double omega() const { return 2.0 * std::numbers::pi / period_; }

    double operator()(double t) const {
        const double u = wrap_time(t, period_);
        if (kind_ == Kind::Sinusoid)
            return mean_ + amplitude_ * std::sin(omega() * u + phase_);
        return values_[piece_index(u)];
    }

    /// Index of the piece containing u in [0, period).
    std::size_t piece_index(double u) const {
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), u);
        return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    }

    /// Length of piece i (the last piece extends to the period).
    double piece_length(std::size_t i) const {
        const double end = (i + 1 < breakpoints_.size()) ? breakpoints_[i + 1] : period_;
        return end - breakpoints_[i];
    }

  private:
    PeriodicSignal(double period, Kind kind) : period_(period), kind_(kind) {
        if (!(period > 0.0)) throw std::invalid_argument("signal period must be positive");
    }

    double period_;
    Kind kind_;
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<double> breakpoints_, values_;  // piecewise-like kinds
    double mean_ = 0.0, amplitude_ = 0.0, phase_ = 0.0;
};

inline double eval(const PeriodicSignal& s, double t) { return s(t); }

/// Mean over one period, exact for every kind.
inline double mean(const PeriodicSignal& s) {
    if (s.kind() == PeriodicSignal::Kind::Sinusoid) return s.sin_mean();
    double acc = 0.0;
    for (std::size_t i = 0; i < s.values().size(); ++i)
        acc += s.values()[i] * s.piece_length(i);
    return acc / s.period();
}

namespace detail {

/// Integral of mean + amp*sin(w t + phase) over [a, b].
inline double sinusoid_integral(const PeriodicSignal& s, double a, double b) {
    const double w = s.omega();
    return s.sin_mean() * (b - a) +
           s.sin_amplitude() / w * (std::cos(w * a + s.sin_phase()) - std::cos(w * b + s.sin_phase()));
}

}  // namespace detail

/// Flow-weighted mean (1/tau) * integral of c(t)*v(t) over one period.
/// Closed-form for every kind combination; exact for piecewise pairs.
inline double weighted_mean(const PeriodicSignal& c, const PeriodicSignal& v) {
    if (c.period() != v.period())
        throw std::invalid_argument("weighted_mean: signals must share the period");
    const double tau = c.period();
    if (c.is_piecewise_like() && v.is_piecewise_like()) {
        // merge breakpoints; both signals are constant on merged pieces
        std::vector<double> grid(c.breakpoints());
        grid.insert(grid.end(), v.breakpoints().begin(), v.breakpoints().end());
        grid.push_back(tau);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i)
            acc += c(grid[i]) * v(grid[i]) * (grid[i + 1] - grid[i]);
        return acc / tau;
    }
    if (!c.is_piecewise_like() && !v.is_piecewise_like()) {
        // product of two equal-period sinusoids
        return c.sin_mean() * v.sin_mean() +
               0.5 * c.sin_amplitude() * v.sin_amplitude() *
                   std::cos(c.sin_phase() - v.sin_phase());
    }
    const PeriodicSignal& steps = c.is_piecewise_like() ? c : v;
    const PeriodicSignal& wave = c.is_piecewise_like() ? v : c;
    double acc = 0.0;
    for (std::size_t i = 0; i < steps.values().size(); ++i) {
        const double a = steps.breakpoints()[i];
        acc += steps.values()[i] * detail::sinusoid_integral(wave, a, a + steps.piece_length(i));
    }
    return acc / tau;
}

struct LevelMeasures {
    double above;  // mu{t in [0,tau): s(t) >= threshold}
    double below;  // complement
};

inline LevelMeasures measure_level_sets(const PeriodicSignal& s, double threshold) {
    const double tau = s.period();
    if (s.kind() == PeriodicSignal::Kind::Sinusoid) {
        if (s.sin_amplitude() == 0.0)
            return s.sin_mean() >= threshold ? LevelMeasures{tau, 0.0} : LevelMeasures{0.0, tau};
        const double q = (threshold - s.sin_mean()) / s.sin_amplitude();
        if (q <= -1.0) return {tau, 0.0};
        if (q > 1.0) return {0.0, tau};
        const double above = tau * (std::numbers::pi - 2.0 * std::asin(q)) /
                             (2.0 * std::numbers::pi);
        return {above, tau - above};
    }
    double above = 0.0;
    for (std::size_t i = 0; i < s.values().size(); ++i)
        if (s.values()[i] >= threshold) above += s.piece_length(i);
    return {above, tau - above};
}

/// Cumulative flow V(t) = integral of v over [0, t] for a positive flow-rate
/// signal. V is strictly increasing with V(t + tau) = V(t) + V(tau); the
/// inverse is exact per affine piece for step flows and bracketed bisection
/// (1e-12 absolute on the time axis) for sinusoids.
class CumulativeFlow {
  public:
    explicit CumulativeFlow(PeriodicSignal flow) : flow_(std::move(flow)) {
        if (!(flow_.lo() > 0.0))
            throw std::invalid_argument("cumulative flow requires strictly positive flow-rate");
        if (flow_.is_piecewise_like()) {
            node_value_.resize(flow_.breakpoints().size() + 1);
            node_value_[0] = 0.0;
            for (std::size_t i = 0; i < flow_.values().size(); ++i)
                node_value_[i + 1] =
                    node_value_[i] + flow_.values()[i] * flow_.piece_length(i);
            per_period_ = node_value_.back();
        } else {
            per_period_ = flow_.sin_mean() * flow_.period();
        }
    }

    const PeriodicSignal& flow() const { return flow_; }
    double period_increment() const { return per_period_; }

    double operator()(double t) const {
        const double tau = flow_.period();
        const double u = wrap_time(t, tau);
        const double cycles = std::round((t - u) / tau);
        return cycles * per_period_ + within_period(u);
    }

    double inverse(double y) const {
        const double tau = flow_.period();
        double cycles = std::floor(y / per_period_);
        double rem = y - cycles * per_period_;
        if (rem < 0.0) {  // fp guard
            cycles -= 1.0;
            rem = y - cycles * per_period_;
        }
        if (rem >= per_period_) {
            cycles += 1.0;
            rem = y - cycles * per_period_;
        }
        return cycles * tau + invert_within_period(rem);
    }

  private:
    double within_period(double u) const {
        if (!flow_.is_piecewise_like()) return detail::sinusoid_integral(flow_, 0.0, u);
        const std::size_t i = flow_.piece_index(u);
        return node_value_[i] + flow_.values()[i] * (u - flow_.breakpoints()[i]);
    }

    double invert_within_period(double y) const {
        const double tau = flow_.period();
        if (flow_.is_piecewise_like()) {
            auto it = std::upper_bound(node_value_.begin(), node_value_.end(), y);
            std::size_t i = static_cast<std::size_t>(it - node_value_.begin());
            i = (i == 0) ? 0 : i - 1;
            if (i >= flow_.values().size()) i = flow_.values().size() - 1;
            return flow_.breakpoints()[i] + (y - node_value_[i]) / flow_.values()[i];
        }
        double lo = 0.0, hi = tau;
        while (hi - lo > 0.5e-12) {
            const double mid = 0.5 * (lo + hi);
            (within_period(mid) < y ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    PeriodicSignal flow_;
    std::vector<double> node_value_;  // V at breakpoints plus V(tau)
    double per_period_ = 0.0;
};

inline CumulativeFlow cumulative(const PeriodicSignal& flow) { return CumulativeFlow(flow); }
inline double inverse(const CumulativeFlow& cf, double y) { return cf.inverse(y); }

}  // namespace pfr
