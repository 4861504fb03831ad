#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "pfr/signal.hpp"

namespace pfr {

/// Raised when, for reaction order n < 1, the concentration along a
/// characteristic reaches zero inside the tube. The transport model is not
/// valid past that point.
class ExtinctionError : public std::domain_error {
  public:
    explicit ExtinctionError(const std::string& what) : std::domain_error(what) {}
};

struct ReactorParams {
    double n;  // reaction order
    double k;  // kinetic constant
    double L;  // tube length
    double v;  // nominal flow-rate (single-input model)

    bool first_order() const { return n == 1.0; }

    void validate() const {
        if (!(n > 0.0)) throw std::invalid_argument("reactor: n must be positive");
        if (!(k >= 0.0)) throw std::invalid_argument("reactor: k must be nonnegative");
        if (!(L > 0.0)) throw std::invalid_argument("reactor: L must be positive");
        if (!(v > 0.0)) throw std::invalid_argument("reactor: v must be positive");
    }
};

/// Concentration after traveling time s along a characteristic that starts at
/// c0, under the kinetics dz/ds = -k z^n. The n = 1 case is dispatched
/// exactly rather than as a limit.
inline double decay_along_characteristic(double c0, double n, double k, double s) {
    if (!(c0 > 0.0))
        throw std::invalid_argument("characteristic decay: inlet concentration must be positive");
    if (n == 1.0) return c0 * std::exp(-k * s);
    const double base = std::pow(c0, -(n - 1.0)) + k * (n - 1.0) * s;
    if (base <= 0.0)
        throw ExtinctionError("concentration extinct inside tube (n < 1 regime)");
    return std::pow(base, -1.0 / (n - 1.0));
}

/// Exact solution of the constant-flow model at (x, t): the inlet value on the
/// characteristic through (x, t) decays for the travel time x/v.
inline double eval_constant_flow(const ReactorParams& p, const PeriodicSignal& inlet,
                                 double x, double t) {
    if (!(x >= 0.0 && x <= p.L))
        throw std::invalid_argument("eval_constant_flow: x outside [0, L]");
    if (!(inlet.lo() > 0.0))
        throw std::invalid_argument("eval_constant_flow: inlet must be strictly positive");
    const double s = x / p.v;
    return decay_along_characteristic(inlet(t - s), p.n, p.k, s);
}

/// Exact solution of the controlled-flow model: the characteristic through
/// (x, t) was emitted at r = V^{-1}(V(t) - x) and has aged s = t - r.
inline double eval_controlled_flow(const ReactorParams& p, const PeriodicSignal& inlet,
                                   const CumulativeFlow& flow, double x, double t) {
    if (!(x >= 0.0 && x <= p.L))
        throw std::invalid_argument("eval_controlled_flow: x outside [0, L]");
    if (!(inlet.lo() > 0.0))
        throw std::invalid_argument("eval_controlled_flow: inlet must be strictly positive");
    const double r = flow.inverse(flow(t) - x);
    double s = t - r;
    if (s < 0.0) s = 0.0;  // fp guard, V is increasing
    return decay_along_characteristic(inlet(r), p.n, p.k, s);
}

inline double eval_controlled_flow(const ReactorParams& p, const PeriodicSignal& inlet,
                                   const PeriodicSignal& flow, double x, double t) {
    return eval_controlled_flow(p, inlet, CumulativeFlow(flow), x, t);
}

/// The reactant concentration field C(x, t) for either model, evaluated
/// on demand via the method of characteristics. Immutable and safe for
/// concurrent reads.
class ConcentrationField {
  public:
    ConcentrationField(ReactorParams params, PeriodicSignal inlet)
        : params_(params), inlet_(std::move(inlet)) {
        params_.validate();
    }

    ConcentrationField(ReactorParams params, PeriodicSignal inlet, PeriodicSignal flow)
        : params_(params), inlet_(std::move(inlet)), flow_(std::move(flow)),
          cumulative_(CumulativeFlow(*flow_)) {
        params_.validate();
        if (flow_->period() != inlet_.period())
            throw std::invalid_argument("field: inlet and flow must share the period");
    }

    double operator()(double x, double t) const {
        if (cumulative_)
            return eval_controlled_flow(params_, inlet_, *cumulative_, x, t);
        return eval_constant_flow(params_, inlet_, x, t);
    }

    double outlet(double t) const { return (*this)(params_.L, t); }

    double flow_rate(double t) const { return flow_ ? (*flow_)(t) : params_.v; }
    bool has_flow() const { return flow_.has_value(); }
    const PeriodicSignal* flow_signal() const { return flow_ ? &*flow_ : nullptr; }
    const PeriodicSignal& inlet() const { return inlet_; }
    const ReactorParams& params() const { return params_; }
    double period() const { return inlet_.period(); }

  private:
    ReactorParams params_;
    PeriodicSignal inlet_;
    std::optional<PeriodicSignal> flow_;
    std::optional<CumulativeFlow> cumulative_;
};

}  // namespace pfr
