#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pfr {

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_intervals = 8000;
};

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1] (positive half).
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639207, 0.949107912342758524526, 0.864864423359769072789,
    0.741531185599394439864, 0.586087235467691130294, 0.405845151377397166907,
    0.207784955007898467601, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224964, 0.063092092629978553291, 0.104790010322250183840,
    0.140653259715525918745, 0.169004726639267902827, 0.190350578064785409913,
    0.204432940075298892414, 0.209482141084727828013};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693271, 0.279705391489276667901, 0.381830050505118944950,
    0.417959183673469387755};

template <class F>
double kronrod15(F&& f, double a, double b, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fc = f(mid);
    double gauss = kGaussWeights[0] * fc;
    double kron = kKronrodWeights[7] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        kron += kKronrodWeights[i] * fsum;
        if (i % 2 == 1) gauss += kGaussWeights[(i - 1) / 2] * fsum;
    }
    gauss *= half;
    kron *= half;
    err = std::pow(200.0 * std::abs(kron - gauss), 1.5);
    return kron;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b].
template <class F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    if (!(a <= b)) throw std::invalid_argument("integrate: bad interval");
    if (a == b) return 0.0;

    struct Segment {
        double a, b;
    };
    std::vector<Segment> stack{{a, b}};
    const double min_len = 1e-14 * (b - a);
    double total = 0.0;
    int used = 1;
    while (!stack.empty()) {
        const Segment seg = stack.back();
        stack.pop_back();
        double err = 0.0;
        const double s = detail::kronrod15(f, seg.a, seg.b, err);
        const double len = seg.b - seg.a;
        const double tol = std::max(opts.abs_tol * len / (b - a),
                                    opts.rel_tol * std::abs(s));
        if (err <= tol || len <= min_len || used >= opts.max_intervals) {
            total += s;
            continue;
        }
        const double mid = 0.5 * (seg.a + seg.b);
        stack.push_back({seg.a, mid});
        stack.push_back({mid, seg.b});
        ++used;
    }
    return total;
}

/// Same, but with mandatory split points (e.g. known kinks or jumps of the
/// integrand); points outside (a, b) are ignored.
template <class F>
double integrate_split(F&& f, double a, double b, std::vector<double> splits,
                       const QuadratureOptions& opts = {}) {
    splits.push_back(a);
    splits.push_back(b);
    std::sort(splits.begin(), splits.end());
    splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
    double total = 0.0;
    double prev = a;
    for (double s : splits) {
        if (s <= prev || s > b) continue;
        total += integrate(f, prev, std::min(s, b), opts);
        prev = s;
    }
    if (prev < b) total += integrate(f, prev, b, opts);
    return total;
}

}  // namespace pfr
