#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pfr/config.hpp"
#include "pfr/cost.hpp"
#include "pfr/experiments.hpp"
#include "pfr/format.hpp"
#include "pfr/pdecheck.hpp"

namespace pfr {

struct RunOptions {
    bool check = false;
    std::string out_dir;  // output paths in the config resolve against this
};

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline const char* route_name(CostRoute route) {
    switch (route) {
        case CostRoute::Analytic: return "analytic";
        case CostRoute::ReducedQuadrature: return "reduced_quadrature";
        case CostRoute::OutletQuadrature: return "outlet_quadrature";
        case CostRoute::Pde: return "pde";
    }
    return "unknown";
}

inline ordered_json cost_report_json(const CostReport& report) {
    ordered_json j;
    j["J"] = report.J;
    j["route"] = route_name(report.route);
    if (report.mean_residual) j["mean_residual"] = *report.mean_residual;
    if (report.weighted_residual) j["weighted_residual"] = *report.weighted_residual;
    if (report.residence_residual) j["residence_residual"] = *report.residence_residual;
    j["within_bounds"] = report.within_bounds;
    j["admissible"] = report.admissible;
    return j;
}

inline std::filesystem::path resolve_output(const RunOptions& opts, const std::string& rel) {
    std::filesystem::path path(rel);
    if (!opts.out_dir.empty() && path.is_relative())
        path = std::filesystem::path(opts.out_dir) / path;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    return path;
}

inline std::ofstream open_output(const RunOptions& opts, const std::string& rel) {
    const auto path = resolve_output(opts, rel);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file '" + path.string() + "'");
    return out;
}

inline void write_json(const RunOptions& opts, const std::string& rel, const ordered_json& j) {
    if (rel.empty()) return;
    auto out = open_output(opts, rel);
    out << j.dump(2) << '\n';
}

/// Evaluate fn(i) for i in [0, n) on `threads` workers; results land in
/// index order so the output does not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    for (auto& t : pool) t.join();
}

struct CheckList {
    std::vector<std::pair<std::string, bool>> entries;
    void add(const std::string& label, bool ok) { entries.emplace_back(label, ok); }
    int report(std::ostream& out) const {
        bool all_ok = true;
        for (const auto& [label, ok] : entries) {
            out << (ok ? "[CHECK PASS] " : "[CHECK FAIL] ") << label << '\n';
            all_ok = all_ok && ok;
        }
        return all_ok ? 0 : 4;
    }
};

inline std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> grid;
    grid.reserve(count);
    if (count == 1) {
        grid.push_back(lo);
        return grid;
    }
    for (int i = 0; i < count; ++i) grid.push_back(lo + (hi - lo) * i / (count - 1.0));
    return grid;
}

// ---------------------------------------------------------------------------
// run-type implementations
// ---------------------------------------------------------------------------

inline int run_evaluate(const ScenarioConfig& config, const RunOptions& opts, std::ostream& out) {
    if (!config.control_c)
        throw ConfigError("run type 'evaluate' requires a [control.c] section");
    const auto c = config.control_c->build(config.spec.tau);
    ordered_json summary;
    summary["run"] = "evaluate";
    CheckList checks;
    CostReport main_report, outlet_report;
    if (config.control_v) {
        const auto v = config.control_v->build(config.spec.tau);
        main_report = cost_pair(c, v, config.reactor, config.spec);
        outlet_report = cost_outlet(c, &v, config.reactor);
    } else {
        main_report = cost_single(c, config.reactor, config.spec);
        outlet_report = cost_outlet(c, nullptr, config.reactor);
    }
    summary["reduced"] = cost_report_json(main_report);
    summary["outlet"] = cost_report_json(outlet_report);
    const double route_gap = std::abs(main_report.J - outlet_report.J) / std::abs(main_report.J);
    summary["route_relative_gap"] = route_gap;
    if (config.output.table) {
        out << "J (" << route_name(main_report.route) << ")          = "
            << format_sci(main_report.J) << '\n'
            << "J (outlet quadrature)  = " << format_sci(outlet_report.J) << '\n'
            << "route relative gap     = " << format_sci(route_gap, 3) << '\n'
            << "admissible             = " << (main_report.admissible ? "yes" : "no") << '\n';
    }
    write_json(opts, config.output.json, summary);
    if (opts.check) {
        checks.add("evaluation routes agree within 1e-8 relative", route_gap <= 1e-8);
        return checks.report(out);
    }
    return 0;
}

// 5-significant-digit representation used when comparing against published
// values (the paper prints costs with five significant digits)
inline std::string published_form(double x) { return format_sci(x, 5); }

inline int run_case_study(const ScenarioConfig& config, const RunOptions& opts,
                          std::ostream& out) {
    const auto report = case_study_table();
    ordered_json summary;
    summary["run"] = "case_study";
    for (const auto& row : report.rows) summary["costs"][row.label] = cost_report_json(row.report);
    for (const auto& imp : report.improvements)
        summary["improvements"].push_back({{"better", imp.better},
                                           {"baseline", imp.baseline},
                                           {"percent", imp.percent}});
    for (const auto& dev : report.deviations)
        summary["deviations"].push_back({{"description", dev.description},
                                         {"computed", dev.computed},
                                         {"published", dev.published}});

    if (config.output.table) {
        out << "strategy               J [mol s^-1 m^-2]   admissible\n";
        for (const auto& row : report.rows) {
            out << row.label;
            for (std::size_t i = row.label.size(); i < 23; ++i) out << ' ';
            out << format_sci(row.report.J) << "   " << (row.report.admissible ? "yes" : "no")
                << '\n';
        }
        out << '\n';
        for (const auto& imp : report.improvements)
            out << imp.better << " improves on " << imp.baseline << " by "
                << format_sci(imp.percent, 6) << " %\n";
        out << "\ndocumented deviations from the published numbers:\n";
        for (const auto& dev : report.deviations)
            out << "  " << dev.description << ": computed " << format_sci(dev.computed, 6)
                << " (published " << format_sci(dev.published, 6) << ")\n";
    }

    if (!config.output.csv.empty()) {
        auto csv = open_output(opts, config.output.csv);
        csv << "label,J,route,admissible\n";
        for (const auto& row : report.rows)
            csv << row.label << ',' << format_sci(row.report.J) << ','
                << route_name(row.report.route) << ',' << (row.report.admissible ? 1 : 0) << '\n';
    }
    write_json(opts, config.output.json, summary);

    if (opts.check) {
        CheckList checks;
        // high-precision references, each verified to print as the published
        // five-digit value
        const struct {
            const char* label;
            double reference;
            const char* published;
        } expected[] = {
            {"steady", 9.0909090909090909e-3, "9.0909e-03"},
            {"sinusoid", 8.9968489613419852e-3, "8.9968e-03"},
            {"bang", 8.9026915113871636e-3, "8.9027e-03"},
            {"two_input_schedule", 6.8322981366459627e-3, "6.8323e-03"},
        };
        for (const auto& e : expected) {
            const double J = report.find(e.label).J;
            checks.add(std::string(e.label) + " matches the reference within 1e-6 relative",
                       std::abs(J - e.reference) / e.reference <= 1e-6);
            checks.add(std::string(e.label) + " prints as the published value " + e.published,
                       published_form(J) == e.published);
        }
        const struct {
            const char* better, *baseline;
            double published;
        } percents[] = {{"bang", "sinusoid", 1.05},
                        {"bang", "steady", 2.07},
                        {"two_input_schedule", "bang", 23.26},
                        {"two_input_schedule", "steady", 24.84}};
        for (const auto& p : percents) {
            double value = 0.0;
            for (const auto& imp : report.improvements)
                if (imp.better == p.better && imp.baseline == p.baseline) value = imp.percent;
            checks.add(std::string(p.better) + " vs " + p.baseline +
                           " improvement within 0.01 points of the published percent",
                       std::abs(value - p.published) <= 0.01);
        }
        checks.add("deviation ledger present", report.deviations.size() == 2);
        return checks.report(out);
    }
    return 0;
}

inline int run_sweep_single(const ScenarioConfig& config, const RunOptions& opts,
                            std::ostream& out) {
    const auto alphas =
        linspace(config.sweep.alpha_min, config.sweep.alpha_max, config.sweep.alpha_count);
    std::vector<AmplitudePoint> points(alphas.size());
    parallel_for(alphas.size(), config.threads, [&](std::size_t i) {
        points[i] = amplitude_sweep_single({alphas[i]}).front();
    });

    double max_J_gap = 0.0, max_P_gap = 0.0;
    for (const auto& p : points) {
        max_J_gap = std::max(max_J_gap, std::abs(p.J - p.J_constructed));
        max_P_gap = std::max(max_P_gap, std::abs(p.P - p.P_ratio));
    }

    if (!config.output.csv.empty()) {
        auto csv = open_output(opts, config.output.csv);
        csv << "alpha,J,P\n";
        for (const auto& p : points)
            csv << format_sci(p.alpha) << ',' << format_sci(p.J) << ',' << format_sci(p.P) << '\n';
    }
    ordered_json summary;
    summary["run"] = "sweep_single";
    summary["points"] = points.size();
    summary["max_closed_vs_constructed_J"] = max_J_gap;
    summary["max_closed_vs_ratio_P"] = max_P_gap;
    summary["J_first"] = points.front().J;
    summary["J_last"] = points.back().J;
    summary["P_last"] = points.back().P;
    write_json(opts, config.output.json, summary);
    if (config.output.table)
        out << "swept " << points.size() << " amplitudes; closed-vs-constructed gaps: J "
            << format_sci(max_J_gap, 3) << ", P " << format_sci(max_P_gap, 3) << '\n';

    if (opts.check) {
        CheckList checks;
        checks.add("closed-form cost equals constructive cost within 1e-10", max_J_gap <= 1e-10);
        checks.add("closed-form percent equals ratio percent within 1e-10", max_P_gap <= 1e-10);
        return checks.report(out);
    }
    return 0;
}

inline int run_sweep_pair(const ScenarioConfig& config, const RunOptions& opts,
                          std::ostream& out) {
    const auto alphas =
        linspace(config.sweep.alpha_min, config.sweep.alpha_max, config.sweep.alpha_count);
    const auto betas =
        linspace(config.sweep.beta_min, config.sweep.beta_max, config.sweep.beta_count);
    std::vector<std::vector<AmplitudePoint>> table(alphas.size());
    parallel_for(alphas.size(), config.threads, [&](std::size_t i) {
        table[i] = amplitude_sweep_pair({alphas[i]}, betas).front();
    });

    double max_J_gap = 0.0, max_P_gap = 0.0;
    for (const auto& row : table)
        for (const auto& p : row) {
            max_J_gap = std::max(max_J_gap, std::abs(p.J - p.J_constructed));
            max_P_gap = std::max(max_P_gap, std::abs(p.P - p.P_ratio));
        }

    if (!config.output.csv.empty()) {
        auto csv = open_output(opts, config.output.csv);
        csv << "alpha,beta,J,P\n";
        for (const auto& row : table)
            for (const auto& p : row)
                csv << format_sci(p.alpha) << ',' << format_sci(*p.beta) << ','
                    << format_sci(p.J) << ',' << format_sci(p.P) << '\n';
    }
    ordered_json summary;
    summary["run"] = "sweep_pair";
    summary["points"] = alphas.size() * betas.size();
    summary["max_closed_vs_constructed_J"] = max_J_gap;
    summary["max_closed_vs_ratio_P"] = max_P_gap;
    write_json(opts, config.output.json, summary);
    if (config.output.table)
        out << "swept " << alphas.size() << "x" << betas.size()
            << " amplitude pairs; closed-vs-constructed gaps: J " << format_sci(max_J_gap, 3)
            << ", P " << format_sci(max_P_gap, 3) << '\n';

    if (opts.check) {
        CheckList checks;
        checks.add("closed-form cost equals constructive cost within 1e-10", max_J_gap <= 1e-10);
        checks.add("closed-form percent equals ratio percent within 1e-10", max_P_gap <= 1e-10);
        return checks.report(out);
    }
    return 0;
}

inline int run_trial(const ScenarioConfig& config, const RunOptions& opts, std::ostream& out) {
    const TrialReport report =
        config.trial.two_input
            ? optimality_trial_pair(config.spec, config.reactor, config.trial.samples,
                                    config.trial.pieces, config.seed)
            : optimality_trial_single(config.spec, config.reactor, config.trial.samples,
                                      config.trial.pieces, config.seed);

    if (!config.output.csv.empty()) {
        auto csv = open_output(opts, config.output.csv);
        csv << "sample,J,gap\n";
        for (std::size_t i = 0; i < report.samples.size(); ++i)
            csv << i << ',' << format_sci(report.samples[i].J) << ','
                << format_sci(report.samples[i].gap) << '\n';
    }
    ordered_json summary;
    summary["run"] = "trial";
    summary["two_input"] = config.trial.two_input;
    summary["reference"] = report.reference == TrialReference::Bang ? "bang" : "steady";
    summary["J_reference"] = report.J_reference;
    summary["samples"] = report.samples.size();
    summary["pieces"] = config.trial.pieces;
    summary["seed"] = config.seed;
    summary["violations"] = report.violations;
    summary["min_gap"] = report.min_gap;
    summary["max_gap"] = report.max_gap;
    summary["max_abs_gap"] = report.max_abs_gap;
    write_json(opts, config.output.json, summary);
    if (config.output.table)
        out << "reference " << summary["reference"].get<std::string>() << " J = "
            << format_sci(report.J_reference) << "; " << report.samples.size()
            << " projected samples; violations = " << report.violations
            << "; smallest gap = " << format_sci(report.min_gap, 3) << '\n';

    if (opts.check) {
        CheckList checks;
        checks.add("no projected sample beats the constructed strategy", report.violations == 0);
        if (config.reactor.first_order())
            checks.add("all first-order costs coincide within 1e-12", report.max_abs_gap <= 1e-12);
        return checks.report(out);
    }
    return 0;
}

inline int run_pde_check(const ScenarioConfig& config, const RunOptions& opts,
                         std::ostream& out) {
    const auto c = config.control_c ? config.control_c->build(config.spec.tau)
                                    : PeriodicSignal::steady(config.spec.tau, config.spec.C_bar);
    std::optional<PeriodicSignal> v;
    if (config.control_v) v = config.control_v->build(config.spec.tau);

    // optional strided space-time dump
    std::vector<std::vector<double>> snapshots;
    std::vector<double> snapshot_times;
    FieldObserver observer;
    if (!config.output.field_csv.empty())
        observer = [&](double t, const std::vector<double>& cells) {
            snapshot_times.push_back(t);
            snapshots.push_back(cells);
        };

    const auto sim =
        simulate(config.reactor, c, v ? &*v : nullptr, config.grid, observer);
    const auto& last = sim.periods.back();
    const auto& prev = sim.periods[sim.periods.size() - 2];
    const double J_pde = trace_flux_cost(last, config.reactor, v ? &*v : nullptr);
    const CostReport analytic = v ? cost_pair(c, *v, config.reactor, config.spec)
                                  : cost_single(c, config.reactor, config.spec);
    const double rel_error = std::abs(J_pde - analytic.J) / std::abs(analytic.J);
    const double regime_residual = periodic_residual(prev, last);

    if (!config.output.csv.empty()) {
        auto csv = open_output(opts, config.output.csv);
        csv << "t,C_out\n";
        for (std::size_t i = 0; i < last.times.size(); ++i)
            csv << format_sci(last.times[i]) << ',' << format_sci(last.values[i]) << '\n';
    }
    if (!config.output.field_csv.empty()) {
        auto csv = open_output(opts, config.output.field_csv);
        csv << "x,t,C\n";
        const std::size_t stride_t = std::max<std::size_t>(1, snapshot_times.size() / 256);
        const std::size_t stride_x = std::max<std::size_t>(1, (config.grid.nx + 1) / 128);
        const double dx = config.reactor.L / config.grid.nx;
        for (std::size_t s = 0; s < snapshots.size(); s += stride_t)
            for (std::size_t i = 0; i < snapshots[s].size(); i += stride_x)
                csv << format_sci(i * dx, 6) << ',' << format_sci(snapshot_times[s], 9) << ','
                    << format_sci(snapshots[s][i]) << '\n';
    }

    ordered_json summary;
    summary["run"] = "pde_check";
    summary["nx"] = config.grid.nx;
    summary["cfl"] = config.grid.cfl;
    summary["dx"] = sim.dx;
    summary["dt_max"] = sim.dt_max;
    summary["J_pde"] = J_pde;
    summary["J_analytic"] = analytic.J;
    summary["relative_error"] = rel_error;
    summary["periodic_residual"] = regime_residual;
    summary["clamp_events"] = sim.clamp_events;
    write_json(opts, config.output.json, summary);
    if (config.output.table)
        out << "J (upwind, nx=" << config.grid.nx << ")  = " << format_sci(J_pde) << '\n'
            << "J (analytic)         = " << format_sci(analytic.J) << '\n'
            << "relative error       = " << format_sci(rel_error, 3) << '\n'
            << "periodic residual    = " << format_sci(regime_residual, 3) << '\n';

    if (opts.check) {
        CheckList checks;
        checks.add("upwind flux cost within 5e-3 relative of the analytic cost",
                   rel_error <= 5e-3);
        checks.add("periodic regime reached", regime_residual <= 1e-6 * config.spec.C_max);
        checks.add("no negative-concentration clamps", sim.clamp_events == 0);
        return checks.report(out);
    }
    return 0;
}

}  // namespace detail

/// Validate a scenario without running it: reactor and spec invariants plus
/// control signal construction. Bad signal layouts surface as ConfigError.
inline void validate_scenario(const ScenarioConfig& config) {
    config.reactor.validate();
    config.spec.validate();
    try {
        if (config.control_c) (void)config.control_c->build(config.spec.tau);
        if (config.control_v) (void)config.control_v->build(config.spec.tau);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("control signal: ") + e.what());
    }
    if (config.run_type == RunType::PdeCheck) {
        try {
            config.grid.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("grid: ") + e.what());
        }
    }
    if (config.trial.two_input || config.run_type == RunType::SweepPair || config.control_v)
        config.spec.validate_pair(config.reactor.L);
}

/// Execute a scenario; returns the process exit code (0 success, 4 when a
/// --check assertion fails). Configuration and feasibility problems raise
/// ConfigError / InfeasibleSpecError.
inline int run_scenario(ScenarioConfig config, const RunOptions& opts,
                        std::ostream& out = std::cout) {
    if (const char* env = std::getenv("PFR_THREADS")) {
        long long n;
        if (parse_int(env, n) && n >= 1) config.threads = static_cast<int>(n);
    }
    validate_scenario(config);
    switch (config.run_type) {
        case RunType::Evaluate: return detail::run_evaluate(config, opts, out);
        case RunType::CaseStudy: return detail::run_case_study(config, opts, out);
        case RunType::SweepSingle: return detail::run_sweep_single(config, opts, out);
        case RunType::SweepPair: return detail::run_sweep_pair(config, opts, out);
        case RunType::Trial: return detail::run_trial(config, opts, out);
        case RunType::PdeCheck: return detail::run_pde_check(config, opts, out);
    }
    throw ConfigError("unknown run type");
}

}  // namespace pfr
