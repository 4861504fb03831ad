#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pfr/experiments.hpp"
#include "pfr/format.hpp"
#include "pfr/model.hpp"
#include "pfr/pdecheck.hpp"
#include "pfr/signal.hpp"
#include "pfr/strategy.hpp"

namespace pfr {

/// Malformed scenario file; the message carries the offending line number and
/// field.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class RunType { Evaluate, CaseStudy, SweepSingle, SweepPair, Trial, PdeCheck };

struct SignalConfig {
    enum class Kind { Steady, Piecewise, Sinusoid };
    Kind kind = Kind::Steady;
    double value = 0.0;
    std::vector<double> breakpoints, values;
    double mean = 0.0, amplitude = 0.0, phase = 0.0;

    PeriodicSignal build(double tau) const {
        switch (kind) {
            case Kind::Steady: return PeriodicSignal::steady(tau, value);
            case Kind::Piecewise: return PeriodicSignal::piecewise(tau, breakpoints, values);
            case Kind::Sinusoid: return PeriodicSignal::sinusoid(tau, mean, amplitude, phase);
        }
        throw ConfigError("control: unknown signal kind");
    }
};

struct SweepConfig {
    int alpha_count = 50;
    double alpha_min = 0.02, alpha_max = 0.98;
    int beta_count = 20;
    double beta_min = 0.045, beta_max = 0.955;
};

struct TrialConfig {
    int samples = 200;
    int pieces = 8;
    bool two_input = false;
};

struct OutputConfig {
    std::string csv, json, field_csv;
    bool table = true;
};

/// One runnable scenario. Defaults reproduce the reference case study.
struct ScenarioConfig {
    RunType run_type = RunType::CaseStudy;
    std::uint64_t seed = 12345;
    int threads = 1;
    ReactorParams reactor = case_study_params();
    IsoperimetricSpec spec = case_study_spec();
    std::optional<SignalConfig> control_c, control_v;
    Grid grid{512, 0.9, 3};
    SweepConfig sweep;
    TrialConfig trial;
    OutputConfig output;
};

namespace detail {

struct ConfigCursor {
    int line = 0;
    std::string section;

    [[noreturn]] void fail(const std::string& message) const {
        throw ConfigError("line " + std::to_string(line) + ": " + message +
                          (section.empty() ? "" : " (section [" + section + "])"));
    }

    double number(std::string_view key, std::string_view value) const {
        double out;
        if (!parse_double(value, out))
            fail("field '" + std::string(key) + "': expected a number, got '" +
                 std::string(value) + "'");
        return out;
    }

    long long integer(std::string_view key, std::string_view value) const {
        long long out;
        if (!parse_int(value, out))
            fail("field '" + std::string(key) + "': expected an integer, got '" +
                 std::string(value) + "'");
        return out;
    }

    bool boolean(std::string_view key, std::string_view value) const {
        if (value == "true" || value == "1") return true;
        if (value == "false" || value == "0") return false;
        fail("field '" + std::string(key) + "': expected true/false");
    }

    std::vector<double> number_list(std::string_view key, std::string_view value) const {
        std::vector<double> out;
        std::size_t start = 0;
        while (start <= value.size()) {
            std::size_t comma = value.find(',', start);
            if (comma == std::string_view::npos) comma = value.size();
            auto item = value.substr(start, comma - start);
            while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
            while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
            if (item.empty()) fail("field '" + std::string(key) + "': empty list entry");
            double x;
            if (!parse_double(item, x))
                fail("field '" + std::string(key) + "': bad list entry '" + std::string(item) + "'");
            out.push_back(x);
            start = comma + 1;
        }
        return out;
    }
};

inline std::string_view trim(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    return text;
}

inline void apply_signal_key(SignalConfig& signal, const ConfigCursor& at, std::string_view key,
                             std::string_view value) {
    if (key == "kind") {
        if (value == "steady") signal.kind = SignalConfig::Kind::Steady;
        else if (value == "piecewise") signal.kind = SignalConfig::Kind::Piecewise;
        else if (value == "sinusoid") signal.kind = SignalConfig::Kind::Sinusoid;
        else at.fail("field 'kind': expected steady|piecewise|sinusoid");
    } else if (key == "value") signal.value = at.number(key, value);
    else if (key == "breakpoints") signal.breakpoints = at.number_list(key, value);
    else if (key == "values") signal.values = at.number_list(key, value);
    else if (key == "mean") signal.mean = at.number(key, value);
    else if (key == "amplitude") signal.amplitude = at.number(key, value);
    else if (key == "phase") signal.phase = at.number(key, value);
    else at.fail("unknown field '" + std::string(key) + "'");
}

}  // namespace detail

/// Parse the flat key/value scenario format. Unknown sections or fields are
/// errors with the offending line in the message.
inline ScenarioConfig parse_config_text(const std::string& text) {
    ScenarioConfig config;
    detail::ConfigCursor at;
    std::istringstream stream(text);
    std::string raw;
    while (std::getline(stream, raw)) {
        ++at.line;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') at.fail("unterminated section header");
            at.section = std::string(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) at.fail("expected key = value");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (key.empty()) at.fail("empty key");

        if (at.section == "run") {
            if (key == "type") {
                if (value == "evaluate") config.run_type = RunType::Evaluate;
                else if (value == "case_study") config.run_type = RunType::CaseStudy;
                else if (value == "sweep_single") config.run_type = RunType::SweepSingle;
                else if (value == "sweep_pair") config.run_type = RunType::SweepPair;
                else if (value == "trial") config.run_type = RunType::Trial;
                else if (value == "pde_check") config.run_type = RunType::PdeCheck;
                else at.fail("field 'type': unknown run type '" + std::string(value) + "'");
            } else if (key == "seed") config.seed = static_cast<std::uint64_t>(at.integer(key, value));
            else if (key == "threads") config.threads = static_cast<int>(at.integer(key, value));
            else at.fail("unknown field '" + std::string(key) + "'");
        } else if (at.section == "reactor") {
            if (key == "n") config.reactor.n = at.number(key, value);
            else if (key == "k") config.reactor.k = at.number(key, value);
            else if (key == "L") config.reactor.L = at.number(key, value);
            else if (key == "v") config.reactor.v = at.number(key, value);
            else at.fail("unknown field '" + std::string(key) + "'");
        } else if (at.section == "spec") {
            if (key == "tau") config.spec.tau = at.number(key, value);
            else if (key == "C_bar") config.spec.C_bar = at.number(key, value);
            else if (key == "C_min") config.spec.C_min = at.number(key, value);
            else if (key == "C_max") config.spec.C_max = at.number(key, value);
            else if (key == "v_bar")
                config.spec.v_bar = value == "none" ? std::nullopt
                                                    : std::optional<double>(at.number(key, value));
            else if (key == "v_min")
                config.spec.v_min = value == "none" ? std::nullopt
                                                    : std::optional<double>(at.number(key, value));
            else if (key == "v_max")
                config.spec.v_max = value == "none" ? std::nullopt
                                                    : std::optional<double>(at.number(key, value));
            else at.fail("unknown field '" + std::string(key) + "'");
        } else if (at.section == "control.c") {
            if (!config.control_c) config.control_c.emplace();
            detail::apply_signal_key(*config.control_c, at, key, value);
        } else if (at.section == "control.v") {
            if (!config.control_v) config.control_v.emplace();
            detail::apply_signal_key(*config.control_v, at, key, value);
        } else if (at.section == "grid") {
            if (key == "nx") config.grid.nx = static_cast<int>(at.integer(key, value));
            else if (key == "cfl") config.grid.cfl = at.number(key, value);
            else if (key == "warmup_periods")
                config.grid.warmup_periods = static_cast<int>(at.integer(key, value));
            else at.fail("unknown field '" + std::string(key) + "'");
        } else if (at.section == "sweep") {
            if (key == "alpha_count") config.sweep.alpha_count = static_cast<int>(at.integer(key, value));
            else if (key == "alpha_min") config.sweep.alpha_min = at.number(key, value);
            else if (key == "alpha_max") config.sweep.alpha_max = at.number(key, value);
            else if (key == "beta_count") config.sweep.beta_count = static_cast<int>(at.integer(key, value));
            else if (key == "beta_min") config.sweep.beta_min = at.number(key, value);
            else if (key == "beta_max") config.sweep.beta_max = at.number(key, value);
            else at.fail("unknown field '" + std::string(key) + "'");
        } else if (at.section == "trial") {
            if (key == "samples") config.trial.samples = static_cast<int>(at.integer(key, value));
            else if (key == "pieces") config.trial.pieces = static_cast<int>(at.integer(key, value));
            else if (key == "two_input") config.trial.two_input = at.boolean(key, value);
            else at.fail("unknown field '" + std::string(key) + "'");
        } else if (at.section == "output") {
            if (key == "csv") config.output.csv = std::string(value);
            else if (key == "json") config.output.json = std::string(value);
            else if (key == "field_csv") config.output.field_csv = std::string(value);
            else if (key == "table") config.output.table = at.boolean(key, value);
            else at.fail("unknown field '" + std::string(key) + "'");
        } else if (at.section.empty()) {
            at.fail("key outside any section");
        } else {
            at.fail("unknown section");
        }
    }
    return config;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

/// Render a signal back into the config key/value form.
inline std::string describe_signal(const PeriodicSignal& s) {
    std::string out;
    switch (s.kind()) {
        case PeriodicSignal::Kind::Steady:
            out = "kind = steady\nvalue = " + format_full(s.values()[0]) + "\n";
            break;
        case PeriodicSignal::Kind::Piecewise: {
            out = "kind = piecewise\nbreakpoints = ";
            for (std::size_t i = 0; i < s.breakpoints().size(); ++i)
                out += (i ? ", " : "") + format_full(s.breakpoints()[i]);
            out += "\nvalues = ";
            for (std::size_t i = 0; i < s.values().size(); ++i)
                out += (i ? ", " : "") + format_full(s.values()[i]);
            out += "\n";
            break;
        }
        case PeriodicSignal::Kind::Sinusoid:
            out = "kind = sinusoid\nmean = " + format_full(s.sin_mean()) +
                  "\namplitude = " + format_full(s.sin_amplitude()) +
                  "\nphase = " + format_full(s.sin_phase()) + "\n";
            break;
    }
    return out;
}

}  // namespace pfr
