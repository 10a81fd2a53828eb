#pragma once

// Command layer for the `rcbf` tool: params, simulate, sweep.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 parameter
// infeasibility (NonPositiveMargin, DegenerateBox), 4 I/O error.

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rcbf/csv.hpp"
#include "rcbf/error.hpp"
#include "rcbf/scenario.hpp"
#include "rcbf/sim.hpp"
#include "rcbf/sweep.hpp"

namespace rcbf::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kParamError = 3, kIoError = 4 };

struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config_path;
    std::optional<double> alpha;
    std::optional<double> t_end;
    std::optional<double> dt;
    std::optional<std::size_t> n1;
    std::optional<std::size_t> n2;
    std::optional<double> t_eval;
    std::optional<unsigned> threads;
    std::string out;
    std::string out_json;
};

/// --threads, else RCBF_THREADS, else 1.
inline unsigned thread_count(const Options& opt)
{
    if (opt.threads)
        return std::max(1u, *opt.threads);
    if (const char* env = std::getenv("RCBF_THREADS")) {
        char* end = nullptr;
        const unsigned long n = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && n > 0)
            return static_cast<unsigned>(n);
    }
    return 1;
}

inline Json overrides_json(const Options& opt)
{
    Json j = Json::object();
    if (opt.alpha)
        j["alpha"] = *opt.alpha;
    if (opt.t_end)
        j["t_end"] = *opt.t_end;
    if (opt.dt)
        j["dt"] = *opt.dt;
    if (opt.n1)
        j["n1"] = *opt.n1;
    if (opt.n2)
        j["n2"] = *opt.n2;
    if (opt.t_eval)
        j["t"] = *opt.t_eval;
    return j;
}

/// Loads the scenario and applies command-line overrides on top of it.
inline ScenarioConfig load_with_overrides(const Options& opt)
{
    ScenarioConfig cfg = load_scenario(opt.config_path);
    if (opt.alpha) {
        if (!(*opt.alpha > 0.0))
            throw Error(ErrorCode::ConfigError, "--alpha must be > 0");
        cfg.alpha = *opt.alpha;
    }
    if (opt.t_end) {
        if (!(*opt.t_end > cfg.box.t0))
            throw Error(ErrorCode::ConfigError, "--t-end must exceed box.t0");
        cfg.sim.t_end = *opt.t_end;
    }
    if (opt.dt) {
        if (!(*opt.dt > 0.0))
            throw Error(ErrorCode::ConfigError, "--dt must be > 0");
        cfg.sim.dt = *opt.dt;
    }
    if (opt.n1) {
        if (*opt.n1 < 2)
            throw Error(ErrorCode::ConfigError, "--n1 must be >= 2");
        cfg.sweep.n1 = *opt.n1;
    }
    if (opt.n2) {
        if (*opt.n2 < 2)
            throw Error(ErrorCode::ConfigError, "--n2 must be >= 2");
        cfg.sweep.n2 = *opt.n2;
    }
    if (opt.t_eval)
        cfg.sweep.t = *opt.t_eval;
    return cfg;
}

inline void emit_json(const Json& j, const Options& opt, std::ostream& out)
{
    const std::string text = j.dump(2) + "\n";
    if (opt.out_json.empty()) {
        out << text;
        return;
    }
    std::ofstream f(opt.out_json, std::ios::binary);
    if (!f || !(f << text))
        throw IoFailure("cannot write '" + opt.out_json + "'");
}

template <typename Writer>
void write_file(const std::string& path, Writer&& writer)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoFailure("cannot open '" + path + "' for writing");
    writer(f);
    if (!f.flush())
        throw IoFailure("write to '" + path + "' failed");
}

inline Json summary_json(const SimSummary& s)
{
    auto opt_num = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    return {{"invariance_held", s.invariance_held},
            {"max_h_ub", s.max_h_ub},
            {"max_h_lb", s.max_h_lb},
            {"max_H_ub", s.max_H_ub},
            {"max_H_lb", s.max_H_lb},
            {"max_abs_u", s.max_abs_u},
            {"max_rel_speed", s.max_rel_speed},
            {"min_width", s.min_width},
            {"min_thrust", opt_num(s.min_thrust)},
            {"max_thrust", opt_num(s.max_thrust)},
            {"infeasible_steps", s.infeasible_steps},
            {"steps", s.steps},
            {"initial_in_set", s.initial_in_set}};
}

inline int cmd_params(const Options& opt, std::ostream& out)
{
    const ScenarioConfig cfg = load_with_overrides(opt);
    const ResolvedParams r = resolve(cfg);
    Json j = to_json(r);
    j["command"] = "params";
    j["config"] = to_json(cfg, r);
    j["overrides"] = overrides_json(opt);
    emit_json(j, opt, out);
    return kOk;
}

inline int cmd_simulate(const Options& opt, std::ostream& out)
{
    const ScenarioConfig cfg = load_with_overrides(opt);
    const ResolvedParams r = resolve(cfg);
    const SimResult result = run(make_scenario(cfg, r));
    if (!opt.out.empty())
        write_file(opt.out, [&](std::ostream& f) { csv::write_trajectory(f, result.records); });

    Json j;
    j["command"] = "simulate";
    j["summary"] = summary_json(result.summary);
    j["resolved"] = to_json(r);
    j["config"] = to_json(cfg, r);
    j["overrides"] = overrides_json(opt);
    if (!result.summary.initial_in_set)
        j["warning"] = "initial state outside the restricted safe set; no guarantee applies";
    emit_json(j, opt, out);
    return kOk;
}

inline int cmd_sweep(const Options& opt, std::ostream& out)
{
    const ScenarioConfig cfg = load_with_overrides(opt);
    const ResolvedParams r = resolve(cfg);
    const SweepResult sw =
        run_sweep(make_grid(cfg, r), make_box(cfg), r.limits, {r.a_max, r.alpha}, thread_count(opt));
    if (!opt.out.empty())
        write_file(opt.out, [&](std::ostream& f) { csv::write_grid(f, sw.cells); });

    Json j;
    j["command"] = "sweep";
    j["counts"] = {{"cells", sw.counts.cells},
                   {"in_set", sw.counts.in_set},
                   {"in_set_infeasible", sw.counts.in_set_infeasible}};
    j["grid"] = {{"x1_range", {sw.spec.x1_range.first, sw.spec.x1_range.second}},
                 {"x2_range", {sw.spec.x2_range.first, sw.spec.x2_range.second}},
                 {"n1", sw.spec.n1},
                 {"n2", sw.spec.n2},
                 {"t", sw.spec.t_eval}};
    j["resolved"] = to_json(r);
    j["config"] = to_json(cfg, r);
    j["overrides"] = overrides_json(opt);
    emit_json(j, opt, out);
    return kOk;
}

/// Entry point shared by the binary and the tests.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Robust control barrier function filters for time-varying box constraints",
                 "rcbf"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("config", opt.config_path, "Scenario JSON file")->required();
        sub->add_option("--alpha", opt.alpha, "Class-K gain (overrides rcbf.alpha)");
        sub->add_option("--out-json", opt.out_json, "Write the JSON report here instead of stdout");
    };

    CLI::App* params = app.add_subcommand("params", "Resolve and report the filter parameters");
    add_common(params);

    CLI::App* simulate = app.add_subcommand("simulate", "Closed-loop simulation");
    add_common(simulate);
    simulate->add_option("--t-end", opt.t_end, "Simulation end time (s)");
    simulate->add_option("--dt", opt.dt, "Step size (s)");
    simulate->add_option("--out", opt.out, "Trajectory CSV path");

    CLI::App* sweep = app.add_subcommand("sweep", "State-space feasibility grid");
    add_common(sweep);
    sweep->add_option("--n1", opt.n1, "Cells along x1");
    sweep->add_option("--n2", opt.n2, "Cells along x2");
    sweep->add_option("--t", opt.t_eval, "Evaluation time (s)");
    sweep->add_option("--out", opt.out, "Grid CSV path");
    sweep->add_option("--threads", opt.threads, "Worker threads (default: RCBF_THREADS or 1)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "rcbf: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (params->parsed())
            return cmd_params(opt, out);
        if (simulate->parsed())
            return cmd_simulate(opt, out);
        return cmd_sweep(opt, out);
    } catch (const Error& e) {
        err << "rcbf: " << e.what() << "\n";
        switch (e.code()) {
        case ErrorCode::NonPositiveMargin:
        case ErrorCode::DegenerateBox: return kParamError;
        default: return kConfigError;
        }
    } catch (const IoFailure& e) {
        err << "rcbf: " << e.what() << "\n";
        return kIoError;
    }
}

}  // namespace rcbf::cli
