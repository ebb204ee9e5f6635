#include "sddem/cli.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sddem/errors.hpp"

namespace sddem::cli {

using nlohmann::json;

namespace {

double get_num(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw ConfigError(std::string("config: '") + key + "' must be a number");
    return j.at(key).get<double>();
}

long get_int(const json& j, const char* key, long fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer())
        throw ConfigError(std::string("config: '") + key + "' must be an integer");
    return j.at(key).get<long>();
}

json get_block(const json& root, const char* name) {
    if (!root.contains(name)) return json::object();
    if (!root.at(name).is_object())
        throw ConfigError(std::string("config: '") + name + "' must be an object");
    return root.at(name);
}

DelayFunction parse_delay(const json& j) {
    const std::string type = j.value("type", "none");
    if (type == "none") return DelayFunction::none();
    if (type == "constant") {
        const double tau = get_num(j, "tau", -1.0);
        if (tau < 0.0) throw ConfigError("delay: constant delay needs tau >= 0");
        return DelayFunction::constant(tau);
    }
    if (type == "sinusoid") {
        if (!j.contains("base") || !j.contains("amp") || !j.contains("tau"))
            throw ConfigError("delay: sinusoid needs base, amp, tau");
        return DelayFunction::sinusoid(get_num(j, "base", 0.0),
                                       get_num(j, "amp", 0.0),
                                       get_num(j, "tau", 0.0));
    }
    throw ConfigError("delay: unknown type '" + type + "'");
}

InitialPath parse_initial(const json& j) {
    if (!j.contains("constant"))
        throw ConfigError("initial: only constant initial paths are configurable");
    Vec v;
    if (j.at("constant").is_number()) {
        v = {j.at("constant").get<double>()};
    } else if (j.at("constant").is_array()) {
        for (const auto& e : j.at("constant")) v.push_back(e.get<double>());
    } else {
        throw ConfigError("initial: 'constant' must be a number or array");
    }
    return InitialPath::constant(v, get_num(j, "holder_k4", 2.0),
                                 get_num(j, "holder_rho", 0.5));
}

ProblemBundle resolve_problem(const json& root) {
    if (!root.contains("problem"))
        throw ConfigError("config: missing 'problem'");
    const json& pj = root.at("problem");
    if (pj.is_string()) {
        const std::string name = pj.get<std::string>();
        if (name == "example1") return make_example1();
        if (name == "example2") return make_example2();
        throw ConfigError("config: unknown built-in problem '" + name + "'");
    }
    if (!pj.is_object())
        throw ConfigError("config: 'problem' must be a name or an object");

    const std::string family = pj.value("family", "");
    DelayFunction delay = pj.contains("delay") ? parse_delay(pj.at("delay"))
                                               : DelayFunction::none();
    InitialPath initial = pj.contains("initial")
                              ? parse_initial(pj.at("initial"))
                              : InitialPath::constant({1.0}, 2.0, 0.5);
    if (family == "example1") {
        ProblemBundle b = make_example1();
        if (pj.contains("delay")) b.problem.delay = delay;
        if (pj.contains("initial")) b.problem.initial = initial;
        return b;
    }
    if (family == "example2") {
        ProblemBundle b = make_example2(get_num(pj, "a", -3.0),
                                        get_num(pj, "b", 1.0),
                                        get_num(pj, "c", 0.5));
        if (pj.contains("delay")) {
            b.problem.delay = delay;
            b.split->base.delay = delay;
        }
        if (pj.contains("initial")) {
            b.problem.initial = initial;
            b.split->base.initial = initial;
        }
        return b;
    }
    if (family == "affine")
        return make_affine(get_num(pj, "a_x", 0.0), get_num(pj, "a_y", 0.0),
                           get_num(pj, "a_0", 0.0), get_num(pj, "b_x", 0.0),
                           get_num(pj, "b_y", 0.0), get_num(pj, "b_0", 0.0),
                           std::move(delay), std::move(initial));
    if (family == "cubic")
        return make_cubic(get_num(pj, "s1", 0.0), get_num(pj, "s2", 0.0),
                          get_num(pj, "s3", 0.0), std::move(delay),
                          std::move(initial));
    throw ConfigError("config: unknown problem family '" + family + "'");
}

struct SolverDefaults {
    double step;
    double horizon;
    long stride;
    long n_paths;
};

SolverDefaults defaults_for(const std::string& name) {
    if (name == "example1") return {0.0009765625 /* 2^-10 */, 10.0, 1, 500};
    if (name == "example2") return {1e-4, 10.0, 10, 2000};
    return {1e-3, 1.0, 1, 1000};
}

StabilityParams parse_stability(const json& j, StabilityParams base) {
    base.lambda1 = get_num(j, "lambda1", base.lambda1);
    base.lambda2 = get_num(j, "lambda2", base.lambda2);
    base.alpha1 = get_num(j, "alpha1", base.alpha1);
    base.alpha2 = get_num(j, "alpha2", base.alpha2);
    base.alpha3 = get_num(j, "alpha3", base.alpha3);
    base.alpha4 = get_num(j, "alpha4", base.alpha4);
    base.beta = get_num(j, "beta", base.beta);
    if (j.contains("theta")) {
        if (j.at("theta").is_string() && j.at("theta").get<std::string>() == "inf")
            base.theta = std::numeric_limits<double>::infinity();
        else
            base.theta = get_num(j, "theta", base.theta);
    }
    base.lbar = get_num(j, "lbar", base.lbar);
    base.lbar1 = get_num(j, "lbar1", base.lbar1);
    return base;
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text, const Overrides& ov) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (ov.problem) root["problem"] = *ov.problem;

    ExperimentConfig cfg;
    cfg.bundle = resolve_problem(root);

    if (root.contains("policy")) {
        const json& pj = root.at("policy");
        cfg.bundle.policy = TruncationPolicy::power_law(
            get_num(pj, "mu_coeff", 1.0), get_num(pj, "mu_power", 2.0),
            get_num(pj, "phi_coeff", 1.0), get_num(pj, "phi_power", 0.25),
            get_num(pj, "h_hat", 0.0));
    }
    validate_policy(cfg.bundle.policy);

    const SolverDefaults def = defaults_for(cfg.bundle.name);
    const json sj = get_block(root, "solver");
    cfg.solver.step = get_num(sj, "step", def.step);
    cfg.solver.horizon = get_num(sj, "horizon", def.horizon);
    cfg.solver.record_stride = get_int(sj, "record_stride", def.stride);
    cfg.n_paths = get_int(sj, "n_paths", def.n_paths);
    cfg.seed = static_cast<std::uint64_t>(get_int(sj, "seed", 12345));
    cfg.mode = cfg.bundle.default_mode;
    if (sj.contains("mode")) {
        const std::string m = sj.at("mode").get<std::string>();
        if (m == "full")
            cfg.mode = TruncationMode::full;
        else if (m == "partial")
            cfg.mode = TruncationMode::partial;
        else
            throw ConfigError("solver: mode must be 'full' or 'partial'");
    }
    if (cfg.mode == TruncationMode::partial && !cfg.bundle.split)
        throw ConfigError("solver: partial mode needs split coefficients, and '" +
                          cfg.bundle.name + "' has none");

    // Fail fast: grid geometry must be consistent before any work starts.
    if (!(cfg.solver.step > 0.0 && cfg.solver.step <= 1.0))
        throw ConfigError("solver: step must lie in (0, 1]");
    history_depth(cfg.bundle.problem.delay.tau, cfg.solver.step);
    if (cfg.solver.horizon <= 0.0)
        throw ConfigError("solver: horizon must be positive");
    {
        const double q = cfg.solver.horizon / cfg.solver.step;
        if (std::abs(q - std::round(q)) > 1e-9 * std::max(1.0, q))
            throw ConfigError("solver: horizon/step must be an integer");
    }
    if (cfg.n_paths < 1) throw ConfigError("solver: n_paths must be >= 1");

    {
        const json cj = get_block(root, "converge");
        if (cj.contains("steps")) {
            for (const auto& e : cj.at("steps")) cfg.conv_steps.push_back(e.get<double>());
        } else if (cfg.bundle.name == "example1") {
            cfg.conv_steps = {1.0 / 128, 1.0 / 256, 1.0 / 512, 1.0 / 1024, 1.0 / 2048};
        } else {
            cfg.conv_steps = {1e-2, 1e-3};
        }
        cfg.conv_reference_step = get_num(
            cj, "reference_step",
            cfg.bundle.name == "example1" ? 1.0 / 16384 : 1e-4);
        cfg.conv_n_paths = get_int(cj, "n_paths",
                                   cfg.bundle.name == "example1" ? 500 : 100);
        for (size_t i = 1; i < cfg.conv_steps.size(); ++i)
            if (!(cfg.conv_steps[i] < cfg.conv_steps[i - 1]))
                throw ConfigError("converge: steps must be strictly decreasing");
        for (double s : cfg.conv_steps) {
            const double q = s / cfg.conv_reference_step;
            if (std::abs(q - std::round(q)) > 1e-9 * std::max(1.0, q))
                throw ConfigError("converge: reference_step must divide every step");
        }
        if (cfg.conv_n_paths < 1) throw ConfigError("converge: n_paths must be >= 1");
    }

    {
        const json stj = get_block(root, "stability");
        if (cfg.bundle.stability || !stj.empty()) {
            StabilityParams base =
                cfg.bundle.stability ? *cfg.bundle.stability : StabilityParams{};
            cfg.stability = parse_stability(stj, base);
        }
        if (stj.contains("delta_list")) {
            for (const auto& e : stj.at("delta_list"))
                cfg.delta_list.push_back(e.get<double>());
        } else {
            cfg.delta_list = {1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9};
        }
        cfg.window_lo = 0.2 * cfg.solver.horizon;
        cfg.window_hi = 0.8 * cfg.solver.horizon;
        if (stj.contains("window")) {
            const auto& w = stj.at("window");
            if (!w.is_array() || w.size() != 2)
                throw ConfigError("stability: window must be [t_lo, t_hi]");
            cfg.window_lo = w[0].get<double>();
            cfg.window_hi = w[1].get<double>();
        }
        for (double d : cfg.delta_list)
            if (!(d > 0.0 && d <= 1.0))
                throw ConfigError("stability: every delta must lie in (0, 1]");
    }

    {
        const json kj = get_block(root, "check");
        cfg.check_constants = cfg.bundle.khasminskii;
        cfg.check_constants.k1 = get_num(kj, "k1", cfg.check_constants.k1);
        cfg.check_constants.k2 = get_num(kj, "k2", cfg.check_constants.k2);
        cfg.check_constants.k3 = get_num(kj, "k3", cfg.check_constants.k3);
        cfg.check_constants.beta = get_num(kj, "beta", cfg.check_constants.beta);
        cfg.check_box = get_num(kj, "grid_box", 50.0);
        cfg.check_grid = static_cast<int>(get_int(kj, "grid_points", 200));
        cfg.check_k_max = get_int(kj, "k_max", 100000);
        if (cfg.check_grid < 2 || cfg.check_box <= 0.0 || cfg.check_k_max < 1)
            throw ConfigError("check: grid_box, grid_points, k_max must be positive");
    }

    cfg.out = root.value("out", std::string());
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.out) cfg.out = *ov.out;
    if (ov.workers) cfg.workers = *ov.workers;
    if (ov.delta_list) cfg.delta_list = *ov.delta_list;
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path, const Overrides& ov) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), ov);
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
    const std::string out = cfg.out.empty() ? "trajectory.csv" : cfg.out;
    const BrownianGrid grid =
        generate(cfg.seed, 0, cfg.solver.step, cfg.solver.horizon,
                 cfg.bundle.problem.dim_w);
    const Trajectory tr =
        cfg.mode == TruncationMode::partial
            ? simulate(*cfg.bundle.split, cfg.bundle.policy, cfg.solver, grid,
                       TruncationMode::partial)
            : simulate(cfg.bundle.problem, cfg.bundle.policy, cfg.solver, grid,
                       TruncationMode::full);
    write_trajectory_csv(tr, out);
    if (tr.status != PathStatus::ok) {
        log << "overflow: state went non-finite at grid index " << tr.overflow_step
            << "; partial trajectory written to " << out << "\n";
        return kExitOverflow;
    }
    log << "wrote " << tr.times.size() << " rows to " << out << "\n";
    return kExitOk;
}

int cmd_converge(const ExperimentConfig& cfg, std::ostream& log) {
    const std::string out = cfg.out.empty() ? "convergence.csv" : cfg.out;
    const ConvergenceReport rep =
        strong_error(cfg.bundle.problem, cfg.bundle.policy, cfg.conv_steps,
                     cfg.conv_reference_step, cfg.solver.horizon,
                     cfg.conv_n_paths, cfg.seed, cfg.workers);
    write_convergence_csv(rep, out);
    for (size_t i = 0; i < rep.steps.size(); ++i) {
        log << "delta=" << rep.steps[i] << " rms_error=" << rep.rms_errors[i];
        if (rep.excluded[i] > 0) log << " (excluded " << rep.excluded[i] << " paths)";
        log << "\n";
    }
    if (!std::isfinite(rep.fitted_order))
        log << "warning: fewer than two usable step sizes, no order fitted\n";
    else
        log << "order=" << rep.fitted_order << "\n";
    log << "wrote " << out << "\n";
    return kExitOk;
}

int cmd_stability_table(const ExperimentConfig& cfg, std::ostream& log) {
    if (!cfg.stability)
        throw ConfigError("stability-table: no stability parameters; provide a "
                          "'stability' block or use a problem that has them");
    const std::string out = cfg.out.empty() ? "stability_table.csv" : cfg.out;
    const StabilityParams& sp = *cfg.stability;
    const double tau = cfg.bundle.problem.delay.tau;
    const int kappa = kappa_bar(cfg.bundle.problem.delay.delta_hat);
    if (!(sp.alpha3 > kappa * sp.alpha4))
        throw InfeasibleError(
            "stability-table: need alpha3 > kappa_bar * alpha4");

    const RateSolution gs = solve_gamma_star(sp, kappa, tau);
    const DeltaStarResult ds = solve_delta_star(sp, cfg.bundle.policy, kappa);
    const double target = sp.margin(kappa) / (1.0 + kappa);

    std::vector<RateTableRow> rows;
    for (double d : cfg.delta_list) {
        RateTableRow row;
        row.step = d;
        row.epsilon = epsilon_delta(sp, cfg.bundle.policy, d);
        row.feasible = row.epsilon < target;
        if (row.feasible)
            row.gamma_star_delta =
                solve_gamma_star_delta(sp, kappa, tau, d, row.epsilon).gamma;
        rows.push_back(row);
    }
    write_rate_table_csv(rows, gs.gamma, ds, kappa, out);

    log << "gamma_star=" << gs.gamma << " delta_star=" << ds.delta_star
        << (ds.saturated ? " (saturated)" : "") << " kappa_bar=" << kappa << "\n";
    for (const auto& r : rows) {
        log << "delta=" << r.step << " epsilon=" << r.epsilon << " gamma_star_delta=";
        if (r.feasible)
            log << r.gamma_star_delta;
        else
            log << "infeasible (step >= delta_star)";
        log << "\n";
    }
    log << "wrote " << out << "\n";
    return kExitOk;
}

int cmd_check(const ExperimentConfig& cfg, std::ostream& log) {
    long failures = 0;

    try {
        validate_policy(cfg.bundle.policy);
        log << "policy: ok\n";
    } catch (const PolicyError& e) {
        ++failures;
        log << "policy: FAIL (" << e.what() << ")\n";
    }

    const double t_max =
        std::max(cfg.solver.horizon, 100.0 * cfg.bundle.problem.delay.tau);
    const DelayCheckReport dr = validate_delay(cfg.bundle.problem.delay, t_max);
    if (dr.ok) {
        log << "delay bounds: ok\n";
    } else {
        ++failures;
        log << "delay bounds: FAIL (" << dr.message << ")\n";
    }

    const SampledCheckReport ir = check_initial_holder(
        cfg.bundle.problem.initial, std::max(cfg.bundle.problem.delay.tau, 1e-3));
    if (ir.ok) {
        log << "initial Holder: ok\n";
    } else {
        ++failures;
        log << "initial Holder: FAIL (" << ir.violations << " violations)\n";
    }

    if (cfg.bundle.split) {
        const SampledCheckReport sr = check_split_consistency(*cfg.bundle.split);
        if (sr.ok) {
            log << "split consistency: ok\n";
        } else {
            ++failures;
            log << "split consistency: FAIL (" << sr.violations << " violations)\n";
        }
    }

    {
        // Coefficients must be pure functions of their inputs.
        const SddeProblem& p = cfg.bundle.problem;
        const size_t d = static_cast<size_t>(p.dim_x);
        const size_t dm = d * static_cast<size_t>(p.dim_w);
        Vec x(d), y(d), f1(d), f2(d), g1(dm), g2(dm);
        bool deterministic = true;
        for (int i = 0; i < 16; ++i) {
            for (size_t j = 0; j < d; ++j) {
                x[j] = std::cos(1.7 * i + static_cast<double>(j)) * 10.0;
                y[j] = std::sin(0.9 * i + static_cast<double>(j)) * 10.0;
            }
            p.drift(x, y, f1);
            p.drift(x, y, f2);
            p.diffusion(x, y, g1);
            p.diffusion(x, y, g2);
            if (f1 != f2 || g1 != g2) deterministic = false;
        }
        if (deterministic) {
            log << "coefficient determinism: ok\n";
        } else {
            ++failures;
            log << "coefficient determinism: FAIL (same input, different output)\n";
        }
    }

    {
        const int kb = kappa_bar(cfg.bundle.problem.delay.delta_hat);
        if (cfg.check_constants.k2 >= kb * cfg.check_constants.k3) {
            log << "K2 >= kappa_bar * K3: ok\n";
        } else {
            ++failures;
            log << "K2 >= kappa_bar * K3: FAIL (" << cfg.check_constants.k2
                << " < " << kb << " * " << cfg.check_constants.k3 << ")\n";
        }
    }

    if (cfg.bundle.problem.dim_x == 1) {
        const auto samples = scalar_sample_grid(cfg.check_box, cfg.check_grid);
        // Certify the constants against the raw coefficients first; the
        // preserved inequality is only meaningful for certified constants.
        const KhasminskiiReport raw =
            check_khasminskii_raw(cfg.bundle.problem, cfg.check_constants, samples);
        if (raw.ok) {
            log << "khasminskii raw certification: ok (" << raw.checked
                << " samples)\n";
        } else {
            ++failures;
            log << "khasminskii raw certification: FAIL (" << raw.violation_count
                << " of " << raw.checked << " samples)\n";
        }
        const KhasminskiiReport kr = check_khasminskii_preservation(
            cfg.bundle.problem, cfg.bundle.policy, cfg.solver.step,
            cfg.check_constants, samples);
        if (kr.ok) {
            log << "khasminskii preservation: ok (" << kr.checked << " samples)\n";
        } else {
            ++failures;
            log << "khasminskii preservation: FAIL (" << kr.violation_count
                << " of " << kr.checked << " samples)\n";
        }
    } else {
        log << "khasminskii checks: skipped (only scalar grids built in)\n";
    }

    const MultiplicityReport mr = check_multiplicity_bound(
        cfg.bundle.problem.delay, cfg.solver.step, cfg.check_k_max);
    if (mr.max_multiplicity <= mr.bound) {
        log << "delay multiplicity: ok (max " << mr.max_multiplicity
            << " <= bound " << mr.bound << ")\n";
    } else {
        ++failures;
        log << "delay multiplicity: FAIL (max " << mr.max_multiplicity
            << " > bound " << mr.bound << ")\n";
    }

    if (failures > 0) {
        log << failures << " check(s) failed\n";
        return kExitViolation;
    }
    log << "all checks passed\n";
    return kExitOk;
}

int run_command(const std::string& subcommand,
                const std::optional<std::string>& config_path,
                const Overrides& ov, std::ostream& log) {
    try {
        const ExperimentConfig cfg = config_path
                                         ? load_config_file(*config_path, ov)
                                         : parse_config("{}", ov);
        if (subcommand == "simulate") return cmd_simulate(cfg, log);
        if (subcommand == "converge") return cmd_converge(cfg, log);
        if (subcommand == "stability-table") return cmd_stability_table(cfg, log);
        if (subcommand == "check") return cmd_check(cfg, log);
        log << "error: unknown subcommand '" << subcommand << "'\n";
        return kExitConfig;
    } catch (const OverflowError& e) {
        log << "overflow: " << e.what() << "\n";
        return kExitOverflow;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

} // namespace sddem::cli
