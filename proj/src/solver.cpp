#include "sddem/solver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sddem/errors.hpp"
#include "sddem/parallel.hpp"

namespace sddem {

namespace {

// Integer count q = num/den, snapping away rounding noise.
long exact_count(double num, double den, const char* what) {
    const double q = num / den;
    const double r = std::round(q);
    if (r < 1.0 || std::abs(q - r) > 1e-9 * std::max(1.0, q))
        throw ConfigError(std::string(what) + ": " + std::to_string(num) +
                          " is not an integer multiple of " + std::to_string(den));
    return static_cast<long>(r);
}

void validate_config(const SolverConfig& cfg) {
    if (!(cfg.step > 0.0 && cfg.step <= 1.0))
        throw ConfigError("solver: step must lie in (0, 1]");
    if (cfg.horizon <= 0.0) throw ConfigError("solver: horizon must be positive");
    if (cfg.record_stride < 1) throw ConfigError("solver: record_stride must be >= 1");
    exact_count(cfg.horizon, cfg.step, "solver: horizon/step");
}

// Truncated coefficient evaluation with the radius fixed once per run.
// Holds per-run scratch; never share an instance across threads.
struct CoeffEval {
    const SddeProblem* base = nullptr;
    const SplitSddeProblem* split = nullptr; // non-null in partial mode
    double radius = 0.0;
    Vec tx, ty, scratch;

    CoeffEval(const SddeProblem& p, const SplitSddeProblem* s, double r)
        : base(&p), split(s), radius(r), tx(p.dim_x), ty(p.dim_x),
          scratch(static_cast<size_t>(p.dim_x) * p.dim_w) {}

    void drift(std::span<const double> x, std::span<const double> y,
               std::span<double> out) {
        truncate_point_into(x, radius, tx);
        truncate_point_into(y, radius, ty);
        if (!split) {
            base->drift(tx, ty, out);
        } else {
            split->drift_linear(x, y, out);
            std::span<double> sup(scratch.data(), out.size());
            split->drift_super(tx, ty, sup);
            for (size_t i = 0; i < out.size(); ++i) out[i] += sup[i];
        }
    }

    void diffusion(std::span<const double> x, std::span<const double> y,
                   std::span<double> out) {
        truncate_point_into(x, radius, tx);
        truncate_point_into(y, radius, ty);
        if (!split) {
            base->diffusion(tx, ty, out);
        } else {
            split->diff_linear(x, y, out);
            std::span<double> sup(scratch.data(), out.size());
            split->diff_super(tx, ty, sup);
            for (size_t i = 0; i < out.size(); ++i) out[i] += sup[i];
        }
    }
};

struct RunOutcome {
    PathStatus status = PathStatus::ok;
    long overflow_step = -1;
};

// The discrete recursion, shared by every entry point.  sink(k, t_k, y_k)
// fires for each grid index k in [-M, N] (prefix included).
template <class Sink>
RunOutcome run_path(const SddeProblem& p, const SplitSddeProblem* split,
                    const TruncationPolicy& policy, double step, long N,
                    std::span<const double> increments, Sink&& sink) {
    const long M = history_depth(p.delay.tau, step);
    const int d = p.dim_x;
    const int m = p.dim_w;
    CoeffEval coeffs(p, split, truncation_radius(policy, step));

    HistoryRing history(M, d);
    for (long k = -M; k <= 0; ++k) {
        const Vec xi = p.initial.xi(static_cast<double>(k) * step);
        if (static_cast<int>(xi.size()) != d)
            throw ConfigError("initial path dimension mismatch");
        auto slot = history.slot(k);
        std::copy(xi.begin(), xi.end(), slot.begin());
        sink(k, static_cast<double>(k) * step, history.at(k));
    }

    Vec f(d), g(static_cast<size_t>(d) * m), next(d);
    for (long k = 0; k < N; ++k) {
        const long dk = delay_index_with_depth(p.delay, step, k, M);
        const auto x = history.at(k);
        const auto y = history.at(k - dk);
        coeffs.drift(x, y, f);
        coeffs.diffusion(x, y, g);
        const double* dW = increments.data() + static_cast<size_t>(k) * m;
        for (int i = 0; i < d; ++i) {
            double acc = x[i] + f[i] * step;
            const double* gi = g.data() + static_cast<size_t>(i) * m;
            for (int j = 0; j < m; ++j) acc += gi[j] * dW[j];
            next[i] = acc;
        }
        if (!all_finite(next)) return {PathStatus::overflow, k + 1};
        auto slot = history.slot(k + 1);
        std::copy(next.begin(), next.end(), slot.begin());
        sink(k + 1, static_cast<double>(k + 1) * step, history.at(k + 1));
    }
    return {};
}

// Brownian grid at exactly config.step covering at least N steps.
BrownianGrid align_grid(const BrownianGrid& grid, const SolverConfig& cfg,
                        long N, int dim_w) {
    if (grid.dim_w != dim_w)
        throw ConfigError("simulate: grid dim_w does not match the problem");
    const long factor = exact_count(cfg.step, grid.finest_step,
                                    "simulate: step/finest_step");
    BrownianGrid coarse = coarsen(grid, factor);
    if (static_cast<long>(coarse.n_steps()) < N)
        throw ConfigError("simulate: Brownian grid shorter than the run horizon");
    return coarse;
}

Trajectory simulate_impl(const SddeProblem& p, const SplitSddeProblem* split,
                         const TruncationPolicy& policy, const SolverConfig& cfg,
                         const BrownianGrid& grid) {
    validate_config(cfg);
    const long N = exact_count(cfg.horizon, cfg.step, "simulate: horizon/step");
    const BrownianGrid aligned = align_grid(grid, cfg, N, p.dim_w);

    Trajectory tr;
    const long stride = cfg.record_stride;
    auto sink = [&](long k, double t, std::span<const double> y) {
        if (k % stride == 0 || k == N) {
            tr.times.push_back(t);
            tr.values.emplace_back(y.begin(), y.end());
        }
    };
    const RunOutcome out =
        run_path(p, split, policy, cfg.step, N, aligned.increments, sink);
    tr.status = out.status;
    tr.overflow_step = out.overflow_step;
    return tr;
}

constexpr long kEnsembleBlock = 32; // fixed reduction granularity

EnsembleMoments ensemble_impl(const SddeProblem& p, const SplitSddeProblem* split,
                              const TruncationPolicy& policy,
                              const SolverConfig& cfg, long n_paths,
                              std::uint64_t seed, unsigned workers) {
    validate_config(cfg);
    if (n_paths < 1) throw ConfigError("run_ensemble: n_paths must be >= 1");
    const long N = exact_count(cfg.horizon, cfg.step, "run_ensemble: horizon/step");

    // Recorded indices: k >= 0 with k % stride == 0, plus k = N.
    std::vector<double> times;
    for (long k = 0; k <= N; ++k)
        if (k % cfg.record_stride == 0 || k == N)
            times.push_back(static_cast<double>(k) * cfg.step);
    const size_t nrec = times.size();

    const long n_blocks = (n_paths + kEnsembleBlock - 1) / kEnsembleBlock;
    struct BlockAcc {
        std::vector<double> sum, sumsq;
        long ok = 0;
    };
    std::vector<BlockAcc> blocks(static_cast<size_t>(n_blocks));
    std::vector<PathStatus> statuses(static_cast<size_t>(n_paths), PathStatus::ok);

    parallel_jobs(n_blocks, workers, [&](long b) {
        BlockAcc acc;
        acc.sum.assign(nrec, 0.0);
        acc.sumsq.assign(nrec, 0.0);
        std::vector<double> path_sq(nrec, 0.0);
        const long lo = b * kEnsembleBlock;
        const long hi = std::min(n_paths, lo + kEnsembleBlock);
        for (long pid = lo; pid < hi; ++pid) {
            const BrownianGrid grid = generate(seed, static_cast<std::uint64_t>(pid),
                                               cfg.step, cfg.horizon, p.dim_w);
            size_t rec = 0;
            auto sink = [&](long k, double, std::span<const double> y) {
                if (k >= 0 && (k % cfg.record_stride == 0 || k == N))
                    path_sq[rec++] = norm2_sq(y);
            };
            const RunOutcome out =
                run_path(p, split, policy, cfg.step, N, grid.increments, sink);
            statuses[static_cast<size_t>(pid)] = out.status;
            if (out.status != PathStatus::ok) continue; // excluded from moments
            for (size_t i = 0; i < nrec; ++i) {
                acc.sum[i] += path_sq[i];
                acc.sumsq[i] += path_sq[i] * path_sq[i];
            }
            ++acc.ok;
        }
        blocks[static_cast<size_t>(b)] = std::move(acc);
    });

    EnsembleMoments mom;
    mom.times = std::move(times);
    mom.mean_sq.assign(nrec, 0.0);
    mom.std_err.assign(nrec, 0.0);
    std::vector<double> sumsq(nrec, 0.0);
    for (const auto& acc : blocks) { // fixed order: worker count invisible
        mom.count += acc.ok;
        for (size_t i = 0; i < nrec; ++i) {
            mom.mean_sq[i] += acc.sum[i];
            sumsq[i] += acc.sumsq[i];
        }
    }
    mom.n_failed = n_paths - mom.count;
    mom.statuses = std::move(statuses);
    const double n = static_cast<double>(mom.count);
    for (size_t i = 0; i < nrec; ++i) {
        if (mom.count == 0) break;
        const double mean = mom.mean_sq[i] / n;
        mom.mean_sq[i] = mean;
        if (mom.count >= 2) {
            double var = (sumsq[i] - n * mean * mean) / (n - 1.0);
            if (var < 0.0) var = 0.0; // rounding at tiny variances
            mom.std_err[i] = std::sqrt(var / n);
        }
    }
    return mom;
}

} // namespace

Vec step_once(const SddeProblem& problem, const TruncationPolicy& policy,
              const SolverConfig& config, long k, const HistoryRing& history,
              std::span<const double> dW) {
    if (static_cast<int>(dW.size()) != problem.dim_w)
        throw ConfigError("step_once: dW dimension mismatch");
    const long M = history_depth(problem.delay.tau, config.step);
    const long dk = delay_index_with_depth(problem.delay, config.step, k, M);
    const auto x = history.at(k);
    const auto y = history.at(k - dk);
    CoeffEval coeffs(problem, nullptr, truncation_radius(policy, config.step));
    const int d = problem.dim_x;
    const int m = problem.dim_w;
    Vec f(d), g(static_cast<size_t>(d) * m), next(d);
    coeffs.drift(x, y, f);
    coeffs.diffusion(x, y, g);
    for (int i = 0; i < d; ++i) {
        double acc = x[i] + f[i] * config.step;
        for (int j = 0; j < m; ++j) acc += g[static_cast<size_t>(i) * m + j] * dW[j];
        next[i] = acc;
    }
    return next;
}

Trajectory simulate(const SddeProblem& problem, const TruncationPolicy& policy,
                    const SolverConfig& config, const BrownianGrid& grid,
                    TruncationMode mode) {
    if (mode == TruncationMode::partial)
        throw ConfigError("simulate: partial mode requires a SplitSddeProblem");
    return simulate_impl(problem, nullptr, policy, config, grid);
}

Trajectory simulate(const SplitSddeProblem& split, const TruncationPolicy& policy,
                    const SolverConfig& config, const BrownianGrid& grid,
                    TruncationMode mode) {
    return simulate_impl(split.base,
                         mode == TruncationMode::partial ? &split : nullptr,
                         policy, config, grid);
}

EnsembleMoments run_ensemble(const SddeProblem& problem,
                             const TruncationPolicy& policy,
                             const SolverConfig& config, long n_paths,
                             std::uint64_t seed, TruncationMode mode,
                             unsigned workers) {
    if (mode == TruncationMode::partial)
        throw ConfigError("run_ensemble: partial mode requires a SplitSddeProblem");
    return ensemble_impl(problem, nullptr, policy, config, n_paths, seed, workers);
}

EnsembleMoments run_ensemble(const SplitSddeProblem& split,
                             const TruncationPolicy& policy,
                             const SolverConfig& config, long n_paths,
                             std::uint64_t seed, TruncationMode mode,
                             unsigned workers) {
    return ensemble_impl(split.base,
                         mode == TruncationMode::partial ? &split : nullptr,
                         policy, config, n_paths, seed, workers);
}

namespace {
std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
} // namespace

void write_trajectory_csv(const Trajectory& tr, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file " + path);
    const size_t d = tr.values.empty() ? 1 : tr.values[0].size();
    os << "t";
    for (size_t i = 1; i <= d; ++i) os << ",y_" << i;
    os << "\n";
    for (size_t r = 0; r < tr.times.size(); ++r) {
        os << fmt_g(tr.times[r]);
        for (double v : tr.values[r]) os << "," << fmt_g(v);
        os << "\n";
    }
}

void write_moments_csv(const EnsembleMoments& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file " + path);
    os << "t,mean_sq,stderr,n\n";
    for (size_t r = 0; r < m.times.size(); ++r)
        os << fmt_g(m.times[r]) << "," << fmt_g(m.mean_sq[r]) << ","
           << fmt_g(m.std_err[r]) << "," << m.count << "\n";
}

} // namespace sddem
