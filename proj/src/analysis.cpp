#include "sddem/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "sddem/errors.hpp"
#include "sddem/parallel.hpp"

namespace sddem {

namespace {

double lsq_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw DomainError("fit: degenerate abscissae");
    return sxy / sxx;
}

long count_factor(double coarse, double fine, const char* what) {
    const double q = coarse / fine;
    const double r = std::round(q);
    if (r < 1.0 || std::abs(q - r) > 1e-9 * std::max(1.0, q))
        throw ConfigError(std::string(what) + ": " + std::to_string(fine) +
                          " does not divide " + std::to_string(coarse));
    return static_cast<long>(r);
}

// Monotonically increasing h with h(0) < 0: doubling bracket, then bisection
// until the residual clears tol.
template <class Fn>
RateSolution bisect_increasing(Fn&& h, double tol, const char* what) {
    double lo = 0.0;
    double h_lo = h(lo);
    if (h_lo > 0.0)
        throw InfeasibleError(std::string(what) + ": no positive root (h(0) > 0)");
    double hi = 1.0;
    int it = 0;
    while (h(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++it > 200)
            throw InfeasibleError(std::string(what) + ": failed to bracket a root");
    }
    RateSolution sol;
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < 400; ++i) {
        mid = 0.5 * (lo + hi);
        const double hm = h(mid);
        ++sol.iterations;
        if (hm < 0.0)
            lo = mid;
        else
            hi = mid;
        if (std::abs(hm) <= tol && (hi - lo) <= 1e-14 * std::max(1.0, mid)) break;
    }
    sol.gamma = mid;
    sol.residual = h(mid);
    if (std::abs(sol.residual) > tol)
        throw InfeasibleError(std::string(what) + ": bisection stalled, residual " +
                              std::to_string(sol.residual));
    return sol;
}

constexpr long kErrorBlock = 8; // fixed reduction granularity per path block

} // namespace

double fit_order(const std::vector<double>& steps,
                 const std::vector<double>& errors) {
    if (steps.size() != errors.size() || steps.size() < 2)
        throw ConfigError("fit_order: need at least two (step, error) pairs");
    std::vector<double> lx(steps.size()), ly(steps.size());
    for (size_t i = 0; i < steps.size(); ++i) {
        if (!(steps[i] > 0.0) || !(errors[i] > 0.0))
            throw DomainError("fit_order: steps and errors must be positive");
        lx[i] = std::log(steps[i]);
        ly[i] = std::log(errors[i]);
    }
    return lsq_slope(lx, ly);
}

ConvergenceReport strong_error(const SddeProblem& problem,
                               const TruncationPolicy& policy,
                               const std::vector<double>& steps,
                               double reference_step, double horizon,
                               long n_paths, std::uint64_t seed,
                               unsigned workers) {
    if (steps.empty()) throw ConfigError("strong_error: empty step list");
    for (size_t i = 1; i < steps.size(); ++i)
        if (!(steps[i] < steps[i - 1]))
            throw ConfigError("strong_error: steps must be strictly decreasing");
    if (n_paths < 1) throw ConfigError("strong_error: n_paths must be >= 1");
    const size_t ns = steps.size();
    std::vector<long> factors(ns);
    for (size_t i = 0; i < ns; ++i)
        factors[i] = count_factor(steps[i], reference_step, "strong_error");

    // Record only endpoints; intermediate states are not needed.
    const long huge_stride = std::numeric_limits<long>::max() / 4;

    const long n_blocks = (n_paths + kErrorBlock - 1) / kErrorBlock;
    struct BlockAcc {
        std::vector<double> err_sq;
        std::vector<long> excluded;
    };
    std::vector<BlockAcc> blocks(static_cast<size_t>(n_blocks));

    parallel_jobs(n_blocks, workers, [&](long b) {
        BlockAcc acc;
        acc.err_sq.assign(ns, 0.0);
        acc.excluded.assign(ns, 0);
        const long lo = b * kErrorBlock;
        const long hi = std::min(n_paths, lo + kErrorBlock);
        for (long pid = lo; pid < hi; ++pid) {
            const BrownianGrid fine =
                generate(seed, static_cast<std::uint64_t>(pid), reference_step,
                         horizon, problem.dim_w);
            SolverConfig ref_cfg{reference_step, horizon, huge_stride};
            const Trajectory ref = simulate(problem, policy, ref_cfg, fine);
            if (ref.status != PathStatus::ok)
                throw OverflowError(
                    "strong_error: reference path " + std::to_string(pid) +
                    " overflowed at step " + std::to_string(ref.overflow_step));
            const Vec& yref = ref.final_value();
            for (size_t i = 0; i < ns; ++i) {
                const BrownianGrid coarse = coarsen(fine, factors[i]);
                SolverConfig cfg{steps[i], horizon, huge_stride};
                const Trajectory tr = simulate(problem, policy, cfg, coarse);
                if (tr.status != PathStatus::ok) {
                    ++acc.excluded[i];
                    continue;
                }
                double e2 = 0.0;
                for (size_t j = 0; j < yref.size(); ++j) {
                    const double d = yref[j] - tr.final_value()[j];
                    e2 += d * d;
                }
                acc.err_sq[i] += e2;
            }
        }
        blocks[static_cast<size_t>(b)] = std::move(acc);
    });

    ConvergenceReport rep;
    rep.steps = steps;
    rep.n_paths = n_paths;
    rep.reference_step = reference_step;
    rep.rms_errors.assign(ns, 0.0);
    rep.excluded.assign(ns, 0);
    for (const auto& acc : blocks)
        for (size_t i = 0; i < ns; ++i) {
            rep.rms_errors[i] += acc.err_sq[i];
            rep.excluded[i] += acc.excluded[i];
        }
    for (size_t i = 0; i < ns; ++i) {
        const long used = n_paths - rep.excluded[i];
        rep.rms_errors[i] =
            used > 0 ? std::sqrt(rep.rms_errors[i] / static_cast<double>(used))
                     : std::numeric_limits<double>::quiet_NaN();
    }
    // Fit over the usable rows only; zero rows (step == reference) and
    // all-overflow rows carry no slope information.
    std::vector<double> fit_steps, fit_errs;
    for (size_t i = 0; i < ns; ++i)
        if (std::isfinite(rep.rms_errors[i]) && rep.rms_errors[i] > 0.0) {
            fit_steps.push_back(rep.steps[i]);
            fit_errs.push_back(rep.rms_errors[i]);
        }
    rep.fitted_order = fit_steps.size() >= 2
                           ? fit_order(fit_steps, fit_errs)
                           : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

RateSolution solve_gamma_star(const StabilityParams& params, int kappa,
                              double tau) {
    if (params.margin(kappa) <= 0.0)
        throw InfeasibleError(
            "solve_gamma_star: need lambda1 > alpha1 + lambda2/4 + "
            "kappa*(lambda2+alpha2); margin = " +
            std::to_string(params.margin(kappa)));
    const double base = params.alpha1 + 0.25 * params.lambda2;
    const double coef = kappa * (params.lambda2 + params.alpha2);
    auto h = [&](double g) {
        return base + coef * std::exp(g * tau) + g - params.lambda1;
    };
    return bisect_increasing(h, 1e-10 * (1.0 + std::abs(params.lambda1)),
                             "solve_gamma_star");
}

RateSolution solve_gamma_star_delta(const StabilityParams& params, int kappa,
                                    double tau, double step, double eps) {
    if (!(step > 0.0 && step <= 1.0))
        throw DomainError("solve_gamma_star_delta: step must lie in (0, 1]");
    if (eps < 0.0) throw DomainError("solve_gamma_star_delta: eps must be >= 0");
    const double margin = params.margin(kappa) - eps * (1.0 + kappa);
    if (margin <= 0.0)
        throw InfeasibleError(
            "solve_gamma_star_delta: eps exceeds the stability margin "
            "(step >= delta_star); slack = " +
            std::to_string(margin));
    const double base = params.alpha1 + 0.25 * params.lambda2 + eps;
    const double coef = kappa * (params.lambda2 + params.alpha2 + eps);
    auto h = [&](double g) {
        // -expm1 keeps (1 - e^{-g step})/step exact for tiny steps.
        return base + coef * std::exp(g * tau) - std::expm1(-g * step) / step -
               params.lambda1;
    };
    return bisect_increasing(h, 1e-10 * (1.0 + std::abs(params.lambda1)),
                             "solve_gamma_star_delta");
}

DeltaStarResult solve_delta_star(const StabilityParams& params,
                                 const TruncationPolicy& policy, int kappa) {
    const double margin = params.margin(kappa);
    if (margin <= 0.0)
        throw InfeasibleError("solve_delta_star: nonpositive stability margin " +
                              std::to_string(margin));
    const double target = margin / (1.0 + kappa);
    if (epsilon_delta(params, policy, 1.0) <= target) return {1.0, true};

    const double a = 4.0 * params.lbar + 2.0 * params.lbar1;
    if (policy.power && policy.power->phi_power == 0.25) {
        // eps(step) = a*step + b*sqrt(step): quadratic in sqrt(step).
        const double b = 8.0 * policy.power->phi_coeff * policy.power->phi_coeff;
        double s;
        if (a > 0.0)
            s = (-b + std::sqrt(b * b + 4.0 * a * target)) / (2.0 * a);
        else
            s = target / b;
        return {s * s, false};
    }

    // eps is increasing in step and continuous, with eps(0+) = 0 < target.
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (epsilon_delta(params, policy, mid) > target)
            hi = mid;
        else
            lo = mid;
        if ((hi - lo) <= 1e-9 * hi) break;
    }
    return {lo, false};
}

double fit_decay_rate(const EnsembleMoments& moments, double t_lo, double t_hi) {
    std::vector<double> ts, ls;
    for (size_t i = 0; i < moments.times.size(); ++i) {
        const double t = moments.times[i];
        if (t < t_lo || t > t_hi) continue;
        if (!(moments.mean_sq[i] > 0.0))
            throw ConfigError("fit_decay_rate: nonpositive moment inside window");
        ts.push_back(t);
        ls.push_back(std::log(moments.mean_sq[i]));
    }
    if (ts.size() < 2)
        throw ConfigError("fit_decay_rate: window contains fewer than two points");
    return lsq_slope(ts, ls);
}

double h_infinity_partial_sum(const EnsembleMoments& moments) {
    if (moments.times.size() < 2) return 0.0;
    const double spacing = moments.times[1] - moments.times[0];
    double sum = 0.0;
    for (double v : moments.mean_sq) sum += v;
    return sum * spacing;
}

namespace {
std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
} // namespace

void write_convergence_csv(const ConvergenceReport& rep, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file " + path);
    os << "delta,rms_error\n";
    for (size_t i = 0; i < rep.steps.size(); ++i)
        os << fmt_g(rep.steps[i]) << "," << fmt_g(rep.rms_errors[i]) << "\n";
    if (std::isfinite(rep.fitted_order))
        os << "order=" << fmt_g(rep.fitted_order) << "\n";
}

void write_rate_table_csv(const std::vector<RateTableRow>& rows,
                          double gamma_star, const DeltaStarResult& delta_star,
                          int kappa, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file " + path);
    os << "# gamma_star=" << fmt_g(gamma_star) << "\n";
    os << "# delta_star=" << fmt_g(delta_star.delta_star)
       << (delta_star.saturated ? " (saturated at 1)" : "") << "\n";
    os << "# kappa_bar=" << kappa << "\n";
    os << "delta,epsilon,gamma_star_delta\n";
    for (const auto& r : rows) {
        os << fmt_g(r.step) << "," << fmt_g(r.epsilon) << ",";
        if (r.feasible)
            os << fmt_g(r.gamma_star_delta);
        else
            os << "infeasible";
        os << "\n";
    }
}

} // namespace sddem
