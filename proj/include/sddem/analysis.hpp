#ifndef SDDEM_ANALYSIS_HPP
#define SDDEM_ANALYSIS_HPP

#include <string>
#include <vector>

#include "sddem/solver.hpp"
#include "sddem/stability.hpp"

namespace sddem {

struct ConvergenceReport {
    std::vector<double> steps;      // strictly decreasing
    std::vector<double> rms_errors; // sqrt(mean |y_ref(T) - y_step(T)|^2)
    double fitted_order = 0.0;      // NaN when fewer than two steps
    long n_paths = 0;
    double reference_step = 0.0;
    std::vector<long> excluded; // per step: paths dropped for coarse overflow
};

struct RateSolution {
    double gamma = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

struct DeltaStarResult {
    double delta_star = 0.0;
    bool saturated = false; // epsilon(1) below target: the whole (0,1] works
};

// Least-squares slope of log(err) vs log(step).
double fit_order(const std::vector<double>& steps,
                 const std::vector<double>& errors);

// Common-path strong error at the final time: each path is simulated once
// at reference_step and once per coarse step on coarsenings of the same
// Brownian grid.  Reference overflow aborts; coarse overflow drops the
// path from that step's average (count reported).
ConvergenceReport strong_error(const SddeProblem& problem,
                               const TruncationPolicy& policy,
                               const std::vector<double>& steps,
                               double reference_step, double horizon,
                               long n_paths, std::uint64_t seed,
                               unsigned workers = 0);

// Root of  lambda1 = (alpha1 + lambda2/4) + kappa (lambda2+alpha2) e^{g tau} + g.
// Bisection; the left side of the bracket is g = 0, the right found by
// doubling.  InfeasibleError when the margin condition fails.
RateSolution solve_gamma_star(const StabilityParams& params, int kappa,
                              double tau);

// Root of  lambda1 = (alpha1 + lambda2/4 + eps)
//                  + kappa (lambda2+alpha2+eps) e^{g tau} + (1-e^{-g step})/step.
RateSolution solve_gamma_star_delta(const StabilityParams& params, int kappa,
                                    double tau, double step, double eps);

// Largest step with epsilon_step <= margin/(1+kappa).  Closed form for the
// power-law policy with phi_power = 1/4, bisection otherwise.
DeltaStarResult solve_delta_star(const StabilityParams& params,
                                 const TruncationPolicy& policy, int kappa);

// Least-squares slope of log(mean_sq) vs t on [t_lo, t_hi]; negative for
// mean-square stable systems.
double fit_decay_rate(const EnsembleMoments& moments, double t_lo, double t_hi);

// sum of mean_sq * spacing over the recorded grid: a finite witness of
// integral E|y|^2 dt staying bounded.
double h_infinity_partial_sum(const EnsembleMoments& moments);

// CSV: "delta,rms_error" rows then "order=<slope>".
void write_convergence_csv(const ConvergenceReport& rep, const std::string& path);

struct RateTableRow {
    double step = 0.0;
    double epsilon = 0.0;
    double gamma_star_delta = 0.0;
    bool feasible = true;
};

// CSV mirroring the step-size rate table: '#' header lines for gamma_star,
// delta_star, kappa_bar, then "delta,epsilon,gamma_star_delta" rows.
void write_rate_table_csv(const std::vector<RateTableRow>& rows,
                          double gamma_star, const DeltaStarResult& delta_star,
                          int kappa, const std::string& path);

} // namespace sddem

#endif
