#ifndef SDDEM_DELAY_HPP
#define SDDEM_DELAY_HPP

#include <cstdint>
#include <functional>
#include <string>

namespace sddem {

// Variable delay t -> delta(t) with 0 <= delta(t) <= tau and
// |delta'(t)| <= delta_hat < 1.  Both bounds are user-declared; see
// validate_delay for the sampled spot-check.
struct DelayFunction {
    std::function<double(double)> delta;
    double tau = 0.0;
    double delta_hat = 0.0;

    static DelayFunction constant(double tau);
    // delta(t) = base - amp*sin(t); declared derivative bound is |amp|.
    static DelayFunction sinusoid(double base, double amp, double tau);
    // No delay at all: tau = 0, delta == 0.
    static DelayFunction none();
};

struct DelayCheckReport {
    bool ok = true;
    long range_violations = 0;     // delta(t) outside [0, tau]
    long derivative_violations = 0; // |delta(t+h)-delta(t)| > delta_hat*h + tol*h
    std::string message;
};

// Spot-check of the declared bounds on a uniform grid of `points` samples
// over [0, t_max] with finite-difference stencil h.
DelayCheckReport validate_delay(const DelayFunction& d, double t_max,
                                long points = 10000, double h = 1e-6,
                                double tol = 1e-4);

// Number of whole steps the delayed argument lags behind:
// floor(delta(k*step)/step), clamped to [0, M] with M = tau/step.
// Requires step to be a fraction of tau (step = tau/M); throws ConfigError
// otherwise.  tau = 0 always yields 0.
long delay_index(const DelayFunction& delay, double step, long k);

// delay_index with M = tau/step already computed; the stepping loop's form.
long delay_index_with_depth(const DelayFunction& delay, double step, long k,
                            long M);

// floor(1/(1 - delta_hat)) + 1: bound on how many grid indices k can map
// to the same delayed index k - delay_index(k).
int kappa_bar(double delta_hat);

struct MultiplicityReport {
    int max_multiplicity = 0;
    int bound = 0; // kappa_bar(delta_hat)
    long worst_index = 0; // a delayed index attaining the maximum
};

// Enumerates u(k) = k - delay_index(k) for k = 0..k_max and counts the
// largest collision class.  max_multiplicity <= bound must hold for any
// delay honouring the declared derivative bound.
MultiplicityReport check_multiplicity_bound(const DelayFunction& delay,
                                            double step, long k_max);

// M = tau/step if step is a fraction of tau (within snapping tolerance),
// ConfigError otherwise.  Returns 0 for tau = 0.
long history_depth(double tau, double step);

} // namespace sddem

#endif
