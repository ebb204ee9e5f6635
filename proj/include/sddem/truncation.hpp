#ifndef SDDEM_TRUNCATION_HPP
#define SDDEM_TRUNCATION_HPP

#include <functional>
#include <optional>
#include <span>

#include "sddem/problem.hpp"

namespace sddem {

// Shape parameters of mu(r) = mu_coeff * r^mu_power and
// phi(step) = phi_coeff * step^{-phi_power}.  Kept alongside the opaque
// callables so radius inversion and epsilon_delta can use closed forms.
struct PowerLawShape {
    double mu_coeff = 1.0;
    double mu_power = 2.0;
    double phi_coeff = 1.0;
    double phi_power = 0.25;
};

// The pair (mu, phi) controlling the truncation radius mu^{-1}(phi(step)).
// mu is strictly increasing, phi strictly decreasing on (0,1] with
// step^{1/4} * phi(step) <= h_hat.
struct TruncationPolicy {
    std::function<double(double)> mu;
    std::function<double(double)> mu_inv;
    std::function<double(double)> phi;
    double h_hat = 1.0;
    std::optional<PowerLawShape> power; // set by power_law_policy

    static TruncationPolicy power_law(double mu_coeff, double mu_power,
                                      double phi_coeff,
                                      double phi_power = 0.25,
                                      double h_hat = 0.0);
};

// Sampled self-consistency of a policy: phi decreasing, step^{1/4} phi <= h_hat,
// mu(mu_inv(v)) == v.  Throws PolicyError on failure.
void validate_policy(const TruncationPolicy& policy, int samples = 64);

// Radial projection onto the closed ball of the given radius; the origin
// maps to itself (x/|x| = 0 at x = 0).
Vec truncate_point(std::span<const double> x, double radius);
// In-place form used by the stepping loop.
void truncate_point_into(std::span<const double> x, double radius,
                         std::span<double> out);

// mu^{-1}(phi(step)); PolicyError if phi(step) < mu(1) so the inverse is
// outside its domain.
double truncation_radius(const TruncationPolicy& policy, double step);

// f(pi(x), pi(y)) and g(pi(x), pi(y)); both grow at most linearly with
// factor phi(step).
Vec truncated_drift(const SddeProblem& p, const TruncationPolicy& policy,
                    double step, std::span<const double> x,
                    std::span<const double> y);
Mat truncated_diffusion(const SddeProblem& p, const TruncationPolicy& policy,
                        double step, std::span<const double> x,
                        std::span<const double> y);

// F1(x,y) + F(pi(x), pi(y)) and G1(x,y) + G(pi(x), pi(y)): only the
// super-linear part sees truncated arguments.
Vec partially_truncated_drift(const SplitSddeProblem& split,
                              const TruncationPolicy& policy, double step,
                              std::span<const double> x,
                              std::span<const double> y);
Mat partially_truncated_diffusion(const SplitSddeProblem& split,
                                  const TruncationPolicy& policy, double step,
                                  std::span<const double> x,
                                  std::span<const double> y);

} // namespace sddem

#endif
