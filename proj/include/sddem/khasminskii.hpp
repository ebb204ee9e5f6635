#ifndef SDDEM_KHASMINSKII_HPP
#define SDDEM_KHASMINSKII_HPP

#include <utility>
#include <vector>

#include "sddem/truncation.hpp"

namespace sddem {

// Constants of the dissipativity condition
//   2<x, f(x,y)> + |g(x,y)|^2 <= k1 (1+|x|^2+|y|^2) - k2 |x|^beta + k3 |y|^beta.
struct KhasminskiiConstants {
    double k1 = 1.0;
    double k2 = 0.0;
    double k3 = 0.0;
    double beta = 4.0; // > 2

    // 2*k1 * max(1, 1/mu_inv(phi(1))): the inflated constant the truncated
    // coefficients satisfy for every step in (0,1].
    double k1_hat(const TruncationPolicy& policy) const;
};

struct KhasminskiiViolation {
    Vec x;
    Vec y;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct KhasminskiiReport {
    bool ok = true;
    long checked = 0;
    std::vector<KhasminskiiViolation> violations; // capped at 64 entries
    long violation_count = 0;
    double k1_hat = 0.0;
};

// Evaluates, for each sample (x, y),
//   LHS = 2<x, f_step(x,y)> + |g_step(x,y)|^2
//   RHS = k1_hat (1+|x|^2+|y|^2) - k2 |pi(x)|^beta + k3 |pi(y)|^beta
// and reports every sample with LHS > RHS + 1e-9 (1+|RHS|).  Violations are
// data, not errors: the caller decides what a nonempty list means.
KhasminskiiReport check_khasminskii_preservation(
    const SddeProblem& problem, const TruncationPolicy& policy, double step,
    const KhasminskiiConstants& constants,
    const std::vector<std::pair<Vec, Vec>>& samples);

// Uniform grid of (x, y) pairs over [-box, box]^2 for scalar problems;
// the default sample set for the checker and the certification scans.
std::vector<std::pair<Vec, Vec>> scalar_sample_grid(double box, int points_per_axis);

// Raw-coefficient scan: does (k1,k2,k3,beta) satisfy the condition for f, g
// themselves on the given samples?  Used to certify constants before
// trusting the preservation check.
KhasminskiiReport check_khasminskii_raw(
    const SddeProblem& problem, const KhasminskiiConstants& constants,
    const std::vector<std::pair<Vec, Vec>>& samples);

} // namespace sddem

#endif
