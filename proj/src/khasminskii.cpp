#include "sddem/khasminskii.hpp"

#include <algorithm>
#include <cmath>

namespace sddem {

double KhasminskiiConstants::k1_hat(const TruncationPolicy& policy) const {
    const double r1 = policy.mu_inv(policy.phi(1.0));
    return 2.0 * k1 * std::max(1.0, 1.0 / r1);
}

namespace {
KhasminskiiReport run_check(const SddeProblem& problem,
                            const KhasminskiiConstants& c,
                            const std::vector<std::pair<Vec, Vec>>& samples,
                            double k1_eff, double radius) {
    KhasminskiiReport rep;
    rep.k1_hat = k1_eff;
    const size_t d = static_cast<size_t>(problem.dim_x);
    const size_t dm = d * static_cast<size_t>(problem.dim_w);
    Vec tx(d), ty(d), f(d), g(dm);
    const bool truncate = radius > 0.0;

    for (const auto& [x, y] : samples) {
        if (truncate) {
            truncate_point_into(x, radius, tx);
            truncate_point_into(y, radius, ty);
        } else {
            tx = x;
            ty = y;
        }
        problem.drift(tx, ty, f);
        problem.diffusion(tx, ty, g);
        const double lhs = 2.0 * dot(x, f) + norm2_sq(g);
        const double rhs = k1_eff * (1.0 + norm2_sq(x) + norm2_sq(y)) -
                           c.k2 * std::pow(norm2(tx), c.beta) +
                           c.k3 * std::pow(norm2(ty), c.beta);
        ++rep.checked;
        if (lhs > rhs + 1e-9 * (1.0 + std::abs(rhs))) {
            ++rep.violation_count;
            if (rep.violations.size() < 64)
                rep.violations.push_back({x, y, lhs, rhs});
        }
    }
    rep.ok = rep.violation_count == 0;
    return rep;
}
} // namespace

KhasminskiiReport check_khasminskii_preservation(
    const SddeProblem& problem, const TruncationPolicy& policy, double step,
    const KhasminskiiConstants& constants,
    const std::vector<std::pair<Vec, Vec>>& samples) {
    const double radius = truncation_radius(policy, step);
    return run_check(problem, constants, samples, constants.k1_hat(policy), radius);
}

KhasminskiiReport check_khasminskii_raw(
    const SddeProblem& problem, const KhasminskiiConstants& constants,
    const std::vector<std::pair<Vec, Vec>>& samples) {
    return run_check(problem, constants, samples, constants.k1, 0.0);
}

std::vector<std::pair<Vec, Vec>> scalar_sample_grid(double box,
                                                    int points_per_axis) {
    std::vector<std::pair<Vec, Vec>> out;
    out.reserve(static_cast<size_t>(points_per_axis) * points_per_axis);
    for (int i = 0; i < points_per_axis; ++i) {
        const double x = -box + 2.0 * box * i / (points_per_axis - 1);
        for (int j = 0; j < points_per_axis; ++j) {
            const double y = -box + 2.0 * box * j / (points_per_axis - 1);
            out.push_back({Vec{x}, Vec{y}});
        }
    }
    return out;
}

} // namespace sddem
