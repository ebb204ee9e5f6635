#include "sddem/delay.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "sddem/errors.hpp"

namespace sddem {

DelayFunction DelayFunction::constant(double tau) {
    return {[tau](double) { return tau; }, tau, 0.0};
}

DelayFunction DelayFunction::sinusoid(double base, double amp, double tau) {
    return {[base, amp](double t) { return base - amp * std::sin(t); }, tau,
            std::abs(amp)};
}

DelayFunction DelayFunction::none() {
    return {[](double) { return 0.0; }, 0.0, 0.0};
}

DelayCheckReport validate_delay(const DelayFunction& d, double t_max,
                                long points, double h, double tol) {
    DelayCheckReport rep;
    if (points < 2) points = 2;
    const double dt = t_max / static_cast<double>(points - 1);
    for (long i = 0; i < points; ++i) {
        const double t = i * dt;
        const double v = d.delta(t);
        if (v < -tol || v > d.tau + tol) ++rep.range_violations;
        const double dv = std::abs(d.delta(t + h) - v);
        if (dv > (d.delta_hat + tol) * h) ++rep.derivative_violations;
    }
    rep.ok = rep.range_violations == 0 && rep.derivative_violations == 0;
    if (!rep.ok)
        rep.message = "delay bounds violated: " +
                      std::to_string(rep.range_violations) + " range, " +
                      std::to_string(rep.derivative_violations) + " derivative";
    return rep;
}

namespace {
// Snaps a quotient that is an integer up to rounding noise; plain floor
// otherwise.  Guards grid arithmetic like 0.05/0.01 -> 5.
long floor_snapped(double q) {
    const double r = std::round(q);
    if (std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(q)))
        return static_cast<long>(r);
    return static_cast<long>(std::floor(q));
}
} // namespace

long history_depth(double tau, double step) {
    if (step <= 0.0) throw ConfigError("step must be positive");
    if (tau == 0.0) return 0;
    const double q = tau / step;
    const double r = std::round(q);
    if (r < 1.0 || std::abs(q - r) > 1e-9 * std::max(1.0, q))
        throw ConfigError("step " + std::to_string(step) +
                          " is not a fraction tau/M of the delay bound tau=" +
                          std::to_string(tau));
    return static_cast<long>(r);
}

long delay_index_with_depth(const DelayFunction& delay, double step, long k,
                            long M) {
    const double dk = delay.delta(static_cast<double>(k) * step);
    const long idx = floor_snapped(dk / step);
    return std::clamp(idx, 0L, M);
}

long delay_index(const DelayFunction& delay, double step, long k) {
    const long M = history_depth(delay.tau, step);
    if (k < 0) throw DomainError("delay_index: k must be nonnegative");
    return delay_index_with_depth(delay, step, k, M);
}

int kappa_bar(double delta_hat) {
    if (!(delta_hat >= 0.0 && delta_hat < 1.0))
        throw DomainError("kappa_bar: delta_hat must lie in [0, 1)");
    return static_cast<int>(std::floor(1.0 / (1.0 - delta_hat))) + 1;
}

MultiplicityReport check_multiplicity_bound(const DelayFunction& delay,
                                            double step, long k_max) {
    const long M = history_depth(delay.tau, step);
    MultiplicityReport rep;
    rep.bound = kappa_bar(delay.delta_hat);

    // u(k) = k - delta_k ranges over [-M, k_max]; count with a flat table.
    std::vector<int> counts(static_cast<size_t>(k_max + M + 1), 0);
    for (long k = 0; k <= k_max; ++k) {
        const long u = k - delay_index(delay, step, k);
        const int c = ++counts[static_cast<size_t>(u + M)];
        if (c > rep.max_multiplicity) {
            rep.max_multiplicity = c;
            rep.worst_index = u;
        }
    }
    return rep;
}

} // namespace sddem
