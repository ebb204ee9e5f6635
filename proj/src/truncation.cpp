#include "sddem/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sddem/errors.hpp"

namespace sddem {

TruncationPolicy TruncationPolicy::power_law(double mu_coeff, double mu_power,
                                             double phi_coeff, double phi_power,
                                             double h_hat) {
    if (mu_coeff <= 0.0 || mu_power <= 0.0 || phi_coeff <= 0.0 || phi_power < 0.0)
        throw PolicyError("power_law: coefficients must be positive");
    if (phi_power > 0.25)
        throw PolicyError("power_law: phi_power > 1/4 breaks step^{1/4} phi(step) <= h_hat");
    TruncationPolicy p;
    p.mu = [mu_coeff, mu_power](double r) { return mu_coeff * std::pow(r, mu_power); };
    p.mu_inv = [mu_coeff, mu_power](double v) {
        return std::pow(v / mu_coeff, 1.0 / mu_power);
    };
    p.phi = [phi_coeff, phi_power](double d) { return phi_coeff * std::pow(d, -phi_power); };
    // sup over (0,1] of step^{1/4} phi(step) is attained at step = 1 when
    // phi_power <= 1/4.
    p.h_hat = h_hat > 0.0 ? h_hat : std::max({1.0, mu_coeff, phi_coeff});
    p.power = PowerLawShape{mu_coeff, mu_power, phi_coeff, phi_power};
    if (p.h_hat < std::max(1.0, mu_coeff))
        throw PolicyError("power_law: h_hat must be >= max(1, mu(1))");
    return p;
}

void validate_policy(const TruncationPolicy& policy, int samples) {
    if (!policy.mu || !policy.mu_inv || !policy.phi)
        throw PolicyError("policy callables must all be set");
    const double mu1 = policy.mu(1.0);
    if (policy.h_hat < std::max(1.0, mu1))
        throw PolicyError("h_hat must be >= max(1, mu(1))");
    double prev_phi = 0.0;
    for (int i = 1; i <= samples; ++i) {
        const double step = static_cast<double>(i) / samples;
        const double ph = policy.phi(step);
        if (std::pow(step, 0.25) * ph > policy.h_hat * (1.0 + 1e-12))
            throw PolicyError("step^{1/4} phi(step) exceeds h_hat at step=" +
                              std::to_string(step));
        if (ph < mu1 * (1.0 - 1e-12))
            throw PolicyError("phi(step) < mu(1) at step=" + std::to_string(step));
        if (i > 1 && ph > prev_phi * (1.0 + 1e-12))
            throw PolicyError("phi is not decreasing near step=" + std::to_string(step));
        prev_phi = ph;
        const double v = mu1 + (policy.h_hat * 4.0 - mu1) * i / samples;
        const double back = policy.mu(policy.mu_inv(v));
        if (std::abs(back - v) > 1e-9 * (1.0 + std::abs(v)))
            throw PolicyError("mu_inv is not the inverse of mu at v=" + std::to_string(v));
    }
}

void truncate_point_into(std::span<const double> x, double radius,
                         std::span<double> out) {
    if (radius <= 0.0) throw DomainError("truncate_point: radius must be positive");
    double n2 = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) throw DomainError("truncate_point: non-finite input");
        n2 += v * v;
    }
    double n = std::sqrt(n2);
    std::copy(x.begin(), x.end(), out.begin());
    if (n <= radius) return;
    if (!std::isfinite(n)) {
        // |x|^2 overflowed; prescale by the largest component.
        double amax = 0.0;
        for (double v : x) amax = std::max(amax, std::abs(v));
        double s = 0.0;
        for (double v : x) {
            const double t = v / amax;
            s += t * t;
        }
        const double scale = (radius / amax) / std::sqrt(s);
        double m2 = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            out[i] = x[i] * scale;
            m2 += out[i] * out[i];
        }
        n = std::sqrt(m2);
    }
    // Rescaling can leave the norm a few ulps above the radius; nudging
    // until it lands inside makes a second truncation the exact identity.
    int guard = 0;
    while (n > radius && guard++ < 4) {
        const double scale = radius / n; // n > radius > 0, so x != 0 here
        double m2 = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            out[i] *= scale;
            m2 += out[i] * out[i];
        }
        n = std::sqrt(m2);
    }
}

Vec truncate_point(std::span<const double> x, double radius) {
    Vec out(x.size());
    truncate_point_into(x, radius, out);
    return out;
}

double truncation_radius(const TruncationPolicy& policy, double step) {
    if (!(step > 0.0 && step <= 1.0))
        throw DomainError("truncation_radius: step must lie in (0, 1]");
    const double ph = policy.phi(step);
    if (ph < policy.mu(1.0) * (1.0 - 1e-12))
        throw PolicyError("phi(step) < mu(1): radius mu^{-1}(phi(step)) undefined");
    return policy.mu_inv(ph);
}

Vec truncated_drift(const SddeProblem& p, const TruncationPolicy& policy,
                    double step, std::span<const double> x,
                    std::span<const double> y) {
    const double r = truncation_radius(policy, step);
    Vec tx(x.size()), ty(y.size()), out(static_cast<size_t>(p.dim_x));
    truncate_point_into(x, r, tx);
    truncate_point_into(y, r, ty);
    p.drift(tx, ty, out);
    return out;
}

Mat truncated_diffusion(const SddeProblem& p, const TruncationPolicy& policy,
                        double step, std::span<const double> x,
                        std::span<const double> y) {
    const double r = truncation_radius(policy, step);
    Vec tx(x.size()), ty(y.size());
    truncate_point_into(x, r, tx);
    truncate_point_into(y, r, ty);
    Mat out(p.dim_x, p.dim_w);
    p.diffusion(tx, ty, out.a);
    return out;
}

Vec partially_truncated_drift(const SplitSddeProblem& split,
                              const TruncationPolicy& policy, double step,
                              std::span<const double> x,
                              std::span<const double> y) {
    const double r = truncation_radius(policy, step);
    const size_t d = static_cast<size_t>(split.base.dim_x);
    Vec tx(x.size()), ty(y.size()), lin(d), sup(d);
    truncate_point_into(x, r, tx);
    truncate_point_into(y, r, ty);
    split.drift_linear(x, y, lin);
    split.drift_super(tx, ty, sup);
    for (size_t i = 0; i < d; ++i) lin[i] += sup[i];
    return lin;
}

Mat partially_truncated_diffusion(const SplitSddeProblem& split,
                                  const TruncationPolicy& policy, double step,
                                  std::span<const double> x,
                                  std::span<const double> y) {
    const double r = truncation_radius(policy, step);
    const size_t dm =
        static_cast<size_t>(split.base.dim_x) * static_cast<size_t>(split.base.dim_w);
    Vec tx(x.size()), ty(y.size()), sup(dm);
    truncate_point_into(x, r, tx);
    truncate_point_into(y, r, ty);
    Mat out(split.base.dim_x, split.base.dim_w);
    split.diff_linear(x, y, out.a);
    split.diff_super(tx, ty, sup);
    for (size_t i = 0; i < dm; ++i) out.a[i] += sup[i];
    return out;
}

} // namespace sddem
