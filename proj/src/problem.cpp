#include "sddem/problem.hpp"

#include <cmath>
#include <cstdint>

namespace sddem {

InitialPath InitialPath::constant(const Vec& value, double K4, double rho) {
    return {[value](double) { return value; }, K4, rho};
}

Vec SddeProblem::eval_drift(std::span<const double> x,
                            std::span<const double> y) const {
    Vec out(static_cast<size_t>(dim_x), 0.0);
    drift(x, y, out);
    return out;
}

Mat SddeProblem::eval_diffusion(std::span<const double> x,
                                std::span<const double> y) const {
    Mat out(dim_x, dim_w);
    diffusion(x, y, out.a);
    return out;
}

namespace {
// splitmix64; enough for sampling check points.
struct MiniRng {
    std::uint64_t s;
    explicit MiniRng(std::uint64_t seed) : s(seed + 0x9E3779B97F4A7C15ull) {}
    std::uint64_t next_u64() {
        std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};
} // namespace

SampledCheckReport check_initial_holder(const InitialPath& init, double tau,
                                        long pairs, double tol,
                                        std::uint64_t seed) {
    SampledCheckReport rep;
    MiniRng rng(seed ^ 0x1A171A1ull);
    for (long i = 0; i < pairs; ++i) {
        const double t = rng.uniform(-tau, 0.0);
        const double s = rng.uniform(-tau, 0.0);
        Vec a = init.xi(t), b = init.xi(s);
        double diff = 0.0;
        for (size_t j = 0; j < a.size(); ++j) diff += (a[j] - b[j]) * (a[j] - b[j]);
        diff = std::sqrt(diff);
        const double bound =
            init.holder_K4 * std::pow(std::abs(t - s), init.holder_rho) + tol;
        if (diff > bound) {
            ++rep.violations;
            rep.worst = std::max(rep.worst, diff - bound);
        }
    }
    rep.ok = rep.violations == 0;
    if (!rep.ok) rep.message = "initial path violates declared Holder bound";
    return rep;
}

SampledCheckReport check_split_consistency(const SplitSddeProblem& split,
                                           long samples, double box,
                                           std::uint64_t seed) {
    SampledCheckReport rep;
    const int d = split.base.dim_x;
    const int dm = split.base.dim_x * split.base.dim_w;
    Vec x(d), y(d), f(d), f1(d), fs(d);
    Vec g(dm), g1(dm), gs(dm);
    MiniRng rng(seed ^ 0x5137Dull);

    auto check_point = [&](bool origin) {
        for (int j = 0; j < d; ++j) {
            x[j] = origin ? 0.0 : rng.uniform(-box, box);
            y[j] = origin ? 0.0 : rng.uniform(-box, box);
        }
        split.base.drift(x, y, f);
        split.drift_linear(x, y, f1);
        split.drift_super(x, y, fs);
        split.base.diffusion(x, y, g);
        split.diff_linear(x, y, g1);
        split.diff_super(x, y, gs);
        double worst = 0.0;
        for (int j = 0; j < d; ++j) {
            const double r = std::abs(f1[j] + fs[j] - f[j]) /
                             (1.0 + std::abs(f[j]));
            worst = std::max(worst, r);
        }
        for (int j = 0; j < dm; ++j) {
            const double r = std::abs(g1[j] + gs[j] - g[j]) /
                             (1.0 + std::abs(g[j]));
            worst = std::max(worst, r);
        }
        if (origin) {
            for (int j = 0; j < d; ++j)
                worst = std::max({worst, std::abs(f1[j]), std::abs(fs[j])});
            for (int j = 0; j < dm; ++j)
                worst = std::max({worst, std::abs(g1[j]), std::abs(gs[j])});
        }
        if (worst > 1e-12) {
            ++rep.violations;
            rep.worst = std::max(rep.worst, worst);
        }
    };

    check_point(true);
    for (long i = 0; i < samples; ++i) check_point(false);
    rep.ok = rep.violations == 0;
    if (!rep.ok)
        rep.message = "split coefficients do not sum to the base coefficients";
    return rep;
}

} // namespace sddem
