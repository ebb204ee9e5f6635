#include "sddem/builtin.hpp"

#include <algorithm>
#include <cmath>

namespace sddem {

ProblemBundle make_example1() {
    ProblemBundle b;
    b.name = "example1";
    b.problem.dim_x = 1;
    b.problem.dim_w = 1;
    b.problem.drift = [](std::span<const double> x, std::span<const double> y,
                         std::span<double> out) {
        const double ay = std::abs(y[0]);
        out[0] = -9.0 * x[0] * x[0] * x[0] + ay * std::sqrt(ay);
    };
    b.problem.diffusion = [](std::span<const double> x, std::span<const double>,
                             std::span<double> out) { out[0] = x[0] * x[0]; };
    b.problem.delay = DelayFunction::sinusoid(0.5, 0.5, 1.0);
    b.problem.initial = InitialPath::constant({2.0}, 2.0, 0.5);
    b.policy = TruncationPolicy::power_law(10.0, 2.0, 10.0, 0.25, 10.0);
    // Certified by grid scan: 2xf + g^2 = -17x^4 + 2x|y|^{3/2}
    //                                  <= 1.5(1+x^2+y^2) - 16|x|^4.
    b.khasminskii = {1.5, 16.0, 0.0, 4.0};
    b.default_mode = TruncationMode::full;
    return b;
}

ProblemBundle make_example2(double a, double b_, double c) {
    ProblemBundle b;
    b.name = "example2";
    SddeProblem& p = b.problem;
    p.dim_x = 1;
    p.dim_w = 1;
    p.drift = [a, b_](std::span<const double> x, std::span<const double> y,
                      std::span<double> out) {
        out[0] = x[0] * (a + b_ * y[0] - x[0] * x[0]);
    };
    p.diffusion = [c](std::span<const double> x, std::span<const double> y,
                      std::span<double> out) { out[0] = c * x[0] * y[0]; };
    p.delay = DelayFunction::sinusoid(0.05, 0.05, 0.1);
    p.initial = InitialPath::constant({1.0}, 2.0, 0.5);

    SplitSddeProblem split;
    split.base = p;
    split.drift_linear = [a](std::span<const double> x, std::span<const double>,
                             std::span<double> out) { out[0] = a * x[0]; };
    split.drift_super = [b_](std::span<const double> x, std::span<const double> y,
                             std::span<double> out) {
        out[0] = b_ * x[0] * y[0] - x[0] * x[0] * x[0];
    };
    split.diff_linear = [](std::span<const double>, std::span<const double>,
                           std::span<double> out) { out[0] = 0.0; };
    split.diff_super = p.diffusion;
    split.lbar = 5.0;
    split.lbar1 = 0.0;
    b.split = std::move(split);

    const double coeff = std::max(std::abs(b_) + 1.0, std::abs(c));
    b.policy = TruncationPolicy::power_law(coeff, 2.0, coeff, 0.25, coeff);
    // Certified by grid scan: 2xf + g^2 = -6x^2 + 2x^2 y - 2x^4 + 0.25 x^2 y^2
    //                                  <= (1+x^2+y^2) - 0.875 x^4 + 0.125 y^4.
    b.khasminskii = {1.0, 0.875, 0.125, 4.0};

    StabilityParams s;
    s.lambda1 = -2.0 * a;
    s.lambda2 = 0.0;
    s.alpha1 = 0.0;
    s.alpha2 = 2.0 * b_ * b_;
    s.alpha3 = 1.0;
    s.alpha4 = 0.5 * c * c * c * c;
    s.beta = 4.0;
    s.lbar = split.lbar;
    s.lbar1 = split.lbar1;
    b.stability = s;
    b.default_mode = TruncationMode::partial;
    return b;
}

ProblemBundle make_affine(double ax, double ay, double a0, double bx, double by,
                          double b0, DelayFunction delay, InitialPath initial) {
    ProblemBundle b;
    b.name = "affine";
    b.problem.dim_x = 1;
    b.problem.dim_w = 1;
    b.problem.drift = [ax, ay, a0](std::span<const double> x,
                                   std::span<const double> y,
                                   std::span<double> out) {
        out[0] = ax * x[0] + ay * y[0] + a0;
    };
    b.problem.diffusion = [bx, by, b0](std::span<const double> x,
                                       std::span<const double> y,
                                       std::span<double> out) {
        out[0] = bx * x[0] + by * y[0] + b0;
    };
    b.problem.delay = std::move(delay);
    b.problem.initial = std::move(initial);
    const double c = std::max({1.0, std::abs(ax) + std::abs(ay) + std::abs(a0),
                               std::abs(bx) + std::abs(by) + std::abs(b0)});
    b.policy = TruncationPolicy::power_law(c, 2.0, 100.0 * c, 0.25, 100.0 * c);
    b.khasminskii = {std::max(1.0, 3.0 * c * (1.0 + c)), 0.0, 0.0, 4.0};
    b.default_mode = TruncationMode::full;
    return b;
}

ProblemBundle make_cubic(double s1, double s2, double s3, DelayFunction delay,
                         InitialPath initial) {
    ProblemBundle b;
    b.name = "cubic";
    b.problem.dim_x = 1;
    b.problem.dim_w = 1;
    b.problem.drift = [s1, s2](std::span<const double> x,
                               std::span<const double> y, std::span<double> out) {
        out[0] = s1 * x[0] * x[0] * x[0] + s2 * y[0] * y[0] * y[0];
    };
    b.problem.diffusion = [s3](std::span<const double> x, std::span<const double>,
                               std::span<double> out) {
        out[0] = s3 * x[0] * x[0];
    };
    b.problem.delay = std::move(delay);
    b.problem.initial = std::move(initial);
    const double c = std::max({1.0, std::abs(s1) + std::abs(s2), std::abs(s3)});
    b.policy = TruncationPolicy::power_law(c, 2.0, c, 0.25, c);
    // No universally valid constants for s1 > 0; callers supply their own.
    b.khasminskii = {1.0, 0.0, 0.0, 4.0};
    b.default_mode = TruncationMode::full;
    return b;
}

} // namespace sddem
