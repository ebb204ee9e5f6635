#ifndef SDDEM_PROBLEM_HPP
#define SDDEM_PROBLEM_HPP

#include <functional>
#include <span>
#include <string>

#include "sddem/delay.hpp"
#include "sddem/linalg.hpp"

namespace sddem {

// Coefficients write into caller-owned buffers: out has dim_x entries for
// drifts, dim_x*dim_w row-major entries for diffusions.
using DriftFn = std::function<void(std::span<const double> x,
                                   std::span<const double> y,
                                   std::span<double> out)>;
using DiffFn = std::function<void(std::span<const double> x,
                                  std::span<const double> y,
                                  std::span<double> out)>;

// Initial segment xi on [-tau, 0], Holder continuous with
// |xi(t)-xi(s)| <= holder_K4 |t-s|^holder_rho.
struct InitialPath {
    std::function<Vec(double)> xi;
    double holder_K4 = 1.0;
    double holder_rho = 1.0;

    static InitialPath constant(const Vec& value, double K4 = 2.0,
                                double rho = 0.5);
};

struct SddeProblem {
    int dim_x = 1;
    int dim_w = 1;
    DriftFn drift;
    DiffFn diffusion;
    DelayFunction delay;
    InitialPath initial;

    Vec eval_drift(std::span<const double> x, std::span<const double> y) const;
    Mat eval_diffusion(std::span<const double> x, std::span<const double> y) const;
};

// f = F1 + F, g = G1 + G with F1/G1 globally Lipschitz (constant lbar) and
// F/G the super-linear remainders (local constant lbar1 on the unit ball).
// All four vanish at the origin.
struct SplitSddeProblem {
    SddeProblem base;
    DriftFn drift_linear;  // F1
    DriftFn drift_super;   // F
    DiffFn diff_linear;    // G1
    DiffFn diff_super;     // G
    double lbar = 0.0;
    double lbar1 = 0.0;
};

struct SampledCheckReport {
    bool ok = true;
    long violations = 0;
    double worst = 0.0; // largest residual seen
    std::string message;
};

// |xi(t)-xi(s)| <= K4 |t-s|^rho on `pairs` random pairs in [-tau, 0].
SampledCheckReport check_initial_holder(const InitialPath& init, double tau,
                                        long pairs = 1000,
                                        double tol = 1e-9,
                                        std::uint64_t seed = 0);

// F1+F == f and G1+G == g on sampled points (relative 1e-12), and all four
// pieces vanish at the origin.
SampledCheckReport check_split_consistency(const SplitSddeProblem& split,
                                           long samples = 1000,
                                           double box = 10.0,
                                           std::uint64_t seed = 0);

} // namespace sddem

#endif
