#ifndef SDDEM_STABILITY_HPP
#define SDDEM_STABILITY_HPP

#include <limits>

#include "sddem/truncation.hpp"

namespace sddem {

// Constants of the split-coefficient stability condition
//   2<x,F1> + (1+theta)|G1|^2      <= -lambda1 |x|^2 + lambda2 |y|^2
//   2<x,F>  + (1+1/theta)|G|^2     <= alpha1 |x|^2 + alpha2 |y|^2
//                                     - alpha3 |x|^beta + alpha4 |y|^beta.
// theta is carried for completeness; no computed quantity here uses it.
struct StabilityParams {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
    double alpha4 = 0.0;
    double beta = 4.0; // > 2
    double theta = std::numeric_limits<double>::infinity();
    double lbar = 0.0;  // global Lipschitz constant of F1/G1
    double lbar1 = 0.0; // local constant of F/G on the unit ball

    // lambda1 - alpha1 - lambda2/4 - kappa*(lambda2+alpha2); the rate
    // equations need this margin positive.
    double margin(int kappa) const {
        return lambda1 - alpha1 - 0.25 * lambda2 - kappa * (lambda2 + alpha2);
    }
};

// (4 lbar + 2 lbar1) step + 8 phi(step)^2 step: the per-step perturbation
// the truncated coefficients add to the stability inequality.
double epsilon_delta(const StabilityParams& params,
                     const TruncationPolicy& policy, double step);

} // namespace sddem

#endif
