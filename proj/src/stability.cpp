#include "sddem/stability.hpp"

#include "sddem/errors.hpp"

namespace sddem {

double epsilon_delta(const StabilityParams& params,
                     const TruncationPolicy& policy, double step) {
    if (!(step > 0.0 && step <= 1.0))
        throw DomainError("epsilon_delta: step must lie in (0, 1]");
    const double ph = policy.phi(step);
    return (4.0 * params.lbar + 2.0 * params.lbar1) * step + 8.0 * ph * ph * step;
}

} // namespace sddem
