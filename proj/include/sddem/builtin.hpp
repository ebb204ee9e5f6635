#ifndef SDDEM_BUILTIN_HPP
#define SDDEM_BUILTIN_HPP

#include <optional>
#include <string>

#include "sddem/khasminskii.hpp"
#include "sddem/solver.hpp"
#include "sddem/stability.hpp"

namespace sddem {

// A problem with everything the experiment commands need bundled around it.
struct ProblemBundle {
    std::string name;
    SddeProblem problem;
    std::optional<SplitSddeProblem> split;
    TruncationPolicy policy;
    KhasminskiiConstants khasminskii;
    std::optional<StabilityParams> stability;
    TruncationMode default_mode = TruncationMode::full;
};

// Scalar SDDE  dX = (-9 X^3 + |X_d|^{3/2}) dt + X^2 dB  with
// delta(t) = 0.5 - 0.5 sin t, tau = 1, xi = 2 on [-1, 0].
// Policy mu(r) = 10 r^2, phi(s) = 10 s^{-1/4}.
ProblemBundle make_example1();

// Scalar power logistic SDDE
//   dX = X (a + b X_d - X^2) dt + c X X_d dB
// split as F1 = a x (linear) and F = b x y - x^3, G = c x y (truncated),
// delta(t) = 0.05 - 0.05 sin t, tau = 0.1, xi = 1 on [-0.1, 0].
// Policy mu(r) = ((|b|+1) v |c|) r^2, same coefficient for phi.
ProblemBundle make_example2(double a = -3.0, double b = 1.0, double c = 0.5);

// Scalar affine coefficients f = ax x + ay y + a0, g = bx x + by y + b0.
// The policy is deliberately wide (phi_coeff = 100 mu_coeff) so truncation
// stays inactive in the regimes these test problems run in.
ProblemBundle make_affine(double ax, double ay, double a0, double bx, double by,
                          double b0, DelayFunction delay, InitialPath initial);

// Scalar cubic coefficients f = s1 x^3 + s2 y^3, g = s3 x^2.  s1 > 0 gives
// an explosive drift no Khasminskii constants can certify.
ProblemBundle make_cubic(double s1, double s2, double s3, DelayFunction delay,
                         InitialPath initial);

} // namespace sddem

#endif
