#ifndef SDDEM_SOLVER_HPP
#define SDDEM_SOLVER_HPP

#include <span>
#include <string>
#include <vector>

#include "sddem/brownian.hpp"
#include "sddem/problem.hpp"
#include "sddem/truncation.hpp"

namespace sddem {

enum class TruncationMode {
    full,    // f(pi(x), pi(y)), g(pi(x), pi(y))
    partial, // F1(x,y) + F(pi(x), pi(y)) etc.; needs a SplitSddeProblem
};

struct SolverConfig {
    double step = 0.0;      // = tau/M for integer M >= 1 (any step if tau = 0)
    double horizon = 0.0;   // T; T/step must be an integer
    long record_stride = 1; // thin recorded output to indices k % stride == 0
};

enum class PathStatus { ok, overflow };

// Grid-point values y_k for k = -M..N at stride record_stride (k = N always
// recorded).  The k <= 0 prefix holds xi(k*step) exactly.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> values;
    PathStatus status = PathStatus::ok;
    long overflow_step = -1; // grid index of the first non-finite state

    const Vec& final_value() const { return values.back(); }
};

struct EnsembleMoments {
    std::vector<double> times;
    std::vector<double> mean_sq; // E|y_k|^2 over completed paths
    std::vector<double> std_err; // standard error of the |y_k|^2 mean
    long count = 0;              // completed paths
    long n_failed = 0;           // overflowed paths (excluded from moments)
    std::vector<PathStatus> statuses;
};

// Last M+1 states on the grid, indexed by absolute grid index k.
class HistoryRing {
  public:
    HistoryRing(long depth, int dim)
        : depth_(depth), dim_(dim),
          buf_(static_cast<size_t>(depth + 1) * dim, 0.0) {}

    std::span<double> slot(long k) {
        return {buf_.data() + row(k) * dim_, static_cast<size_t>(dim_)};
    }
    std::span<const double> at(long k) const {
        return {buf_.data() + row(k) * dim_, static_cast<size_t>(dim_)};
    }
    long depth() const { return depth_; }

  private:
    size_t row(long k) const {
        const long m = depth_ + 1;
        return static_cast<size_t>(((k % m) + m) % m);
    }
    long depth_;
    int dim_;
    std::vector<double> buf_;
};

// One update of the recursion
//   y_{k+1} = y_k + f_step(y_k, y_{k-delta_k}) step + g_step(...) dW.
// history must expose indices [k - M, k]; dW has dim_w entries.
Vec step_once(const SddeProblem& problem, const TruncationPolicy& policy,
              const SolverConfig& config, long k, const HistoryRing& history,
              std::span<const double> dW);

// Full-truncation run on the given Brownian path.  The grid's finest_step
// must equal config.step or divide it (coarsened internally).  Requesting
// partial mode here is a ConfigError: no split data.
Trajectory simulate(const SddeProblem& problem, const TruncationPolicy& policy,
                    const SolverConfig& config, const BrownianGrid& grid,
                    TruncationMode mode = TruncationMode::full);
Trajectory simulate(const SplitSddeProblem& split, const TruncationPolicy& policy,
                    const SolverConfig& config, const BrownianGrid& grid,
                    TruncationMode mode = TruncationMode::partial);

// Mean of |y_k|^2 across paths with path_id = 0..n_paths-1.  Paths are
// reduced block-by-block in fixed order, so the result is bit-identical
// for any worker count.
EnsembleMoments run_ensemble(const SddeProblem& problem,
                             const TruncationPolicy& policy,
                             const SolverConfig& config, long n_paths,
                             std::uint64_t seed,
                             TruncationMode mode = TruncationMode::full,
                             unsigned workers = 0);
EnsembleMoments run_ensemble(const SplitSddeProblem& split,
                             const TruncationPolicy& policy,
                             const SolverConfig& config, long n_paths,
                             std::uint64_t seed,
                             TruncationMode mode = TruncationMode::partial,
                             unsigned workers = 0);

// CSV: "t,y_1,..,y_d" and "t,mean_sq,stderr,n".
void write_trajectory_csv(const Trajectory& tr, const std::string& path);
void write_moments_csv(const EnsembleMoments& m, const std::string& path);

} // namespace sddem

#endif
