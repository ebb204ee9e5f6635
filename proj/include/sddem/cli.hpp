#ifndef SDDEM_CLI_HPP
#define SDDEM_CLI_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sddem/analysis.hpp"
#include "sddem/builtin.hpp"

namespace sddem::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1; // an invariant check found violations
inline constexpr int kExitConfig = 2;    // bad config / infeasible parameters
inline constexpr int kExitOverflow = 3;  // a required path went non-finite

// A fully validated experiment: problem bundle plus per-command blocks.
// Construction performs all validation; commands assume a good config.
struct ExperimentConfig {
    ProblemBundle bundle;
    TruncationMode mode = TruncationMode::full;
    SolverConfig solver;
    long n_paths = 1000;
    std::uint64_t seed = 12345;
    unsigned workers = 0;
    std::string out;

    // converge
    std::vector<double> conv_steps;
    double conv_reference_step = 0.0;
    long conv_n_paths = 0;

    // stability-table / decay fits
    std::optional<StabilityParams> stability;
    std::vector<double> delta_list;
    double window_lo = 0.0;
    double window_hi = 0.0;

    // check
    KhasminskiiConstants check_constants;
    double check_box = 50.0;
    int check_grid = 200;
    long check_k_max = 100000;
};

// Command-line values that take precedence over the config file.
struct Overrides {
    std::optional<std::string> problem;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
    std::optional<std::vector<double>> delta_list;
};

ExperimentConfig parse_config(const std::string& json_text, const Overrides& ov);
ExperimentConfig load_config_file(const std::string& path, const Overrides& ov);

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);
int cmd_converge(const ExperimentConfig& cfg, std::ostream& log);
int cmd_stability_table(const ExperimentConfig& cfg, std::ostream& log);
int cmd_check(const ExperimentConfig& cfg, std::ostream& log);

// Parse + dispatch + exception-to-exit-code mapping.  config_path may be
// empty when --problem is given.
int run_command(const std::string& subcommand,
                const std::optional<std::string>& config_path,
                const Overrides& ov, std::ostream& log);

} // namespace sddem::cli

#endif
