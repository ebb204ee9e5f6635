#ifndef SDDEM_BROWNIAN_HPP
#define SDDEM_BROWNIAN_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace sddem {

// Counter-based generator: Philox4x32-10, keyed by (seed, path_id).
// Draw i of a path never depends on how many draws came before it, so
// paths can be generated in any order, on any thread, bit-identically.
// The algorithm is pinned: golden tests freeze both the Philox output
// words and the downstream normal variates.
namespace philox {

std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t counter);

// Uniform in (0,1) built from two 32-bit words (53-bit mantissa, never 0 or 1).
double to_unit_double(std::uint32_t hi, std::uint32_t lo);

} // namespace philox

// Inverse standard-normal CDF: AS241-style rational initial guess plus
// Halley refinement against erfc.  Near machine precision for
// p in [1e-50, 1-1e-50], which covers every uniform this module can emit.
double normal_inv_cdf(double p);

// Gaussian draw k of path (seed, path_id): two draws per Philox block.
double gaussian_draw(std::uint64_t seed, std::uint64_t path_id, std::uint64_t k);

// Wiener increments on a uniform grid: increments[i*dim_w + j] is
// component j of B(t_{i+1}) - B(t_i), variance finest_step each.
struct BrownianGrid {
    double finest_step = 0.0;
    double horizon = 0.0;
    int dim_w = 1;
    std::uint64_t seed = 0;
    std::uint64_t path_id = 0;
    std::vector<double> increments;

    std::size_t n_steps() const {
        return dim_w > 0 ? increments.size() / static_cast<std::size_t>(dim_w) : 0;
    }
};

// finest_step must divide horizon to within rounding of an integer count.
BrownianGrid generate(std::uint64_t seed, std::uint64_t path_id,
                      double finest_step, double horizon, int dim_w);

// Sums runs of `factor` fine increments (left to right) into one coarse
// increment: the same Brownian path seen on a grid factor*finest_step wide.
// factor must divide n_steps.
BrownianGrid coarsen(const BrownianGrid& grid, long factor);

// Little-endian dump: seed u64, path_id u64, finest_step f64, horizon f64,
// dim_w u32, then the increments as f64.
void save_grid(const BrownianGrid& grid, const std::string& path);
BrownianGrid load_grid(const std::string& path);

} // namespace sddem

#endif
