#include "sddem/brownian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "sddem/errors.hpp"

namespace sddem {

namespace philox {

namespace {
constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& c, std::uint32_t k0,
                       std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}
} // namespace

std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t counter) {
    std::array<std::uint32_t, 4> c = {
        static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    round_once(c, k0, k1);
    for (int r = 1; r < 10; ++r) {
        k0 += kWeyl0;
        k1 += kWeyl1;
        round_once(c, k0, k1);
    }
    return c;
}

double to_unit_double(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    // 53 mantissa bits, offset by half a ulp: strictly inside (0,1).
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace philox

// Pinned algorithm: AS241-style rational initial guess, then one Halley
// step against 0.5*erfc(-x/sqrt(2)) in the tail branches.  The central
// branch is already accurate to ~1 ulp and is left untouched.
double normal_inv_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("normal_inv_cdf: p must lie strictly inside (0,1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                      6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                    1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                  1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return num / den;
    }
    const double tail_p = q < 0.0 ? p : 1.0 - p;
    double r = std::sqrt(-std::log(tail_p));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-9) * r +
                    1.84631831751005468180e-6) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    // Halley refinement on the tail value x = -val (x < 0, CDF is the
    // well-conditioned 0.5*erfc(|x|/sqrt 2) = tail_p).  One pass for
    // p >= ~1e-11 where the rational guess is already near machine
    // precision; up to four passes recover full precision down to 1e-50.
    double x = -val;
    for (int it = 0; it < 4; ++it) {
        const double density =
            std::exp(-0.5 * x * x) * 0.39894228040143267794; // 1/sqrt(2 pi)
        if (density <= 0.0) break;
        const double cdf = 0.5 * std::erfc(-x * 0.70710678118654752440);
        const double u = (cdf - tail_p) / density;
        const double corr = u / (1.0 + 0.5 * x * u);
        x -= corr;
        if (std::abs(corr) <= 1e-11 * (1.0 + std::abs(x))) break;
    }
    return q < 0.0 ? x : -x;
}

double gaussian_draw(std::uint64_t seed, std::uint64_t path_id, std::uint64_t k) {
    const auto w = philox::block(seed, path_id, k >> 1);
    const double u = (k & 1) == 0 ? philox::to_unit_double(w[0], w[1])
                                  : philox::to_unit_double(w[2], w[3]);
    return normal_inv_cdf(u);
}

BrownianGrid generate(std::uint64_t seed, std::uint64_t path_id,
                      double finest_step, double horizon, int dim_w) {
    if (finest_step <= 0.0) throw ConfigError("generate: finest_step must be positive");
    if (dim_w < 1) throw ConfigError("generate: dim_w must be >= 1");
    const double q = horizon / finest_step;
    const double r = std::round(q);
    if (r < 1.0 || std::abs(q - r) > 1e-9 * std::max(1.0, q))
        throw ConfigError("generate: finest_step does not divide horizon");
    const std::size_t n = static_cast<std::size_t>(r);

    BrownianGrid g;
    g.finest_step = finest_step;
    g.horizon = horizon;
    g.dim_w = dim_w;
    g.seed = seed;
    g.path_id = path_id;
    g.increments.resize(n * static_cast<std::size_t>(dim_w));

    const double scale = std::sqrt(finest_step);
    const std::uint64_t total = g.increments.size();
    // Two draws per Philox block; tail block uses only its first lane.
    for (std::uint64_t b = 0; b * 2 < total; ++b) {
        const auto w = philox::block(seed, path_id, b);
        g.increments[b * 2] =
            scale * normal_inv_cdf(philox::to_unit_double(w[0], w[1]));
        if (b * 2 + 1 < total)
            g.increments[b * 2 + 1] =
                scale * normal_inv_cdf(philox::to_unit_double(w[2], w[3]));
    }
    return g;
}

BrownianGrid coarsen(const BrownianGrid& grid, long factor) {
    if (factor < 1) throw ConfigError("coarsen: factor must be >= 1");
    if (factor == 1) return grid;
    const std::size_t n = grid.n_steps();
    if (n % static_cast<std::size_t>(factor) != 0)
        throw ConfigError("coarsen: factor " + std::to_string(factor) +
                          " does not divide n_steps " + std::to_string(n));
    BrownianGrid out;
    out.finest_step = grid.finest_step * static_cast<double>(factor);
    out.horizon = grid.horizon;
    out.dim_w = grid.dim_w;
    out.seed = grid.seed;
    out.path_id = grid.path_id;
    const std::size_t m = static_cast<std::size_t>(grid.dim_w);
    const std::size_t nc = n / static_cast<std::size_t>(factor);
    out.increments.assign(nc * m, 0.0);
    // Left-to-right accumulation keeps partial sums identical to the fine
    // grid's at shared time points.
    for (std::size_t i = 0; i < nc; ++i)
        for (std::size_t f = 0; f < static_cast<std::size_t>(factor); ++f)
            for (std::size_t j = 0; j < m; ++j)
                out.increments[i * m + j] +=
                    grid.increments[(i * factor + f) * m + j];
    return out;
}

namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms unsupported");

template <typename T>
void put_le(std::ofstream& os, T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::ifstream& is) {
    unsigned char buf[sizeof(T)];
    is.read(reinterpret_cast<char*>(buf), sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

} // namespace

void save_grid(const BrownianGrid& grid, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("save_grid: cannot open " + path);
    put_le<std::uint64_t>(os, grid.seed);
    put_le<std::uint64_t>(os, grid.path_id);
    put_le<double>(os, grid.finest_step);
    put_le<double>(os, grid.horizon);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(grid.dim_w));
    for (double v : grid.increments) put_le<double>(os, v);
    if (!os) throw ConfigError("save_grid: write failed for " + path);
}

BrownianGrid load_grid(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("load_grid: cannot open " + path);
    BrownianGrid g;
    g.seed = get_le<std::uint64_t>(is);
    g.path_id = get_le<std::uint64_t>(is);
    g.finest_step = get_le<double>(is);
    g.horizon = get_le<double>(is);
    g.dim_w = static_cast<int>(get_le<std::uint32_t>(is));
    if (!is) throw ConfigError("load_grid: truncated header in " + path);
    const double q = g.horizon / g.finest_step;
    const double r = std::round(q);
    if (g.dim_w < 1 || r < 1.0 || std::abs(q - r) > 1e-9 * std::max(1.0, q))
        throw ConfigError("load_grid: inconsistent header in " + path);
    const std::size_t count =
        static_cast<std::size_t>(r) * static_cast<std::size_t>(g.dim_w);
    g.increments.resize(count);
    for (std::size_t i = 0; i < count; ++i) g.increments[i] = get_le<double>(is);
    if (!is) throw ConfigError("load_grid: truncated payload in " + path);
    // Payload must end exactly where the header says.
    char extra;
    if (is.read(&extra, 1))
        throw ConfigError("load_grid: trailing bytes in " + path);
    return g;
}

} // namespace sddem
