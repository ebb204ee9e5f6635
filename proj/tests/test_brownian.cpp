#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "sddem/brownian.hpp"
#include "sddem/errors.hpp"

using namespace sddem;

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Reference vectors of the published algorithm (counter, key -> output).
    {
        auto w = philox::block(0, 0, 0);
        CHECK(w[0] == 0x6627e8d5u);
        CHECK(w[1] == 0xe169c58du);
        CHECK(w[2] == 0xbc57ac4cu);
        CHECK(w[3] == 0x9b00dbd8u);
    }
    {
        // counter = key = all ones.
        auto w = philox::block(0xffffffffffffffffull, 0xffffffffffffffffull,
                               0xffffffffffffffffull);
        CHECK(w[0] == 0x408f276du);
        CHECK(w[1] == 0x41c83b0eu);
        CHECK(w[2] == 0xa20bc7c6u);
        CHECK(w[3] == 0x6d5451fdu);
    }
    {
        // counter = (0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344),
        // key = (0xa4093822, 0x299f31d0): the pi-digits vector.
        const std::uint64_t ctr = 0x85a308d3243f6a88ull;
        const std::uint64_t stream = 0x0370734413198a2eull;
        const std::uint64_t key = 0x299f31d0a4093822ull;
        auto w = philox::block(key, stream, ctr);
        CHECK(w[0] == 0xd16cfe09u);
        CHECK(w[1] == 0x94fdccebu);
        CHECK(w[2] == 0x5001e420u);
        CHECK(w[3] == 0x24126ea1u);
    }
}

TEST_CASE("AS241 inverse normal CDF against reference quantiles") {
    // Frozen double-precision quantiles.
    const struct {
        double p, z;
    } table[] = {
        {1e-50, -14.933337534788487},
        {1e-30, -11.464024688443613},
        {1e-10, -6.361340902404056},
        {0.001, -3.090232306167813},
        {0.025, -1.9599639845400545},
        {0.3, -0.5244005127080409},
        {0.5, 0.0},
        {0.7, 0.5244005127080407},
        {0.975, 1.959963984540054},
        {0.999, 3.090232306167813},
        {0.9999999999, 6.361340889697422},
    };
    for (const auto& row : table)
        CHECK(normal_inv_cdf(row.p) == doctest::Approx(row.z).epsilon(1e-14));
    CHECK(normal_inv_cdf(0.5) == 0.0);
    CHECK_THROWS_AS(normal_inv_cdf(0.0), DomainError);
    CHECK_THROWS_AS(normal_inv_cdf(1.0), DomainError);

    // Antisymmetry where 1-p is exactly mirrorable in double precision.
    for (double p : {1e-3, 0.01, 0.2, 0.49})
        CHECK(normal_inv_cdf(p) == doctest::Approx(-normal_inv_cdf(1.0 - p)).epsilon(1e-12));
}

TEST_CASE("generate: determinism and stream independence") {
    auto g1 = generate(42, 7, 1e-3, 1.0, 2);
    auto g2 = generate(42, 7, 1e-3, 1.0, 2);
    REQUIRE(g1.increments.size() == 2000);
    CHECK(g1.increments == g2.increments); // bit-identical

    auto g3 = generate(42, 8, 1e-3, 1.0, 2);
    CHECK(g1.increments != g3.increments);
    auto g4 = generate(43, 7, 1e-3, 1.0, 2);
    CHECK(g1.increments != g4.increments);

    CHECK_THROWS_AS(generate(1, 0, 0.3, 1.0, 1), ConfigError); // 1/0.3 not integer
}

TEST_CASE("generate: pooled increment variance matches the step") {
    const double step = 1e-3;
    double sum = 0.0, sumsq = 0.0;
    long n = 0;
    for (int pid = 0; pid < 10; ++pid) {
        auto g = generate(2024, pid, step, 10.0, 1); // 10^4 each
        for (double v : g.increments) {
            sum += v;
            sumsq += v * v;
            ++n;
        }
    }
    REQUIRE(n == 100000);
    const double mean = sum / n;
    const double var = (sumsq - n * mean * mean) / (n - 1);
    CHECK(var > 0.95e-3);
    CHECK(var < 1.05e-3);
    CHECK(std::abs(mean) < 3.0 * std::sqrt(step / n)); // ~3 sigma
}

TEST_CASE("standardized increments pass a Kolmogorov-Smirnov test at 1%") {
    const double step = 1e-3;
    std::vector<double> z;
    for (int pid = 0; pid < 10; ++pid) {
        auto g = generate(555, pid, step, 10.0, 1);
        for (double v : g.increments) z.push_back(v / std::sqrt(step));
    }
    std::sort(z.begin(), z.end());
    const double n = static_cast<double>(z.size());
    double d = 0.0;
    for (size_t i = 0; i < z.size(); ++i) {
        const double cdf = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
        d = std::max(d, std::abs((i + 1) / n - cdf));
        d = std::max(d, std::abs(cdf - i / n));
    }
    // 1% asymptotic critical value: 1.62762 / sqrt(n).
    CHECK(d < 1.62762 / std::sqrt(n));
}

TEST_CASE("coarsen: telescoping sums and factor algebra") {
    BrownianGrid g;
    g.finest_step = 0.25;
    g.horizon = 1.0;
    g.dim_w = 1;
    g.increments = {1.0, 2.0, 3.0, 4.0};
    auto c = coarsen(g, 2);
    REQUIRE(c.n_steps() == 2);
    CHECK(c.increments[0] == 3.0);
    CHECK(c.increments[1] == 7.0);
    CHECK(c.finest_step == 0.5);

    auto id = coarsen(g, 1);
    CHECK(id.increments == g.increments);

    auto real = generate(9, 3, 1.0 / 1024, 1.0, 3);
    auto c4 = coarsen(real, 4);
    auto c22 = coarsen(coarsen(real, 2), 2);
    REQUIRE(c4.increments.size() == c22.increments.size());
    // Same entries, different association: equal to accumulated rounding.
    for (size_t i = 0; i < c4.increments.size(); ++i)
        CHECK(c4.increments[i] ==
              doctest::Approx(c22.increments[i]).epsilon(1e-14));

    CHECK_THROWS_AS(coarsen(g, 3), ConfigError);
}

TEST_CASE("coarsen: partial sums agree with the fine path at shared times") {
    auto fine = generate(31, 0, 1.0 / 4096, 1.0, 1);
    auto coarse = coarsen(fine, 16);

    // Flat left-to-right fine accumulation vs coarse accumulation: same
    // path, agreement to accumulated rounding (catches any wrong-entry or
    // ordering bug by a huge margin).
    double fine_sum = 0.0, coarse_sum = 0.0;
    size_t fi = 0;
    for (size_t ci = 0; ci < coarse.n_steps(); ++ci) {
        for (int j = 0; j < 16; ++j) fine_sum += fine.increments[fi++];
        coarse_sum += coarse.increments[ci];
        CHECK(coarse_sum == doctest::Approx(fine_sum).epsilon(1e-12));
    }

    // Blockwise fine accumulation reproduces the coarse walk bit for bit:
    // the addition order is pinned left-to-right inside each block.
    double block_walk = 0.0;
    fi = 0;
    for (size_t ci = 0; ci < coarse.n_steps(); ++ci) {
        double block = 0.0;
        for (int j = 0; j < 16; ++j) block += fine.increments[fi++];
        CHECK(block == coarse.increments[ci]); // exact
        block_walk += block;
    }
    (void)block_walk;
}

TEST_CASE("grid dump/load round trip") {
    namespace fs = std::filesystem;
    const auto path = fs::temp_directory_path() / "sddem_grid_test.bin";
    auto g = generate(77, 5, 1.0 / 64, 2.0, 2);
    save_grid(g, path.string());
    auto h = load_grid(path.string());
    CHECK(h.seed == g.seed);
    CHECK(h.path_id == g.path_id);
    CHECK(h.finest_step == g.finest_step);
    CHECK(h.horizon == g.horizon);
    CHECK(h.dim_w == g.dim_w);
    CHECK(h.increments == g.increments);

    // Truncated payload must not load quietly.
    auto size = fs::file_size(path);
    fs::resize_file(path, size - 8);
    CHECK_THROWS_AS(load_grid(path.string()), ConfigError);
    fs::remove(path);
}

TEST_CASE("gaussian_draw indexes the same stream as generate") {
    auto g = generate(11, 2, 1e-2, 1.0, 1);
    const double scale = std::sqrt(1e-2);
    for (std::uint64_t k = 0; k < g.increments.size(); ++k)
        CHECK(g.increments[k] == scale * gaussian_draw(11, 2, k));
}
